// roiprep: saliency-driven ROI extraction, modality selection and the
// synthetic evaluation harness, one subcommand per stage.
//
// Exit codes: 0 success, 1 usage/config error, 2 data/format error,
// 3 pipeline-stage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "roiprep/config.hpp"
#include "roiprep/error.hpp"
#include "roiprep/image.hpp"
#include "roiprep/pipeline.hpp"
#include "roiprep/roi.hpp"
#include "roiprep/saliency.hpp"
#include "roiprep/synth.hpp"
#include "roiprep/text.hpp"
#include "roiprep/tpe.hpp"

namespace {

using namespace roiprep;

enum ExitCode { kOk = 0, kUsage = 1, kData = 2, kStage = 3 };

// Flags that map 1:1 onto config keys; only flags actually given override
// the config file.
class SettingFlags {
 public:
  void add(CLI::App* app, const std::string& key, const std::string& help) {
    auto& slot = values_[key];
    options_.emplace_back(key, app->add_option("--" + key, slot, help));
  }

  Settings given() const {
    Settings out;
    for (const auto& [key, opt] : options_) {
      if (opt->count() > 0) out[key] = values_.at(key);
    }
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
  std::vector<std::pair<std::string, CLI::Option*>> options_;
};

void add_s3_flags(CLI::App* app, SettingFlags& flags) {
  flags.add(app, "delta", "background threshold for suppression (default 0.6)");
  flags.add(app, "epsilon", "gain where background exceeds delta (default 2.0)");
  flags.add(app, "clamp", "clamp negative combined saliency to 0 (default true)");
}

void add_roi_flags(CLI::App* app, SettingFlags& flags) {
  flags.add(app, "q", "quantile threshold in (0,1) (default 0.85)");
  flags.add(app, "tau", "fixed threshold in [0,1]; switches to fixed mode");
  flags.add(app, "connectivity", "4 or 8 (default 8)");
  flags.add(app, "min-area", "minimum region size in pixels");
  flags.add(app, "min-area-fraction", "minimum region size as image fraction (default 0.005)");
  flags.add(app, "max-boxes", "maximum boxes kept (default 3)");
}

void add_render_flags(CLI::App* app, SettingFlags& flags) {
  flags.add(app, "normalize", "joint | separate | none (default joint)");
  flags.add(app, "renormalize", "min-max the combined map before thresholding");
  flags.add(app, "box-color", "R,G,B (default 255,0,0)");
  flags.add(app, "box-thickness", "frame width in pixels (default 2)");
}

Settings base_settings(const std::string& config_path) {
  std::string path = config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ROIMAM_CONFIG"); env && *env) path = env;
  }
  return path.empty() ? Settings{} : load_settings_file(path);
}

PipelineConfig build_config(const std::string& config_path, const SettingFlags& flags) {
  PipelineConfig config;
  apply_settings(config, base_settings(config_path));
  apply_settings(config, flags.given());
  config.validate();
  return config;
}

std::string bytes_to_string(const std::vector<std::uint8_t>& bytes) {
  return {bytes.begin(), bytes.end()};
}

// Stages every output next to its destination, then renames them all, so a
// failure while writing leaves no partial result behind.
void commit_outputs(const std::vector<std::pair<std::string, std::string>>& outputs) {
  namespace fs = std::filesystem;
  std::vector<std::string> staged;
  try {
    for (const auto& [path, content] : outputs) {
      const std::string tmp = path + ".tmp";
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      if (!out) throw Error("cannot write '" + tmp + "'");
      staged.push_back(tmp);
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& tmp : staged) fs::remove(tmp, ec);
    throw;
  }
  for (const auto& [path, content] : outputs) fs::rename(path + ".tmp", path);
}

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void print_or_write(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
  } else {
    commit_outputs({{path, content}});
  }
}

// ---- roi ------------------------------------------------------------------

struct RoiArgs {
  std::string config;
  std::string ori, back, image, out_json, out_image;
  SettingFlags flags;
};

int run_roi(RoiArgs& args) {
  PipelineConfig config = build_config(args.config, args.flags);
  if (!args.ori.empty()) config.provider_ori = SaliencyProvider::parse(args.ori);
  if (!args.back.empty()) config.provider_back = SaliencyProvider::parse(args.back);
  if (!config.provider_ori || !config.provider_back) throw ConfigError("--ori and --back are required");
  if (!args.image.empty()) config.image = args.image;

  const SaliencyMap ori = config.provider_ori->load(MapRole::Ori);
  const SaliencyMap back = config.provider_back->load(MapRole::Back);
  const RasterImage image = config.image.empty() ? RasterImage(ori.width(), ori.height())
                                                 : read_ppm_file(config.image);
  if (!args.out_image.empty() && config.image.empty()) {
    throw ConfigError("--out-image needs --image");
  }
  const PipelineResult result = run_roi_only(image, ori, back, config);

  std::vector<std::pair<std::string, std::string>> outputs;
  const std::string json = report_to_json(result.report);
  if (!args.out_image.empty()) outputs.emplace_back(args.out_image, bytes_to_string(encode_ppm(result.overlay)));
  if (!args.out_json.empty()) outputs.emplace_back(args.out_json, json);
  commit_outputs(outputs);
  if (args.out_json.empty()) std::cout << json;
  return kOk;
}

// ---- tpe ------------------------------------------------------------------

struct TpeArgs {
  std::string image_emb, catalog, question;
  bool json = false;
};

int run_tpe(const TpeArgs& args) {
  const ModalityCatalog catalog = ModalityCatalog::load_manifest(args.catalog);
  const Embedding image_emb = read_embedding_file(args.image_emb);
  const ModalitySelection sel = select_modality(image_emb, catalog);
  if (args.json) {
    nlohmann::json scores = nlohmann::json::array();
    for (const auto& [label, score] : sel.all_scores) scores.push_back({{"label", label}, {"score", score}});
    nlohmann::json out = {{"label", sel.label}, {"score", sel.score}, {"scores", scores}};
    if (!args.question.empty()) out["prompt"] = build_enhanced_prompt(sel, {args.question}, {});
    std::cout << out.dump(2) << "\n";
    return kOk;
  }
  for (const auto& [label, score] : sel.all_scores) std::cout << label << '\t' << score << '\n';
  std::cout << "selected\t" << sel.label << '\n';
  if (!args.question.empty()) std::cout << build_enhanced_prompt(sel, {args.question}, {}) << '\n';
  return kOk;
}

// ---- textprep -------------------------------------------------------------

struct TextprepArgs {
  std::string question, lexicon, keywords;
  std::size_t top_k = 3;
};

int run_textprep(const TextprepArgs& args) {
  const QuestionText question{args.question};
  std::unique_ptr<KeywordExtractor> extractor;
  if (!args.keywords.empty()) {
    extractor = std::make_unique<FixedKeywordExtractor>(FixedKeywordExtractor::from_csv(args.keywords));
  } else if (!args.lexicon.empty()) {
    extractor = std::make_unique<LexiconKeywordExtractor>(Lexicon::load(args.lexicon), args.top_k);
  } else {
    throw ConfigError("one of --lexicon or --keywords is required");
  }
  const KeywordSet keywords = extractor->extract(question);
  nlohmann::json out = {{"question", question.raw},
                        {"keywords", keywords.keywords},
                        {"background_text", derive_background_text(question, keywords).raw},
                        {"extractor", extractor->describe()}};
  std::cout << out.dump(2) << "\n";
  return kOk;
}

// ---- pipeline -------------------------------------------------------------

struct PipelineArgs {
  std::string config;
  SettingFlags flags;
};

int run_pipeline_cmd(PipelineArgs& args) {
  const PipelineConfig config = build_config(args.config, args.flags);
  if (config.image.empty()) throw ConfigError("--image is required");
  const RasterImage image = read_ppm_file(config.image);
  const PipelineResult result = run_pipeline(image, {config.question}, config);

  const std::string json = report_to_json(result.report);
  std::vector<std::pair<std::string, std::string>> outputs;
  if (!config.out_image.empty()) {
    outputs.emplace_back(config.out_image, bytes_to_string(encode_ppm(result.overlay)));
  }
  if (!config.out_json.empty()) outputs.emplace_back(config.out_json, json);
  commit_outputs(outputs);
  if (config.out_json.empty()) {
    std::cout << json;
  } else {
    std::cout << *result.report.prompt << '\n';
  }
  return kOk;
}

// ---- harness --------------------------------------------------------------

struct HarnessArgs {
  std::string config;
  std::size_t scenes = 100;
  std::uint64_t seed = 0;
  std::string family = "fp-overlap";
  double noise = 0.02;
  std::vector<std::string> sweeps;
  std::string out;
  unsigned jobs = 1;
  bool quiet = false;
  SettingFlags flags;
};

int run_harness(HarnessArgs& args) {
  const PipelineConfig config = build_config(args.config, args.flags);
  if (args.scenes == 0) throw ConfigError("--scenes must be at least 1");
  if (!(args.noise >= 0.0)) throw ConfigError("--noise must be >= 0");

  HarnessRun run;
  run.family = parse_scene_family(args.family);
  run.seed = args.seed;
  run.scenes = args.scenes;
  run.noise_sigma = args.noise;
  std::vector<SweepAxis> axes;
  for (const auto& s : args.sweeps) axes.push_back(parse_sweep_axis(s));

  const auto scenes = make_scenes(run.family, run.seed, run.scenes, run.noise_sigma);
  run.base = compare_methods(scenes, config.s3, config.roi, args.jobs);
  if (!axes.empty()) run.sweep = sweep(axes, scenes, config.s3, config.roi, args.jobs);

  if (!args.quiet) {
    std::vector<SweepRow> table{{config.s3, config.roi, run.base}};
    std::cout << "family " << args.family << ", " << run.scenes << " scenes, seed " << run.seed
              << ", noise " << run.noise_sigma << "\n";
    std::cout << format_sweep_table(table);
    if (!run.sweep.empty()) std::cout << "\nsweep\n" << format_sweep_table(run.sweep);
  }
  if (!args.out.empty()) commit_outputs({{args.out, harness_to_json(run)}});
  return kOk;
}

// ---- smap / emb -----------------------------------------------------------

struct ConvertArgs {
  std::string input, output, provider, role = "ori";
};

int smap_info(const ConvertArgs& a) {
  const SaliencyMap map = read_smap_file(a.input);
  std::cout << "SMAP v" << kSmapVersion << " " << map.width() << "x" << map.height()
            << " min " << map.min() << " max " << map.max() << "\n";
  return kOk;
}

int smap_to_text_cmd(const ConvertArgs& a) {
  print_or_write(a.output, smap_to_text(read_smap_file(a.input)));
  return kOk;
}

int smap_from_text_cmd(const ConvertArgs& a) {
  commit_outputs({{a.output, bytes_to_string(encode_smap(smap_from_text(read_all(a.input))))}});
  return kOk;
}

int smap_to_ppm(const ConvertArgs& a) {
  const SaliencyMap map = normalize_map(read_smap_file(a.input));
  RasterImage image(map.width(), map.height());
  for (std::size_t y = 0; y < map.height(); ++y) {
    for (std::size_t x = 0; x < map.width(); ++x) {
      const auto v = static_cast<std::uint8_t>(std::lround(255.0 * map.at(x, y)));
      image.at(x, y) = {v, v, v};
    }
  }
  commit_outputs({{a.output, bytes_to_string(encode_ppm(image))}});
  return kOk;
}

int smap_export(const ConvertArgs& a) {
  if (a.role != "ori" && a.role != "back") throw ConfigError("--role must be ori or back");
  const SaliencyProvider provider = SaliencyProvider::parse(a.provider);
  const SaliencyMap map = provider.load(a.role == "ori" ? MapRole::Ori : MapRole::Back);
  commit_outputs({{a.output, bytes_to_string(encode_smap(map))}});
  return kOk;
}

int emb_info(const ConvertArgs& a) {
  const Embedding emb = read_embedding_file(a.input);
  std::cout << "EMB1 v" << kEmbVersion << " dim " << emb.dim() << " norm " << emb.norm() << "\n";
  return kOk;
}

int emb_to_text(const ConvertArgs& a) {
  const Embedding emb = read_embedding_file(a.input);
  std::ostringstream out;
  out.precision(9);
  for (std::size_t i = 0; i < emb.dim(); ++i) out << (i ? " " : "") << emb.values()[i];
  out << "\n";
  print_or_write(a.output, out.str());
  return kOk;
}

int emb_from_text(const ConvertArgs& a) {
  std::istringstream in(read_all(a.input));
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw FormatError("bad number '" + token + "'");
    }
  }
  commit_outputs({{a.output, bytes_to_string(encode_embedding(Embedding(std::move(values))))}});
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saliency-driven ROI extraction and modality prompting toolkit"};
  app.set_version_flag("--version", std::string(roiprep::version()));
  app.require_subcommand(1);
  std::function<int()> action;

  RoiArgs roi;
  auto* roi_cmd = app.add_subcommand("roi", "saliency files -> boxes + overlay");
  roi_cmd->add_option("--config", roi.config, "key=value config file (default $ROIMAM_CONFIG)");
  roi_cmd->add_option("--ori", roi.ori, "original-question saliency (SMAP path or provider)");
  roi_cmd->add_option("--back", roi.back, "background-text saliency (SMAP path or provider)");
  roi_cmd->add_option("--image", roi.image, "input image (binary PPM)");
  roi_cmd->add_option("--out-json", roi.out_json, "report path (stdout if omitted)");
  roi_cmd->add_option("--out-image", roi.out_image, "overlay PPM path");
  add_s3_flags(roi_cmd, roi.flags);
  add_roi_flags(roi_cmd, roi.flags);
  add_render_flags(roi_cmd, roi.flags);
  roi_cmd->callback([&] { action = [&] { return run_roi(roi); }; });

  TpeArgs tpe;
  auto* tpe_cmd = app.add_subcommand("tpe", "image embedding + catalog -> modality");
  tpe_cmd->add_option("--image-emb", tpe.image_emb, "image embedding (EMB1)")->required();
  tpe_cmd->add_option("--catalog", tpe.catalog, "manifest of label<TAB>emb-path lines")->required();
  tpe_cmd->add_option("--question", tpe.question, "also print the enhanced prompt");
  tpe_cmd->add_flag("--json", tpe.json, "emit JSON");
  tpe_cmd->callback([&] { action = [&] { return run_tpe(tpe); }; });

  TextprepArgs text;
  auto* text_cmd = app.add_subcommand("textprep", "question -> keywords + background text");
  text_cmd->add_option("--question", text.question, "question text")->required();
  text_cmd->add_option("--lexicon", text.lexicon, "term<TAB>weight lexicon file");
  text_cmd->add_option("--keywords", text.keywords, "comma-separated keywords (bypasses lexicon)");
  text_cmd->add_option("--top-k", text.top_k, "keywords kept from the lexicon")
      ->check(CLI::PositiveNumber);
  text_cmd->callback([&] { action = [&] { return run_textprep(text); }; });

  PipelineArgs pipe;
  auto* pipe_cmd = app.add_subcommand("pipeline", "full run: text, saliency, boxes, modality, prompt");
  pipe_cmd->add_option("--config", pipe.config, "key=value config file (default $ROIMAM_CONFIG)");
  for (const char* key : {"question", "image", "ori", "back", "catalog", "image-emb", "lexicon",
                          "keywords", "top-k", "out-json", "out-image"}) {
    pipe.flags.add(pipe_cmd, key, std::string("config key '") + key + "'");
  }
  add_s3_flags(pipe_cmd, pipe.flags);
  add_roi_flags(pipe_cmd, pipe.flags);
  add_render_flags(pipe_cmd, pipe.flags);
  pipe_cmd->callback([&] { action = [&] { return run_pipeline_cmd(pipe); }; });

  HarnessArgs harness;
  auto* harness_cmd = app.add_subcommand("harness", "synthetic evaluation: suppression vs naive");
  harness_cmd->add_option("--config", harness.config, "key=value config file");
  harness_cmd->add_option("--scenes", harness.scenes, "number of scenes")->capture_default_str();
  harness_cmd->add_option("--seed", harness.seed, "master seed")->capture_default_str();
  harness_cmd->add_option("--family", harness.family, "fp-overlap | fp-separate | no-fp")
      ->capture_default_str();
  harness_cmd->add_option("--noise", harness.noise, "Gaussian noise sigma")->capture_default_str();
  harness_cmd->add_option("--sweep", harness.sweeps, "key=start:stop:step (repeatable)");
  harness_cmd->add_option("--out", harness.out, "JSON report path");
  harness_cmd->add_option("--jobs", harness.jobs, "worker threads")->capture_default_str();
  harness_cmd->add_flag("--quiet", harness.quiet, "suppress the table");
  add_s3_flags(harness_cmd, harness.flags);
  add_roi_flags(harness_cmd, harness.flags);
  harness_cmd->callback([&] { action = [&] { return run_harness(harness); }; });

  ConvertArgs conv;
  auto* smap_cmd = app.add_subcommand("smap", "inspect and convert SMAP saliency files");
  smap_cmd->require_subcommand(1);
  auto* smap_info_cmd = smap_cmd->add_subcommand("info", "print shape and range");
  smap_info_cmd->add_option("input", conv.input)->required();
  smap_info_cmd->callback([&] { action = [&] { return smap_info(conv); }; });
  auto* smap_text_cmd = smap_cmd->add_subcommand("to-text", "SMAP -> whitespace grid");
  smap_text_cmd->add_option("input", conv.input)->required();
  smap_text_cmd->add_option("--out", conv.output, "output path (stdout if omitted)");
  smap_text_cmd->callback([&] { action = [&] { return smap_to_text_cmd(conv); }; });
  auto* smap_from_cmd = smap_cmd->add_subcommand("from-text", "whitespace grid -> SMAP");
  smap_from_cmd->add_option("input", conv.input)->required();
  smap_from_cmd->add_option("--out", conv.output)->required();
  smap_from_cmd->callback([&] { action = [&] { return smap_from_text_cmd(conv); }; });
  auto* smap_ppm_cmd = smap_cmd->add_subcommand("to-ppm", "SMAP -> normalized grayscale PPM");
  smap_ppm_cmd->add_option("input", conv.input)->required();
  smap_ppm_cmd->add_option("--out", conv.output)->required();
  smap_ppm_cmd->callback([&] { action = [&] { return smap_to_ppm(conv); }; });
  auto* smap_export_cmd = smap_cmd->add_subcommand("export", "write a provider's map as SMAP");
  smap_export_cmd->add_option("--provider", conv.provider, "e.g. synthetic:acceptance")->required();
  smap_export_cmd->add_option("--role", conv.role, "ori | back")->capture_default_str();
  smap_export_cmd->add_option("--out", conv.output)->required();
  smap_export_cmd->callback([&] { action = [&] { return smap_export(conv); }; });

  auto* emb_cmd = app.add_subcommand("emb", "inspect and convert EMB1 embedding files");
  emb_cmd->require_subcommand(1);
  auto* emb_info_cmd = emb_cmd->add_subcommand("info", "print dim and norm");
  emb_info_cmd->add_option("input", conv.input)->required();
  emb_info_cmd->callback([&] { action = [&] { return emb_info(conv); }; });
  auto* emb_text_cmd = emb_cmd->add_subcommand("to-text", "EMB1 -> whitespace list");
  emb_text_cmd->add_option("input", conv.input)->required();
  emb_text_cmd->add_option("--out", conv.output);
  emb_text_cmd->callback([&] { action = [&] { return emb_to_text(conv); }; });
  auto* emb_from_cmd = emb_cmd->add_subcommand("from-text", "whitespace list -> EMB1");
  emb_from_cmd->add_option("input", conv.input)->required();
  emb_from_cmd->add_option("--out", conv.output)->required();
  emb_from_cmd->callback([&] { action = [&] { return emb_from_text(conv); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return action ? action() : kUsage;
  } catch (const roiprep::FormatError& e) {
    std::cerr << "error (data): " << e.what() << "\n";
    return kData;
  } catch (const roiprep::ConfigError& e) {
    std::cerr << "error (usage): " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    std::cerr << "error (stage): " << e.what() << "\n";
    return kStage;
  }
}
