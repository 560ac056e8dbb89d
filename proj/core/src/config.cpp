#include "roiprep/config.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "binary_io.hpp"
#include "roiprep/error.hpp"
#include "roiprep/text.hpp"

#ifndef ROIPREP_VERSION
#define ROIPREP_VERSION "0.0.0"
#endif

namespace roiprep {

const char* version() { return ROIPREP_VERSION; }

namespace {

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

double to_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double v = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a number, got '" + value + "'");
  }
}

std::uint64_t to_unsigned(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    if (value.empty() || value.front() == '-') throw std::invalid_argument(value);
    const auto v = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
  }
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = to_lower_ascii(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError(key + ": expected true/false, got '" + value + "'");
}

std::string canonical_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

}  // namespace

SaliencyProvider SaliencyProvider::file(std::string path) {
  SaliencyProvider p;
  p.kind_ = Kind::File;
  p.path_ = std::move(path);
  return p;
}

SaliencyProvider SaliencyProvider::synthetic(std::optional<SceneFamily> family,
                                             std::uint64_t seed, std::size_t index) {
  SaliencyProvider p;
  p.kind_ = Kind::Synthetic;
  p.family_ = family;
  p.seed_ = seed;
  p.index_ = index;
  return p;
}

SaliencyProvider SaliencyProvider::parse(const std::string& spec) {
  constexpr std::string_view kFile = "file:";
  constexpr std::string_view kSynthetic = "synthetic:";
  if (spec.empty()) throw ConfigError("empty saliency provider");
  if (spec.starts_with(kFile)) return file(spec.substr(kFile.size()));
  if (!spec.starts_with(kSynthetic)) return file(spec);

  std::vector<std::string> parts;
  std::istringstream in(spec.substr(kSynthetic.size()));
  std::string part;
  while (std::getline(in, part, ':')) parts.push_back(part);
  if (parts.empty() || parts.size() > 3) throw ConfigError("bad synthetic provider '" + spec + "'");
  if (parts[0] == "acceptance") {
    if (parts.size() != 1) throw ConfigError("synthetic:acceptance takes no arguments");
    return synthetic(std::nullopt, 0, 0);
  }
  const SceneFamily family = parse_scene_family(parts[0]);
  const std::uint64_t seed = parts.size() > 1 ? to_unsigned("seed", parts[1]) : 0;
  const std::size_t index = parts.size() > 2 ? to_unsigned("index", parts[2]) : 0;
  return synthetic(family, seed, index);
}

SyntheticScene SaliencyProvider::scene() const {
  if (kind_ != Kind::Synthetic) throw ConfigError("file provider has no synthetic scene");
  return family_ ? make_scene(*family_, seed_, index_, 0.0) : fixed_point_acceptance_scene();
}

SaliencyMap SaliencyProvider::load(MapRole role) const {
  if (kind_ == Kind::File) return read_smap_file(path_);
  SceneMaps maps = gen_scene_maps(scene());
  return role == MapRole::Ori ? std::move(maps.ori) : std::move(maps.back);
}

std::string SaliencyProvider::describe() const {
  if (kind_ == Kind::File) return "file:" + path_;
  if (!family_) return "synthetic:acceptance";
  return "synthetic:" + scene_family_name(*family_) + ":" + std::to_string(seed_) + ":" +
         std::to_string(index_);
}

NormalizeMode parse_normalize_mode(const std::string& name) {
  if (name == "joint") return NormalizeMode::Joint;
  if (name == "separate") return NormalizeMode::Separate;
  if (name == "none") return NormalizeMode::None;
  throw ConfigError("normalize must be joint, separate or none, got '" + name + "'");
}

std::string normalize_mode_name(NormalizeMode mode) {
  switch (mode) {
    case NormalizeMode::Joint: return "joint";
    case NormalizeMode::Separate: return "separate";
    case NormalizeMode::None: return "none";
  }
  return "unknown";
}

void PipelineConfig::validate() const {
  s3.validate();
  roi.validate();
  if (top_k < 1) throw ConfigError("top-k must be at least 1");
}

Settings parse_settings(std::string_view text) {
  Settings settings;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key=value");
    }
    settings[canonical_key(trim(stripped.substr(0, eq)))] = trim(stripped.substr(eq + 1));
  }
  return settings;
}

Settings load_settings_file(const std::string& path) {
  try {
    return parse_settings(detail::read_text_file(path));
  } catch (const FormatError&) {
    throw ConfigError("cannot read config file '" + path + "'");
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void apply_setting(PipelineConfig& config, const std::string& raw_key, const std::string& value) {
  const std::string key = canonical_key(raw_key);
  if (key == "delta") {
    config.s3.delta = to_double(key, value);
  } else if (key == "epsilon") {
    config.s3.epsilon = to_double(key, value);
  } else if (key == "clamp") {
    config.s3.clamp_nonnegative = to_bool(key, value);
  } else if (key == "normalize") {
    config.normalize = parse_normalize_mode(value);
  } else if (key == "renormalize") {
    config.renormalize = to_bool(key, value);
  } else if (key == "threshold-mode") {
    if (value == "quantile") {
      if (!std::holds_alternative<QuantileThreshold>(config.roi.threshold)) {
        config.roi.threshold = QuantileThreshold{};
      }
    } else if (value == "fixed") {
      if (!std::holds_alternative<FixedThreshold>(config.roi.threshold)) {
        config.roi.threshold = FixedThreshold{};
      }
    } else {
      throw ConfigError("threshold-mode must be quantile or fixed, got '" + value + "'");
    }
  } else if (key == "q") {
    config.roi.threshold = QuantileThreshold{to_double(key, value)};
  } else if (key == "tau") {
    config.roi.threshold = FixedThreshold{to_double(key, value)};
  } else if (key == "connectivity") {
    const auto c = to_unsigned(key, value);
    if (c != 4 && c != 8) throw ConfigError("connectivity must be 4 or 8");
    config.roi.connectivity = c == 4 ? Connectivity::Four : Connectivity::Eight;
  } else if (key == "min-area") {
    config.roi.min_area = to_unsigned(key, value);
  } else if (key == "min-area-fraction") {
    config.roi.min_area_fraction = to_double(key, value);
  } else if (key == "max-boxes") {
    config.roi.max_boxes = to_unsigned(key, value);
  } else if (key == "box-thickness") {
    config.roi.box_thickness = to_unsigned(key, value);
  } else if (key == "box-color") {
    std::istringstream in(value);
    std::string part;
    std::vector<std::uint64_t> channels;
    while (std::getline(in, part, ',')) channels.push_back(to_unsigned(key, trim(part)));
    if (channels.size() != 3 || std::any_of(channels.begin(), channels.end(),
                                            [](std::uint64_t c) { return c > 255; })) {
      throw ConfigError("box-color must be R,G,B with channels in 0..255");
    }
    config.roi.box_color = {static_cast<std::uint8_t>(channels[0]),
                            static_cast<std::uint8_t>(channels[1]),
                            static_cast<std::uint8_t>(channels[2])};
  } else if (key == "catalog") {
    config.catalog_manifest = value;
  } else if (key == "image-emb") {
    config.image_embedding = value;
  } else if (key == "lexicon") {
    config.lexicon = value;
  } else if (key == "keywords") {
    config.keywords = value;
  } else if (key == "top-k") {
    config.top_k = to_unsigned(key, value);
  } else if (key == "ori") {
    config.provider_ori = SaliencyProvider::parse(value);
  } else if (key == "back") {
    config.provider_back = SaliencyProvider::parse(value);
  } else if (key == "image") {
    config.image = value;
  } else if (key == "question") {
    config.question = value;
  } else if (key == "out-json") {
    config.out_json = value;
  } else if (key == "out-image") {
    config.out_image = value;
  } else {
    throw ConfigError("unknown config key '" + raw_key + "'");
  }
}

void apply_settings(PipelineConfig& config, const Settings& settings) {
  for (const auto& [key, value] : settings) apply_setting(config, key, value);
}

}  // namespace roiprep
