#include "roiprep/pipeline.hpp"

#include <memory>

#include "roiprep/error.hpp"

namespace roiprep {

namespace {

// Runs one stage, tagging failures with its name.
template <typename F>
auto stage(const char* name, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const FormatError& e) {
    throw FormatError(std::string(name) + ": " + e.what());
  } catch (const ConfigError&) {
    throw;
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::unique_ptr<KeywordExtractor> make_extractor(const PipelineConfig& config) {
  if (config.keywords) {
    return std::make_unique<FixedKeywordExtractor>(FixedKeywordExtractor::from_csv(*config.keywords));
  }
  if (!config.lexicon.empty()) {
    return std::make_unique<LexiconKeywordExtractor>(Lexicon::load(config.lexicon), config.top_k);
  }
  return std::make_unique<FixedKeywordExtractor>(std::vector<std::string>{});
}

void fill_roi_fields(RoiReport& report, const RoiStageResult& rois, const PipelineConfig& config) {
  report.s3 = config.s3;
  report.roi = config.roi;
  report.normalize = config.normalize;
  report.renormalize = config.renormalize;
  report.threshold_realized = rois.extraction.threshold;
  report.min_area = rois.extraction.min_area;
  for (const auto& r : rois.extraction.selected) report.boxes.push_back({r.bbox, r.pixel_count});
}

}  // namespace

RoiStageResult compute_rois(const SaliencyMap& ori, const SaliencyMap& back, std::size_t width,
                            std::size_t height, const PipelineConfig& config) {
  if (!ori.same_shape(back)) {
    throw StageError("normalize", "saliency map dimensions differ: " + std::to_string(ori.width()) +
                                      "x" + std::to_string(ori.height()) + " vs " +
                                      std::to_string(back.width()) + "x" +
                                      std::to_string(back.height()));
  }
  auto [n_ori, n_back] = stage("normalize", [&] {
    switch (config.normalize) {
      case NormalizeMode::Joint: return normalize_joint(ori, back);
      case NormalizeMode::Separate: return std::make_pair(normalize_map(ori), normalize_map(back));
      case NormalizeMode::None: break;
    }
    return std::make_pair(ori, back);
  });
  SaliencyMap combined = stage("s3", [&] {
    SaliencyMap sa = s3_combine(n_ori, n_back, config.s3);
    return config.renormalize ? normalize_map(sa) : sa;
  });
  combined = stage("resize", [&] { return resize_nearest(combined, width, height); });
  RoiExtraction extraction = stage("extract", [&] { return extract_rois(combined, config.roi); });
  return {std::move(combined), std::move(extraction)};
}

PipelineResult run_pipeline(const RasterImage& image, const QuestionText& question,
                            const PipelineConfig& config) {
  config.validate();
  if (question.raw.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ConfigError("question must not be empty");
  }
  if (!config.provider_ori || !config.provider_back) {
    throw ConfigError("both saliency providers (ori, back) are required");
  }
  if (config.catalog_manifest.empty() || config.image_embedding.empty()) {
    throw ConfigError("catalog manifest and image embedding are required");
  }

  RoiReport report;
  report.question = question.raw;

  const auto extractor = stage("keywords", [&] { return make_extractor(config); });
  const KeywordSet keywords = stage("keywords", [&] { return extractor->extract(question); });
  report.keywords = keywords.keywords;
  report.keyword_extractor = extractor->describe();
  report.background_text =
      stage("background-text", [&] { return derive_background_text(question, keywords).raw; });

  const SaliencyMap sa_ori =
      stage("saliency-ori", [&] { return config.provider_ori->load(MapRole::Ori); });
  const SaliencyMap sa_back =
      stage("saliency-back", [&] { return config.provider_back->load(MapRole::Back); });
  report.provider_ori = config.provider_ori->describe();
  report.provider_back = config.provider_back->describe();
  if (config.provider_ori->kind() == SaliencyProvider::Kind::Synthetic) {
    report.seed = config.provider_ori->seed();
  }

  const RoiStageResult rois = compute_rois(sa_ori, sa_back, image.width(), image.height(), config);
  fill_roi_fields(report, rois, config);
  const auto boxes = rois.extraction.boxes();
  RasterImage overlay = stage("overlay", [&] { return render_overlay(image, boxes, config.roi); });

  report.modality = stage("modality", [&] {
    const ModalityCatalog catalog = ModalityCatalog::load_manifest(config.catalog_manifest);
    const Embedding image_emb = read_embedding_file(config.image_embedding);
    return select_modality(image_emb, catalog);
  });
  report.prompt = stage("prompt", [&] { return build_enhanced_prompt(*report.modality, question, boxes); });

  return {std::move(report), std::move(overlay)};
}

PipelineResult run_roi_only(const RasterImage& image, const SaliencyMap& ori,
                            const SaliencyMap& back, const PipelineConfig& config) {
  config.validate();
  RoiReport report;
  if (config.provider_ori) report.provider_ori = config.provider_ori->describe();
  if (config.provider_back) report.provider_back = config.provider_back->describe();
  const RoiStageResult rois = compute_rois(ori, back, image.width(), image.height(), config);
  fill_roi_fields(report, rois, config);
  RasterImage overlay =
      stage("overlay", [&] { return render_overlay(image, rois.extraction.boxes(), config.roi); });
  return {std::move(report), std::move(overlay)};
}

}  // namespace roiprep
