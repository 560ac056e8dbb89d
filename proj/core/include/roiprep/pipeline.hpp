#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "roiprep/config.hpp"
#include "roiprep/image.hpp"
#include "roiprep/roi.hpp"
#include "roiprep/text.hpp"
#include "roiprep/tpe.hpp"

namespace roiprep {

struct ReportBox {
  BoundingBox box;
  std::size_t area = 0;  // region pixel count
};

/// Everything a run decided, in a form that serializes deterministically.
struct RoiReport {
  std::optional<std::string> question;
  std::optional<std::vector<std::string>> keywords;
  std::optional<std::string> background_text;
  std::optional<ModalitySelection> modality;
  std::optional<std::string> prompt;

  std::vector<ReportBox> boxes;
  S3Params s3;
  RoiConfig roi;
  double threshold_realized = 0.0;
  std::size_t min_area = 0;
  NormalizeMode normalize = NormalizeMode::Joint;
  bool renormalize = false;

  std::string provider_ori;
  std::string provider_back;
  std::optional<std::uint64_t> seed;
  std::string keyword_extractor;
};

struct RoiStageResult {
  SaliencyMap combined;  // at image resolution
  RoiExtraction extraction;
};

/// normalize -> s3_combine -> (renormalize) -> resize to image -> extract_rois.
RoiStageResult compute_rois(const SaliencyMap& ori, const SaliencyMap& back, std::size_t width,
                            std::size_t height, const PipelineConfig& config);

struct PipelineResult {
  RoiReport report;
  RasterImage overlay;
};

/// Full run: keywords, background text, both saliency maps, suppression,
/// boxes, overlay, modality and enhanced prompt. Failures are rethrown as
/// StageError (or FormatError for malformed inputs) naming the stage.
PipelineResult run_pipeline(const RasterImage& image, const QuestionText& question,
                            const PipelineConfig& config);

/// Runs only the ROI half (no text or modality) and returns a report for it.
PipelineResult run_roi_only(const RasterImage& image, const SaliencyMap& ori,
                            const SaliencyMap& back, const PipelineConfig& config);

std::string report_to_json(const RoiReport& report);

struct HarnessRun {
  SceneFamily family = SceneFamily::FpOverlap;
  std::uint64_t seed = 0;
  std::size_t scenes = 0;
  double noise_sigma = 0.0;
  HarnessReport base;
  std::vector<SweepRow> sweep;
};

std::string harness_to_json(const HarnessRun& run);

}  // namespace roiprep
