#include <json.hpp>

#include "roiprep/pipeline.hpp"

namespace roiprep {

namespace {

using nlohmann::json;

json s3_json(const S3Params& s3) {
  return {{"delta", s3.delta}, {"epsilon", s3.epsilon}, {"clamp", s3.clamp_nonnegative}};
}

double mode_param(const RoiConfig& roi) {
  if (const auto* q = std::get_if<QuantileThreshold>(&roi.threshold)) return q->q;
  return std::get<FixedThreshold>(roi.threshold).tau;
}

json roi_settings_json(const RoiConfig& roi) {
  json out = {{"mode", roi.mode_name()},
              {"mode_param", mode_param(roi)},
              {"connectivity", static_cast<int>(roi.connectivity)},
              {"max_boxes", roi.max_boxes}};
  if (roi.min_area) {
    out["min_area"] = *roi.min_area;
  } else {
    out["min_area_fraction"] = roi.min_area_fraction;
  }
  return out;
}

json stats_json(const MethodStats& s) {
  return {{"scenes", s.scenes},
          {"mean_iou", s.mean_iou},
          {"median_iou", s.median_iou},
          {"success_rate", s.success_at_05},
          {"success_at_0_3", s.success_at_03},
          {"success_at_0_5", s.success_at_05},
          {"success_at_0_7", s.success_at_07}};
}

}  // namespace

std::string report_to_json(const RoiReport& report) {
  json out;
  out["version"] = version();
  if (report.question) out["question"] = *report.question;
  if (report.keywords) out["keywords"] = *report.keywords;
  if (report.background_text) out["background_text"] = *report.background_text;
  if (report.modality) {
    json scores = json::array();
    for (const auto& [label, score] : report.modality->all_scores) {
      scores.push_back({{"label", label}, {"score", score}});
    }
    out["modality"] = {{"label", report.modality->label},
                       {"score", report.modality->score},
                       {"scores", std::move(scores)}};
  }
  if (report.prompt) out["prompt"] = *report.prompt;

  json boxes = json::array();
  for (const auto& b : report.boxes) {
    boxes.push_back({{"x", b.box.x}, {"y", b.box.y}, {"w", b.box.w}, {"h", b.box.h},
                     {"area", b.area}});
  }
  out["boxes"] = std::move(boxes);
  out["s3"] = s3_json(report.s3);

  json roi = {{"mode", report.roi.mode_name()},
              {"mode_param", mode_param(report.roi)},
              {"threshold_realized", report.threshold_realized},
              {"connectivity", static_cast<int>(report.roi.connectivity)},
              {"min_area", report.min_area},
              {"max_boxes", report.roi.max_boxes},
              {"normalize", normalize_mode_name(report.normalize)},
              {"renormalize", report.renormalize}};
  out["roi"] = std::move(roi);

  json provenance = {{"provider_ori", report.provider_ori},
                     {"provider_back", report.provider_back},
                     {"seed", nullptr}};
  if (report.seed) provenance["seed"] = *report.seed;
  if (!report.keyword_extractor.empty()) provenance["keyword_extractor"] = report.keyword_extractor;
  out["provenance"] = std::move(provenance);
  return out.dump(2) + "\n";
}

std::string harness_to_json(const HarnessRun& run) {
  json out;
  out["version"] = version();
  out["family"] = scene_family_name(run.family);
  out["seed"] = run.seed;
  out["scenes"] = run.scenes;
  out["noise_sigma"] = run.noise_sigma;
  out["s3"] = s3_json(run.base.s3_params);
  out["roi"] = roi_settings_json(run.base.roi);
  out["results"] = {{"s3", stats_json(run.base.s3)}, {"naive", stats_json(run.base.naive)}};

  json rows = json::array();
  for (std::size_t i = 0; i < run.sweep.size(); ++i) {
    const SweepRow& row = run.sweep[i];
    rows.push_back({{"index", i},
                    {"s3_params", s3_json(row.s3_params)},
                    {"roi", roi_settings_json(row.roi)},
                    {"s3", stats_json(row.report.s3)},
                    {"naive", stats_json(row.report.naive)}});
  }
  out["sweep"] = std::move(rows);
  return out.dump(2) + "\n";
}

}  // namespace roiprep
