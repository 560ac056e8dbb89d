#include "roiprep/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <future>
#include <sstream>

#include "roiprep/error.hpp"
#include "roiprep/random.hpp"

namespace roiprep {

namespace {

bool in_unit(double v) { return v >= 0.0 && v <= 1.0; }

bool overlaps_with_margin(const BoundingBox& a, const BoundingBox& b, std::size_t margin) {
  return a.x < b.x + b.w + margin && b.x < a.x + a.w + margin && a.y < b.y + b.h + margin &&
         b.y < a.y + a.h + margin;
}

// Rejection-samples a w x h box that keeps a one-pixel gap from `avoid`.
BoundingBox place_box(SplitMix64& rng, std::size_t w, std::size_t h, std::size_t width,
                      std::size_t height, const std::vector<BoundingBox>& avoid) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    const BoundingBox box{rng.between(0, width - w), rng.between(0, height - h), w, h};
    const bool clear = std::none_of(avoid.begin(), avoid.end(), [&](const BoundingBox& other) {
      return overlaps_with_margin(box, other, 1);
    });
    if (clear) return box;
  }
  throw Error("could not place a synthetic box without overlap");
}

double rate_at(const std::vector<double>& ious, double threshold) {
  const auto hits = std::count_if(ious.begin(), ious.end(),
                                  [&](double v) { return v >= threshold; });
  return static_cast<double>(hits) / static_cast<double>(ious.size());
}

double scene_iou(const SyntheticScene& scene, const CombineMethod& method, const RoiConfig& roi) {
  const SceneMaps maps = gen_scene_maps(scene);
  const RoiExtraction rois = extract_rois(apply_method(method, maps.ori, maps.back), roi);
  return rois.selected.empty() ? 0.0 : compute_iou(rois.selected.front().bbox, scene.gt_box);
}

double grid_value(double start, double step, std::size_t k) {
  return std::round((start + static_cast<double>(k) * step) * 1e9) / 1e9;
}

}  // namespace

void SyntheticScene::validate() const {
  if (width == 0 || height == 0) throw ConfigError("scene must be non-empty");
  if (!gt_box.fits(width, height)) throw ConfigError("gt_box outside the scene");
  if (!fixed_point_box.fits(width, height)) throw ConfigError("fixed_point_box outside the scene");
  if (distractor_box && !distractor_box->fits(width, height)) {
    throw ConfigError("distractor_box outside the scene");
  }
  if (!in_unit(gt_in_ori) || !in_unit(fp_in_ori) || !in_unit(fp_in_back) ||
      !in_unit(distractor_intensity)) {
    throw ConfigError("scene intensities must lie in [0, 1]");
  }
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw ConfigError("noise_sigma must be finite and >= 0");
  }
}

SceneFamily parse_scene_family(const std::string& name) {
  if (name == "fp-overlap") return SceneFamily::FpOverlap;
  if (name == "fp-separate") return SceneFamily::FpSeparate;
  if (name == "no-fp") return SceneFamily::NoFp;
  throw ConfigError("unknown scene family '" + name + "' (fp-overlap|fp-separate|no-fp)");
}

std::string scene_family_name(SceneFamily family) {
  switch (family) {
    case SceneFamily::FpOverlap: return "fp-overlap";
    case SceneFamily::FpSeparate: return "fp-separate";
    case SceneFamily::NoFp: return "no-fp";
  }
  return "unknown";
}

SyntheticScene make_scene(SceneFamily family, std::uint64_t seed, std::size_t index,
                          double noise_sigma) {
  SyntheticScene scene;
  scene.seed = derive_seed(seed, index);
  scene.noise_sigma = noise_sigma;
  SplitMix64 rng(scene.seed ^ 0x5ce4e5b9ull);

  const std::size_t gt_side_w = rng.between(18, 24);
  const std::size_t gt_side_h = rng.between(18, 24);
  scene.gt_box = place_box(rng, gt_side_w, gt_side_h, scene.width, scene.height, {});
  std::vector<BoundingBox> taken{scene.gt_box};

  switch (family) {
    case SceneFamily::FpOverlap:
      scene.fixed_point_box = scene.gt_box;
      scene.gt_in_ori = rng.uniform(0.85, 0.95);
      scene.fp_in_ori = scene.gt_in_ori;
      scene.fp_in_back = rng.uniform(0.62, 0.75);
      scene.distractor_intensity = rng.uniform(0.28, 0.36);
      break;
    case SceneFamily::FpSeparate: {
      const std::size_t side = rng.between(10, 14);
      scene.fixed_point_box = place_box(rng, side, side, scene.width, scene.height, taken);
      taken.push_back(scene.fixed_point_box);
      scene.gt_in_ori = rng.uniform(0.5, 0.7);
      scene.fp_in_ori = rng.uniform(0.85, 0.95);
      scene.fp_in_back = rng.uniform(0.8, scene.fp_in_ori);
      scene.distractor_intensity = rng.uniform(0.2, 0.3);
      break;
    }
    case SceneFamily::NoFp:
      scene.fixed_point_box = scene.gt_box;
      scene.gt_in_ori = rng.uniform(0.6, 0.9);
      scene.distractor_intensity = rng.uniform(0.2, 0.4);
      break;
  }

  const std::size_t dw = rng.between(12, 16);
  const std::size_t dh = rng.between(12, 16);
  scene.distractor_box = place_box(rng, dw, dh, scene.width, scene.height, taken);
  return scene;
}

std::vector<SyntheticScene> make_scenes(SceneFamily family, std::uint64_t seed,
                                        std::size_t count, double noise_sigma) {
  std::vector<SyntheticScene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) scenes.push_back(make_scene(family, seed, i, noise_sigma));
  return scenes;
}

SyntheticScene fixed_point_acceptance_scene() {
  SyntheticScene scene;
  scene.width = 64;
  scene.height = 64;
  scene.gt_box = {8, 8, 20, 20};
  scene.fixed_point_box = scene.gt_box;
  scene.gt_in_ori = 0.9;
  scene.fp_in_ori = 0.9;
  scene.fp_in_back = 0.7;
  scene.distractor_box = BoundingBox{40, 40, 18, 18};
  scene.distractor_intensity = 0.3;
  scene.noise_sigma = 0.0;
  scene.seed = 0;
  return scene;
}

SceneMaps gen_scene_maps(const SyntheticScene& scene) {
  scene.validate();
  const std::size_t n = scene.width * scene.height;
  std::vector<double> ori(n, 0.0);
  std::vector<double> back(n, 0.0);
  SplitMix64 rng(scene.seed);
  for (std::size_t y = 0; y < scene.height; ++y) {
    for (std::size_t x = 0; x < scene.width; ++x) {
      const std::size_t i = y * scene.width + x;
      const double noise =
          scene.noise_sigma > 0.0 ? std::clamp(scene.noise_sigma * rng.gaussian(), 0.0, 1.0) : 0.0;
      double o = noise;
      double b = noise;
      if (scene.gt_box.contains(x, y)) o = std::max(o, scene.gt_in_ori);
      if (scene.fixed_point_box.contains(x, y)) {
        o = std::max(o, scene.fp_in_ori);
        b = std::max(b, scene.fp_in_back);
      }
      if (scene.distractor_box && scene.distractor_box->contains(x, y)) {
        o = std::max(o, scene.distractor_intensity);
      }
      ori[i] = o;
      back[i] = b;
    }
  }
  return {SaliencyMap(scene.width, scene.height, std::move(ori)),
          SaliencyMap(scene.width, scene.height, std::move(back))};
}

SaliencyMap apply_method(const CombineMethod& method, const SaliencyMap& ori,
                         const SaliencyMap& back) {
  if (const auto* s3 = std::get_if<S3Method>(&method)) return s3_combine(ori, back, s3->params);
  return subtract_naive(ori, back, std::get<NaiveMethod>(method).clamp_nonnegative);
}

MethodStats evaluate(const std::vector<SyntheticScene>& scenes, const CombineMethod& method,
                     const RoiConfig& roi, unsigned jobs) {
  if (scenes.empty()) throw ConfigError("evaluate needs at least one scene");
  roi.validate();
  if (const auto* s3 = std::get_if<S3Method>(&method)) s3->params.validate();

  MethodStats stats;
  stats.scenes = scenes.size();
  stats.ious.assign(scenes.size(), 0.0);

  // Workers fill disjoint slices; aggregation below follows scene order.
  jobs = std::clamp<unsigned>(jobs, 1, static_cast<unsigned>(scenes.size()));
  std::vector<std::future<void>> workers;
  for (unsigned j = 0; j < jobs; ++j) {
    workers.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, [&, j] {
      for (std::size_t i = j; i < scenes.size(); i += jobs) {
        stats.ious[i] = scene_iou(scenes[i], method, roi);
      }
    }));
  }
  for (auto& w : workers) w.get();

  double sum = 0.0;
  for (double v : stats.ious) sum += v;
  stats.mean_iou = sum / static_cast<double>(scenes.size());
  std::vector<double> sorted = stats.ious;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t mid = sorted.size() / 2;
  stats.median_iou = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
  stats.success_at_03 = rate_at(stats.ious, 0.3);
  stats.success_at_05 = rate_at(stats.ious, kSuccessIou);
  stats.success_at_07 = rate_at(stats.ious, 0.7);
  return stats;
}

HarnessReport compare_methods(const std::vector<SyntheticScene>& scenes, const S3Params& s3,
                              const RoiConfig& roi, unsigned jobs) {
  HarnessReport report;
  report.s3_params = s3;
  report.roi = roi;
  report.s3 = evaluate(scenes, S3Method{s3}, roi, jobs);
  report.naive = evaluate(scenes, NaiveMethod{s3.clamp_nonnegative}, roi, jobs);
  return report;
}

SweepAxis parse_sweep_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos) throw ConfigError("sweep '" + spec + "': expected key=values");
  SweepAxis axis;
  axis.key = spec.substr(0, eq);
  if (axis.key != "delta" && axis.key != "epsilon" && axis.key != "q" &&
      axis.key != "connectivity") {
    throw ConfigError("sweep key must be delta, epsilon, q or connectivity, got '" + axis.key + "'");
  }
  const std::string rhs = spec.substr(eq + 1);
  auto number = [&](const std::string& text) {
    try {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("sweep '" + spec + "': bad number '" + text + "'");
    }
  };

  if (std::count(rhs.begin(), rhs.end(), ':') == 2) {
    const auto c1 = rhs.find(':');
    const auto c2 = rhs.find(':', c1 + 1);
    const double start = number(rhs.substr(0, c1));
    const double stop = number(rhs.substr(c1 + 1, c2 - c1 - 1));
    const double step = number(rhs.substr(c2 + 1));
    if (!(step > 0.0) || stop < start) {
      throw ConfigError("sweep '" + spec + "': need step > 0 and stop >= start");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) axis.values.push_back(grid_value(start, step, k));
  } else {
    std::istringstream in(rhs);
    std::string item;
    while (std::getline(in, item, ',')) axis.values.push_back(number(item));
  }
  if (axis.values.empty()) throw ConfigError("sweep '" + spec + "' has no values");
  return axis;
}

std::vector<SweepRow> sweep(const std::vector<SweepAxis>& axes,
                            const std::vector<SyntheticScene>& scenes, const S3Params& base_s3,
                            const RoiConfig& base_roi, unsigned jobs) {
  std::vector<std::size_t> odometer(axes.size(), 0);
  for (const auto& axis : axes) {
    if (axis.values.empty()) throw ConfigError("sweep axis '" + axis.key + "' is empty");
  }
  std::vector<SweepRow> rows;
  while (true) {
    SweepRow row{base_s3, base_roi, {}};
    for (std::size_t a = 0; a < axes.size(); ++a) {
      const double v = axes[a].values[odometer[a]];
      const std::string& key = axes[a].key;
      if (key == "delta") {
        row.s3_params.delta = v;
      } else if (key == "epsilon") {
        row.s3_params.epsilon = v;
      } else if (key == "q") {
        row.roi.threshold = QuantileThreshold{v};
      } else if (key == "connectivity") {
        if (v != 4.0 && v != 8.0) throw ConfigError("connectivity sweep values must be 4 or 8");
        row.roi.connectivity = v == 4.0 ? Connectivity::Four : Connectivity::Eight;
      }
    }
    row.report = compare_methods(scenes, row.s3_params, row.roi, jobs);
    rows.push_back(std::move(row));

    // Advance the last axis fastest.
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++odometer[a] < axes[a].values.size()) break;
      odometer[a] = 0;
      if (a == 0) return rows;
    }
    if (axes.empty()) return rows;
  }
}

std::string format_sweep_table(const std::vector<SweepRow>& rows) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "%-7s %-7s %-9s %-4s | %-8s %-8s %-8s | %-8s %-8s %s\n",
                "delta", "epsilon", "threshold", "conn", "s3.mean", "s3.med", "s3.succ",
                "nv.mean", "nv.med", "nv.succ");
  out += line;
  for (const auto& row : rows) {
    std::string threshold = row.roi.mode_name() == "quantile" ? "q=" : "t=";
    char tbuf[32];
    std::snprintf(tbuf, sizeof tbuf, "%.3g",
                  std::holds_alternative<QuantileThreshold>(row.roi.threshold)
                      ? std::get<QuantileThreshold>(row.roi.threshold).q
                      : std::get<FixedThreshold>(row.roi.threshold).tau);
    threshold += tbuf;
    const auto& s = row.report.s3;
    const auto& n = row.report.naive;
    std::snprintf(line, sizeof line,
                  "%-7.3f %-7.3f %-9s %-4d | %-8.4f %-8.4f %-8.4f | %-8.4f %-8.4f %.4f\n",
                  row.s3_params.delta, row.s3_params.epsilon, threshold.c_str(),
                  static_cast<int>(row.roi.connectivity), s.mean_iou, s.median_iou,
                  s.success_at_05, n.mean_iou, n.median_iou, n.success_at_05);
    out += line;
  }
  return out;
}

}  // namespace roiprep
