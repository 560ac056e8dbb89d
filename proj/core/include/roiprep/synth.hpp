#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "roiprep/roi.hpp"
#include "roiprep/saliency.hpp"

namespace roiprep {

/// A saliency scene with a known ground-truth region and a planted fixed
/// point (a hotspot present in both the original and background maps).
struct SyntheticScene {
  std::size_t width = 64;
  std::size_t height = 64;
  BoundingBox gt_box;
  BoundingBox fixed_point_box;
  double gt_in_ori = 0.0;
  double fp_in_ori = 0.0;
  double fp_in_back = 0.0;
  std::optional<BoundingBox> distractor_box;
  double distractor_intensity = 0.0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

enum class SceneFamily { FpOverlap, FpSeparate, NoFp };

SceneFamily parse_scene_family(const std::string& name);
std::string scene_family_name(SceneFamily family);

/// Scene `index` of a family, drawn from a stream derived from `seed`.
SyntheticScene make_scene(SceneFamily family, std::uint64_t seed, std::size_t index,
                          double noise_sigma);

std::vector<SyntheticScene> make_scenes(SceneFamily family, std::uint64_t seed,
                                        std::size_t count, double noise_sigma);

/// Noiseless 64x64 scene where the ground truth sits on the fixed point:
/// GT 20x20 at (8,8) with ori 0.9 and back 0.7, distractor 18x18 at (40,40)
/// with ori 0.3. Naive subtraction ranks the distractor above the GT; the
/// suppression rule with delta=0.6, eps=2 ranks it below.
SyntheticScene fixed_point_acceptance_scene();

struct SceneMaps {
  SaliencyMap ori;
  SaliencyMap back;
};

/// Each cell takes the max of its clamped noise sample and every plateau
/// covering it. Both maps share the same noise field.
SceneMaps gen_scene_maps(const SyntheticScene& scene);

struct S3Method {
  S3Params params;
};
struct NaiveMethod {
  bool clamp_nonnegative = true;
};
using CombineMethod = std::variant<S3Method, NaiveMethod>;

SaliencyMap apply_method(const CombineMethod& method, const SaliencyMap& ori,
                         const SaliencyMap& back);

inline constexpr double kSuccessIou = 0.5;

struct MethodStats {
  std::size_t scenes = 0;
  double mean_iou = 0.0;
  double median_iou = 0.0;
  double success_at_03 = 0.0;
  double success_at_05 = 0.0;
  double success_at_07 = 0.0;
  std::vector<double> ious;  // per scene, scene order

  friend bool operator==(const MethodStats&, const MethodStats&) = default;
};

/// IoU of the top selected box against each scene's ground truth
/// (0 when no box survives), aggregated in scene order.
MethodStats evaluate(const std::vector<SyntheticScene>& scenes, const CombineMethod& method,
                     const RoiConfig& roi, unsigned jobs = 1);

struct HarnessReport {
  MethodStats s3;
  MethodStats naive;
  S3Params s3_params;
  RoiConfig roi;
};

HarnessReport compare_methods(const std::vector<SyntheticScene>& scenes, const S3Params& s3,
                              const RoiConfig& roi, unsigned jobs = 1);

struct SweepAxis {
  std::string key;  // delta | epsilon | q | connectivity
  std::vector<double> values;
};

/// Parses "key=start:stop:step", "key=v1,v2,..." or "key=v".
SweepAxis parse_sweep_axis(const std::string& spec);

struct SweepRow {
  S3Params s3_params;
  RoiConfig roi;
  HarnessReport report;
};

/// Full-factorial grid, first axis varying slowest.
std::vector<SweepRow> sweep(const std::vector<SweepAxis>& axes,
                            const std::vector<SyntheticScene>& scenes, const S3Params& base_s3,
                            const RoiConfig& base_roi, unsigned jobs = 1);

/// Aligned plain-text table, one line per row.
std::string format_sweep_table(const std::vector<SweepRow>& rows);

}  // namespace roiprep
