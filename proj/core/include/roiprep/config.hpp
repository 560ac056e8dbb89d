#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "roiprep/roi.hpp"
#include "roiprep/saliency.hpp"
#include "roiprep/synth.hpp"

namespace roiprep {

const char* version();

enum class MapRole { Ori, Back };

/// Where a saliency map comes from.
///   file:PATH (or a bare PATH)          an SMAP file
///   synthetic:FAMILY[:SEED[:INDEX]]     scene INDEX of a harness family
///   synthetic:acceptance                the fixed-point acceptance scene
class SaliencyProvider {
 public:
  enum class Kind { File, Synthetic };

  static SaliencyProvider file(std::string path);
  static SaliencyProvider synthetic(std::optional<SceneFamily> family, std::uint64_t seed,
                                    std::size_t index);
  static SaliencyProvider parse(const std::string& spec);

  Kind kind() const noexcept { return kind_; }
  const std::string& path() const noexcept { return path_; }
  std::uint64_t seed() const noexcept { return seed_; }

  /// The scene backing a synthetic provider.
  SyntheticScene scene() const;

  SaliencyMap load(MapRole role) const;
  std::string describe() const;

 private:
  Kind kind_ = Kind::File;
  std::string path_;
  std::optional<SceneFamily> family_;  // nullopt = acceptance scene
  std::uint64_t seed_ = 0;
  std::size_t index_ = 0;
};

/// How SA_ori and SA_back are brought to [0, 1] before combination.
enum class NormalizeMode { Joint, Separate, None };

NormalizeMode parse_normalize_mode(const std::string& name);
std::string normalize_mode_name(NormalizeMode mode);

struct PipelineConfig {
  S3Params s3;
  RoiConfig roi;
  NormalizeMode normalize = NormalizeMode::Joint;
  bool renormalize = false;  // min-max the combined map before thresholding

  std::string catalog_manifest;
  std::string image_embedding;
  std::string lexicon;                  // path; empty = none
  std::optional<std::string> keywords;  // comma-separated, overrides lexicon
  std::size_t top_k = 3;

  std::optional<SaliencyProvider> provider_ori;
  std::optional<SaliencyProvider> provider_back;

  std::string image;
  std::string question;
  std::string out_json;
  std::string out_image;

  void validate() const;
};

/// Ordered key=value settings. Keys use '-' (an '_' is accepted and mapped).
using Settings = std::map<std::string, std::string>;

/// Parses UTF-8 "key=value" lines; '#' lines and blank lines are skipped.
Settings parse_settings(std::string_view text);
Settings load_settings_file(const std::string& path);

/// Applies one setting; throws ConfigError on unknown keys or bad values.
void apply_setting(PipelineConfig& config, const std::string& key, const std::string& value);
void apply_settings(PipelineConfig& config, const Settings& settings);

}  // namespace roiprep
