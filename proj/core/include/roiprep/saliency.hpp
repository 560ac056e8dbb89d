#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace roiprep {

/// Row-major 2-D grid of finite saliency scores.
///
/// Immutable after construction; the constructor rejects empty shapes,
/// length mismatches and non-finite cells.
class SaliencyMap {
 public:
  SaliencyMap(std::size_t width, std::size_t height, std::vector<double> values);

  static SaliencyMap filled(std::size_t width, std::size_t height, double value);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t size() const noexcept { return values_.size(); }

  double at(std::size_t x, std::size_t y) const { return values_[y * width_ + x]; }
  std::span<const double> values() const noexcept { return values_; }

  double min() const;
  double max() const;

  bool same_shape(const SaliencyMap& other) const noexcept {
    return width_ == other.width_ && height_ == other.height_;
  }

  friend bool operator==(const SaliencyMap&, const SaliencyMap&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<double> values_;
};

/// Parameters of semantic selective suppression.
struct S3Params {
  double delta = 0.6;    // threshold on background saliency
  double epsilon = 2.0;  // gain applied where background saliency exceeds delta
  bool clamp_nonnegative = true;

  // Throws ConfigError unless 0 <= delta <= 1 and epsilon > 0.
  void validate() const;
};

/// Affine min-max rescale to [0, 1]. A constant map becomes all zeros.
SaliencyMap normalize_map(const SaliencyMap& map);

/// Rescales both maps with one shared min/max so their difference keeps
/// its relative structure. Returns {ori, back}.
std::pair<SaliencyMap, SaliencyMap> normalize_joint(const SaliencyMap& ori,
                                                    const SaliencyMap& back);

/// Piecewise suppression: cells whose background score is at most delta get
/// ori - back, the rest get epsilon * (ori - back). Output is not renormalized.
SaliencyMap s3_combine(const SaliencyMap& sa_ori, const SaliencyMap& sa_back,
                       const S3Params& params);

/// Plain element-wise ori - back, the baseline the suppression rule replaces.
SaliencyMap subtract_naive(const SaliencyMap& sa_ori, const SaliencyMap& sa_back,
                           bool clamp_nonnegative);

/// Nearest-neighbour resample to (width, height).
SaliencyMap resize_nearest(const SaliencyMap& map, std::size_t width, std::size_t height);

// SMAP codec: "SMAP", u32 version (=1), u32 width, u32 height, then
// width*height float32 values; all little-endian. Values are narrowed to
// float32 on encode.
inline constexpr std::size_t kSmapHeaderSize = 16;
inline constexpr std::uint32_t kSmapVersion = 1;

std::vector<std::uint8_t> encode_smap(const SaliencyMap& map);
SaliencyMap decode_smap(std::span<const std::uint8_t> bytes);

SaliencyMap read_smap_file(const std::string& path);
void write_smap_file(const std::string& path, const SaliencyMap& map);

/// Whitespace-separated text grid, one row per line (debugging aid).
std::string smap_to_text(const SaliencyMap& map);
SaliencyMap smap_from_text(const std::string& text);

}  // namespace roiprep
