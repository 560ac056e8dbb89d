#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "roiprep/image.hpp"
#include "roiprep/saliency.hpp"

namespace roiprep {

/// Row-major foreground mask (1 = foreground).
struct BinaryMask {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> bits;

  bool at(std::size_t x, std::size_t y) const { return bits[y * width + x] != 0; }
  std::size_t count() const;

  friend bool operator==(const BinaryMask&, const BinaryMask&) = default;
};

struct BoundingBox {
  std::size_t x = 0;
  std::size_t y = 0;
  std::size_t w = 0;
  std::size_t h = 0;

  std::size_t area() const noexcept { return w * h; }
  bool contains(std::size_t px, std::size_t py) const noexcept {
    return px >= x && px < x + w && py >= y && py < y + h;
  }
  bool fits(std::size_t width, std::size_t height) const noexcept {
    return w >= 1 && h >= 1 && x + w <= width && y + h <= height;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ConnectedRegion {
  std::uint32_t label = 0;  // 1-based, raster order of each region's first pixel
  std::size_t pixel_count = 0;
  BoundingBox bbox;

  friend bool operator==(const ConnectedRegion&, const ConnectedRegion&) = default;
};

enum class Connectivity { Four = 4, Eight = 8 };

struct FixedThreshold {
  double tau = 0.5;
};
struct QuantileThreshold {
  double q = 0.85;
};
using ThresholdMode = std::variant<FixedThreshold, QuantileThreshold>;

struct RoiConfig {
  ThresholdMode threshold = QuantileThreshold{0.85};
  Connectivity connectivity = Connectivity::Eight;
  // Absolute minimum region size; when unset, min_area_fraction of the image.
  std::optional<std::size_t> min_area;
  double min_area_fraction = 0.005;
  std::size_t max_boxes = 3;
  Rgb box_color{255, 0, 0};
  std::size_t box_thickness = 2;

  void validate() const;
  std::size_t resolved_min_area(std::size_t pixel_count) const;
  std::string mode_name() const;
};

struct BinarizeResult {
  BinaryMask mask;
  double threshold = 0.0;  // the realized cut; foreground is value > threshold
};

/// q-quantile with linear interpolation between order statistics.
double quantile(std::vector<double> values, double q);

BinarizeResult binarize(const SaliencyMap& map, const RoiConfig& config);

struct LabeledComponents {
  std::vector<std::uint32_t> labels;  // per pixel, row-major; 0 = background
  std::vector<ConnectedRegion> regions;
};

/// Labels are 1-based, in raster order of each region's first pixel.
LabeledComponents label_components(const BinaryMask& mask, Connectivity connectivity);

std::vector<ConnectedRegion> connected_components(const BinaryMask& mask,
                                                  Connectivity connectivity);

/// Drops regions under min_area, orders by size (desc) then label (asc),
/// keeps max_boxes.
std::vector<BoundingBox> select_regions(const std::vector<ConnectedRegion>& regions,
                                        const RoiConfig& config, std::size_t pixel_count);

/// Same as above, returning the kept regions instead of only their boxes.
std::vector<ConnectedRegion> select_top_regions(const std::vector<ConnectedRegion>& regions,
                                                const RoiConfig& config,
                                                std::size_t pixel_count);

/// Draws each box as a frame box_thickness pixels wide, inward from its edge.
RasterImage render_overlay(const RasterImage& image, const std::vector<BoundingBox>& boxes,
                           const RoiConfig& config);

double compute_iou(const BoundingBox& a, const BoundingBox& b);

struct RoiExtraction {
  double threshold = 0.0;
  std::size_t min_area = 0;
  std::vector<ConnectedRegion> regions;   // all components
  std::vector<ConnectedRegion> selected;  // after select_regions
  std::vector<BoundingBox> boxes() const;
};

/// binarize -> connected_components -> select_regions.
RoiExtraction extract_rois(const SaliencyMap& map, const RoiConfig& config);

}  // namespace roiprep
