#include "roiprep/roi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "roiprep/error.hpp"

namespace roiprep {

std::size_t BinaryMask::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

void RoiConfig::validate() const {
  if (const auto* f = std::get_if<FixedThreshold>(&threshold)) {
    if (!(f->tau >= 0.0 && f->tau <= 1.0)) throw ConfigError("fixed threshold must lie in [0, 1]");
  } else {
    const double q = std::get<QuantileThreshold>(threshold).q;
    if (!(q > 0.0 && q < 1.0)) throw ConfigError("quantile must lie in (0, 1)");
  }
  if (connectivity != Connectivity::Four && connectivity != Connectivity::Eight) {
    throw ConfigError("connectivity must be 4 or 8");
  }
  if (!(min_area_fraction >= 0.0 && min_area_fraction <= 1.0)) {
    throw ConfigError("min_area_fraction must lie in [0, 1]");
  }
  if (max_boxes < 1) throw ConfigError("max_boxes must be at least 1");
  if (box_thickness < 1) throw ConfigError("box_thickness must be at least 1");
}

std::size_t RoiConfig::resolved_min_area(std::size_t pixel_count) const {
  if (min_area) return *min_area;
  return static_cast<std::size_t>(std::ceil(min_area_fraction * static_cast<double>(pixel_count)));
}

std::string RoiConfig::mode_name() const {
  return std::holds_alternative<FixedThreshold>(threshold) ? "fixed" : "quantile";
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DimensionError("quantile of an empty sequence");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

BinarizeResult binarize(const SaliencyMap& map, const RoiConfig& config) {
  config.validate();
  BinarizeResult result;
  if (const auto* f = std::get_if<FixedThreshold>(&config.threshold)) {
    result.threshold = f->tau;
  } else {
    const auto values = map.values();
    result.threshold = quantile({values.begin(), values.end()},
                                std::get<QuantileThreshold>(config.threshold).q);
  }
  result.mask.width = map.width();
  result.mask.height = map.height();
  result.mask.bits.resize(map.size());
  const auto values = map.values();
  for (std::size_t i = 0; i < values.size(); ++i) {
    result.mask.bits[i] = values[i] > result.threshold ? 1 : 0;
  }
  return result;
}

namespace {

// Union-find over provisional labels.
class DisjointSets {
 public:
  std::uint32_t make() {
    parent_.push_back(static_cast<std::uint32_t>(parent_.size()));
    return parent_.back();
  }
  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

LabeledComponents label_components(const BinaryMask& mask, Connectivity connectivity) {
  const std::size_t w = mask.width;
  const std::size_t h = mask.height;
  if (mask.bits.size() != w * h) throw DimensionError("mask length does not match its shape");

  constexpr std::uint32_t kNone = 0xffffffffu;
  std::vector<std::uint32_t> provisional(w * h, kNone);
  DisjointSets sets;
  const bool eight = connectivity == Connectivity::Eight;

  // First pass: provisional labels from the already-visited neighbours
  // (west, north-west, north, north-east).
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      if (!mask.bits[y * w + x]) continue;
      std::uint32_t label = kNone;
      auto visit = [&](std::size_t nx, std::size_t ny) {
        const std::uint32_t n = provisional[ny * w + nx];
        if (n == kNone) return;
        if (label == kNone) {
          label = n;
        } else {
          sets.unite(label, n);
        }
      };
      if (x > 0) visit(x - 1, y);
      if (y > 0) {
        visit(x, y - 1);
        if (eight && x > 0) visit(x - 1, y - 1);
        if (eight && x + 1 < w) visit(x + 1, y - 1);
      }
      provisional[y * w + x] = label == kNone ? sets.make() : label;
    }
  }

  // Second pass: final labels in raster order of each root's first pixel.
  struct Extent {
    std::size_t x0, y0, x1, y1, count;
  };
  std::vector<Extent> extents;
  std::vector<std::uint32_t> final_label;
  LabeledComponents out;
  out.labels.assign(w * h, 0);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::uint32_t p = provisional[y * w + x];
      if (p == kNone) continue;
      const std::uint32_t root = sets.find(p);
      if (root >= final_label.size()) final_label.resize(root + 1, kNone);
      if (final_label[root] == kNone) {
        final_label[root] = static_cast<std::uint32_t>(extents.size());
        extents.push_back({x, y, x, y, 0});
      }
      out.labels[y * w + x] = final_label[root] + 1;
      Extent& e = extents[final_label[root]];
      e.x0 = std::min(e.x0, x);
      e.x1 = std::max(e.x1, x);
      e.y1 = y;
      ++e.count;
    }
  }

  out.regions.reserve(extents.size());
  for (std::size_t i = 0; i < extents.size(); ++i) {
    const Extent& e = extents[i];
    out.regions.push_back({static_cast<std::uint32_t>(i + 1), e.count,
                           {e.x0, e.y0, e.x1 - e.x0 + 1, e.y1 - e.y0 + 1}});
  }
  return out;
}

std::vector<ConnectedRegion> connected_components(const BinaryMask& mask,
                                                  Connectivity connectivity) {
  return label_components(mask, connectivity).regions;
}

std::vector<ConnectedRegion> select_top_regions(const std::vector<ConnectedRegion>& regions,
                                                const RoiConfig& config,
                                                std::size_t pixel_count) {
  const std::size_t min_area = config.resolved_min_area(pixel_count);
  std::vector<ConnectedRegion> kept;
  std::copy_if(regions.begin(), regions.end(), std::back_inserter(kept),
               [&](const ConnectedRegion& r) { return r.pixel_count >= min_area; });
  std::sort(kept.begin(), kept.end(), [](const ConnectedRegion& a, const ConnectedRegion& b) {
    if (a.pixel_count != b.pixel_count) return a.pixel_count > b.pixel_count;
    return a.label < b.label;
  });
  if (kept.size() > config.max_boxes) kept.resize(config.max_boxes);
  return kept;
}

std::vector<BoundingBox> select_regions(const std::vector<ConnectedRegion>& regions,
                                        const RoiConfig& config, std::size_t pixel_count) {
  std::vector<BoundingBox> boxes;
  for (const auto& r : select_top_regions(regions, config, pixel_count)) boxes.push_back(r.bbox);
  return boxes;
}

RasterImage render_overlay(const RasterImage& image, const std::vector<BoundingBox>& boxes,
                           const RoiConfig& config) {
  if (config.box_thickness < 1) throw ConfigError("box_thickness must be at least 1");
  for (const auto& b : boxes) {
    if (!b.fits(image.width(), image.height())) {
      throw DimensionError("box (" + std::to_string(b.x) + "," + std::to_string(b.y) + "," +
                           std::to_string(b.w) + "," + std::to_string(b.h) +
                           ") lies outside the " + std::to_string(image.width()) + "x" +
                           std::to_string(image.height()) + " image");
    }
  }
  RasterImage out = image;
  const std::size_t t = config.box_thickness;
  for (const auto& b : boxes) {
    for (std::size_t y = b.y; y < b.y + b.h; ++y) {
      for (std::size_t x = b.x; x < b.x + b.w; ++x) {
        const std::size_t inset =
            std::min({x - b.x, b.x + b.w - 1 - x, y - b.y, b.y + b.h - 1 - y});
        if (inset < t) out.at(x, y) = config.box_color;
      }
    }
  }
  return out;
}

double compute_iou(const BoundingBox& a, const BoundingBox& b) {
  const std::size_t x0 = std::max(a.x, b.x);
  const std::size_t y0 = std::max(a.y, b.y);
  const std::size_t x1 = std::min(a.x + a.w, b.x + b.w);
  const std::size_t y1 = std::min(a.y + a.h, b.y + b.h);
  const std::size_t inter = (x1 > x0 && y1 > y0) ? (x1 - x0) * (y1 - y0) : 0;
  const std::size_t uni = a.area() + b.area() - inter;
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<BoundingBox> RoiExtraction::boxes() const {
  std::vector<BoundingBox> out;
  for (const auto& r : selected) out.push_back(r.bbox);
  return out;
}

RoiExtraction extract_rois(const SaliencyMap& map, const RoiConfig& config) {
  BinarizeResult bin = binarize(map, config);
  RoiExtraction out;
  out.threshold = bin.threshold;
  out.min_area = config.resolved_min_area(map.size());
  out.regions = connected_components(bin.mask, config.connectivity);
  out.selected = select_top_regions(out.regions, config, map.size());
  return out;
}

}  // namespace roiprep
