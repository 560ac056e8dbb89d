#include "roiprep/saliency.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "binary_io.hpp"
#include "roiprep/error.hpp"

namespace roiprep {

namespace {

constexpr char kSmapMagic[4] = {'S', 'M', 'A', 'P'};

void require_same_shape(const SaliencyMap& a, const SaliencyMap& b) {
  if (!a.same_shape(b)) {
    std::ostringstream msg;
    msg << "saliency map dimensions differ: " << a.width() << "x" << a.height() << " vs "
        << b.width() << "x" << b.height();
    throw DimensionError(msg.str());
  }
}

std::vector<double> rescale(std::span<const double> values, double lo, double hi) {
  std::vector<double> out(values.size(), 0.0);
  if (hi > lo) {
    const double range = hi - lo;
    std::transform(values.begin(), values.end(), out.begin(),
                   [&](double v) { return (v - lo) / range; });
  }
  return out;
}

}  // namespace

SaliencyMap::SaliencyMap(std::size_t width, std::size_t height, std::vector<double> values)
    : width_(width), height_(height), values_(std::move(values)) {
  if (width_ == 0 || height_ == 0) throw DimensionError("saliency map must be non-empty");
  if (values_.size() != width_ * height_) {
    throw DimensionError("saliency map expects " + std::to_string(width_ * height_) +
                         " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw FormatError("non-finite saliency value at (x=" + std::to_string(i % width_) +
                        ", y=" + std::to_string(i / width_) + ")");
    }
  }
}

SaliencyMap SaliencyMap::filled(std::size_t width, std::size_t height, double value) {
  return SaliencyMap(width, height, std::vector<double>(width * height, value));
}

double SaliencyMap::min() const { return *std::min_element(values_.begin(), values_.end()); }
double SaliencyMap::max() const { return *std::max_element(values_.begin(), values_.end()); }

void S3Params::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw ConfigError("delta must lie in [0, 1], got " + std::to_string(delta));
  }
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ConfigError("epsilon must be positive, got " + std::to_string(epsilon));
  }
}

SaliencyMap normalize_map(const SaliencyMap& map) {
  return SaliencyMap(map.width(), map.height(), rescale(map.values(), map.min(), map.max()));
}

std::pair<SaliencyMap, SaliencyMap> normalize_joint(const SaliencyMap& ori,
                                                    const SaliencyMap& back) {
  require_same_shape(ori, back);
  const double lo = std::min(ori.min(), back.min());
  const double hi = std::max(ori.max(), back.max());
  return {SaliencyMap(ori.width(), ori.height(), rescale(ori.values(), lo, hi)),
          SaliencyMap(back.width(), back.height(), rescale(back.values(), lo, hi))};
}

SaliencyMap s3_combine(const SaliencyMap& sa_ori, const SaliencyMap& sa_back,
                       const S3Params& params) {
  params.validate();
  require_same_shape(sa_ori, sa_back);
  const auto ori = sa_ori.values();
  const auto back = sa_back.values();
  std::vector<double> out(ori.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double diff = ori[i] - back[i];
    double v = back[i] <= params.delta ? diff : params.epsilon * diff;
    if (params.clamp_nonnegative && v < 0.0) v = 0.0;
    out[i] = v;
  }
  return SaliencyMap(sa_ori.width(), sa_ori.height(), std::move(out));
}

SaliencyMap subtract_naive(const SaliencyMap& sa_ori, const SaliencyMap& sa_back,
                           bool clamp_nonnegative) {
  require_same_shape(sa_ori, sa_back);
  const auto ori = sa_ori.values();
  const auto back = sa_back.values();
  std::vector<double> out(ori.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double v = ori[i] - back[i];
    if (clamp_nonnegative && v < 0.0) v = 0.0;
    out[i] = v;
  }
  return SaliencyMap(sa_ori.width(), sa_ori.height(), std::move(out));
}

SaliencyMap resize_nearest(const SaliencyMap& map, std::size_t width, std::size_t height) {
  if (width == map.width() && height == map.height()) return map;
  std::vector<double> out(width * height);
  for (std::size_t y = 0; y < height; ++y) {
    const std::size_t sy = y * map.height() / height;
    for (std::size_t x = 0; x < width; ++x) {
      out[y * width + x] = map.at(x * map.width() / width, sy);
    }
  }
  return SaliencyMap(width, height, std::move(out));
}

std::vector<std::uint8_t> encode_smap(const SaliencyMap& map) {
  std::vector<std::uint8_t> out;
  out.reserve(kSmapHeaderSize + 4 * map.size());
  out.insert(out.end(), std::begin(kSmapMagic), std::end(kSmapMagic));
  detail::put_u32(out, kSmapVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(map.width()));
  detail::put_u32(out, static_cast<std::uint32_t>(map.height()));
  for (double v : map.values()) detail::put_f32(out, static_cast<float>(v));
  return out;
}

SaliencyMap decode_smap(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kSmapHeaderSize) {
    throw FormatError("SMAP truncated header: expected " + std::to_string(kSmapHeaderSize) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  if (!std::equal(std::begin(kSmapMagic), std::end(kSmapMagic), bytes.begin())) {
    throw FormatError("bad magic: not an SMAP file");
  }
  const std::uint32_t version = detail::get_u32(bytes, 4);
  if (version != kSmapVersion) {
    throw FormatError("unsupported SMAP version " + std::to_string(version));
  }
  const std::uint64_t width = detail::get_u32(bytes, 8);
  const std::uint64_t height = detail::get_u32(bytes, 12);
  if (width == 0 || height == 0) throw FormatError("SMAP declares an empty grid");
  const std::uint64_t expected = kSmapHeaderSize + 4 * width * height;
  if (bytes.size() != expected) {
    throw FormatError("SMAP length mismatch: expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<double> values(width * height);
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = detail::get_f32(bytes, kSmapHeaderSize + 4 * i);
  }
  return SaliencyMap(width, height, std::move(values));
}

SaliencyMap read_smap_file(const std::string& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_smap(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_smap_file(const std::string& path, const SaliencyMap& map) {
  detail::write_file_atomic(path, encode_smap(map));
}

std::string smap_to_text(const SaliencyMap& map) {
  std::ostringstream out;
  out << std::setprecision(std::numeric_limits<float>::max_digits10);
  for (std::size_t y = 0; y < map.height(); ++y) {
    for (std::size_t x = 0; x < map.width(); ++x) {
      if (x) out << ' ';
      out << static_cast<float>(map.at(x, y));
    }
    out << '\n';
  }
  return out.str();
}

SaliencyMap smap_from_text(const std::string& text) {
  std::istringstream lines(text);
  std::string line;
  std::vector<double> values;
  std::size_t width = 0;
  std::size_t height = 0;
  while (std::getline(lines, line)) {
    std::istringstream row(line);
    std::size_t count = 0;
    std::string token;
    while (row >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw FormatError("grid row " + std::to_string(height + 1) + ": bad number '" +
                          token + "'");
      }
      ++count;
    }
    if (count == 0) continue;
    if (width == 0) width = count;
    if (count != width) {
      throw FormatError("grid row " + std::to_string(height + 1) + " has " +
                        std::to_string(count) + " values, expected " + std::to_string(width));
    }
    ++height;
  }
  if (height == 0) throw FormatError("grid is empty");
  return SaliencyMap(width, height, std::move(values));
}

}  // namespace roiprep
