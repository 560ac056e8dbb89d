#include "roiprep/image.hpp"

#include <cctype>

#include "binary_io.hpp"
#include "roiprep/error.hpp"

namespace roiprep {

RasterImage::RasterImage(std::size_t width, std::size_t height, Rgb fill)
    : RasterImage(width, height, std::vector<Rgb>(width * height, fill)) {}

RasterImage::RasterImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ == 0 || height_ == 0) throw DimensionError("image must be non-empty");
  if (pixels_.size() != width_ * height_) throw DimensionError("image pixel count mismatch");
}

std::vector<std::uint8_t> encode_ppm(const RasterImage& image) {
  const std::string header = "P6\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(header.size() + 3 * image.pixel_count());
  for (const Rgb& p : image.pixels()) {
    out.push_back(p.r);
    out.push_back(p.g);
    out.push_back(p.b);
  }
  return out;
}

namespace {

class HeaderReader {
 public:
  explicit HeaderReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t number(const char* what) {
    skip_space_and_comments();
    std::size_t value = 0;
    std::size_t digits = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > (1u << 30)) throw FormatError(std::string("PPM ") + what + " too large");
      ++pos_;
      ++digits;
    }
    if (digits == 0) throw FormatError(std::string("PPM header: missing ") + what);
    return value;
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_offset() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      throw FormatError("PPM header: expected whitespace after maxval");
    }
    return pos_ + 1;
  }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 2;
};

}  // namespace

RasterImage decode_ppm(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '6') {
    throw FormatError("bad magic: not a binary PPM (P6) file");
  }
  HeaderReader header(bytes);
  const std::size_t width = header.number("width");
  const std::size_t height = header.number("height");
  const std::size_t maxval = header.number("maxval");
  if (maxval != 255) throw FormatError("PPM maxval must be 255, got " + std::to_string(maxval));
  if (width == 0 || height == 0) throw FormatError("PPM declares an empty image");
  const std::size_t offset = header.raster_offset();
  const std::size_t expected = offset + 3 * width * height;
  if (bytes.size() != expected) {
    throw FormatError("PPM length mismatch: expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(bytes.size()));
  }
  std::vector<Rgb> pixels(width * height);
  for (std::size_t i = 0; i < pixels.size(); ++i) {
    const std::size_t o = offset + 3 * i;
    pixels[i] = {bytes[o], bytes[o + 1], bytes[o + 2]};
  }
  return RasterImage(width, height, std::move(pixels));
}

RasterImage read_ppm_file(const std::string& path) {
  const auto bytes = detail::read_file(path);
  try {
    return decode_ppm(bytes);
  } catch (const FormatError& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_ppm_file(const std::string& path, const RasterImage& image) {
  detail::write_file_atomic(path, encode_ppm(image));
}

}  // namespace roiprep
