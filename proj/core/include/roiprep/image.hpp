#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace roiprep {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend bool operator==(const Rgb&, const Rgb&) = default;
};

/// 8-bit RGB raster, row-major.
class RasterImage {
 public:
  RasterImage(std::size_t width, std::size_t height, Rgb fill = {});
  RasterImage(std::size_t width, std::size_t height, std::vector<Rgb> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept { return pixels_.size(); }

  const Rgb& at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }
  Rgb& at(std::size_t x, std::size_t y) { return pixels_[y * width_ + x]; }
  std::span<const Rgb> pixels() const noexcept { return pixels_; }

  friend bool operator==(const RasterImage&, const RasterImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<Rgb> pixels_;
};

// Binary PPM (P6, maxval 255). The writer emits "P6\n<w> <h>\n255\n";
// the reader also accepts arbitrary header whitespace and '#' comments.
std::vector<std::uint8_t> encode_ppm(const RasterImage& image);
RasterImage decode_ppm(std::span<const std::uint8_t> bytes);

RasterImage read_ppm_file(const std::string& path);
void write_ppm_file(const std::string& path, const RasterImage& image);

}  // namespace roiprep
