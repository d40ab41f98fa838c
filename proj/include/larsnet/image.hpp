#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace larsnet {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;
  bool operator==(const Rgb&) const = default;
};

// 8-bit RGB raster, row 0 at the top.
class Image {
 public:
  Image() = default;
  Image(std::size_t width, std::size_t height, Rgb fill = {255, 255, 255});

  [[nodiscard]] std::size_t width() const { return width_; }
  [[nodiscard]] std::size_t height() const { return height_; }
  [[nodiscard]] Rgb at(std::size_t x, std::size_t y) const;
  void set(std::size_t x, std::size_t y, Rgb c);
  // Clipped to the raster.
  void plot(long x, long y, Rgb c);
  [[nodiscard]] const std::vector<std::uint8_t>& bytes() const { return data_; }

  void fill_disk(double cx, double cy, double radius, Rgb c);
  void draw_line(double x0, double y0, double x1, double y1, double thickness, Rgb c);
  // Even-odd fill.
  void fill_polygon(const std::vector<Eigen::Vector2d>& vertices, Rgb c);
  void draw_rect(long x0, long y0, long x1, long y1, Rgb c);

  bool operator==(const Image&) const = default;

 private:
  std::size_t width_ = 0;
  std::size_t height_ = 0;
  std::vector<std::uint8_t> data_;
};

// Perceptually ordered map (dark blue -> green -> yellow), t clamped to [0, 1].
Rgb colormap(double t);

void draw_star(Image& image, double cx, double cy, double outer_radius, Rgb c);
void draw_arrow(Image& image, double x0, double y0, double x1, double y1, double thickness,
                Rgb c);

using PngText = std::map<std::string, std::string>;

void write_png(const std::filesystem::path& path, const Image& image, const PngText& text = {});

struct PngContents {
  Image image;
  PngText text;
};
PngContents read_png(const std::filesystem::path& path);

}  // namespace larsnet
