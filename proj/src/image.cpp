#include "larsnet/image.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <numbers>
#include <stdexcept>

#include <png.h>

namespace larsnet {

Image::Image(std::size_t width, std::size_t height, Rgb fill)
    : width_(width), height_(height), data_(width * height * 3) {
  for (std::size_t i = 0; i < width * height; ++i) {
    data_[3 * i] = fill.r;
    data_[3 * i + 1] = fill.g;
    data_[3 * i + 2] = fill.b;
  }
}

Rgb Image::at(std::size_t x, std::size_t y) const {
  const std::size_t i = 3 * (y * width_ + x);
  return {data_.at(i), data_.at(i + 1), data_.at(i + 2)};
}

void Image::set(std::size_t x, std::size_t y, Rgb c) {
  const std::size_t i = 3 * (y * width_ + x);
  data_.at(i) = c.r;
  data_.at(i + 1) = c.g;
  data_.at(i + 2) = c.b;
}

void Image::plot(long x, long y, Rgb c) {
  if (x < 0 || y < 0 || x >= static_cast<long>(width_) || y >= static_cast<long>(height_)) return;
  set(static_cast<std::size_t>(x), static_cast<std::size_t>(y), c);
}

void Image::fill_disk(double cx, double cy, double radius, Rgb c) {
  const long x0 = static_cast<long>(std::floor(cx - radius));
  const long x1 = static_cast<long>(std::ceil(cx + radius));
  const long y0 = static_cast<long>(std::floor(cy - radius));
  const long y1 = static_cast<long>(std::ceil(cy + radius));
  for (long y = y0; y <= y1; ++y) {
    for (long x = x0; x <= x1; ++x) {
      const double dx = static_cast<double>(x) + 0.5 - cx;
      const double dy = static_cast<double>(y) + 0.5 - cy;
      if (dx * dx + dy * dy <= radius * radius) plot(x, y, c);
    }
  }
}

void Image::draw_line(double x0, double y0, double x1, double y1, double thickness, Rgb c) {
  const double length = std::hypot(x1 - x0, y1 - y0);
  const int steps = std::max(1, static_cast<int>(std::ceil(length * 2.0)));
  for (int i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) / steps;
    fill_disk(x0 + t * (x1 - x0), y0 + t * (y1 - y0), thickness / 2.0, c);
  }
}

void Image::fill_polygon(const std::vector<Eigen::Vector2d>& v, Rgb c) {
  if (v.size() < 3) return;
  double min_x = v[0].x(), max_x = v[0].x(), min_y = v[0].y(), max_y = v[0].y();
  for (const auto& p : v) {
    min_x = std::min(min_x, p.x());
    max_x = std::max(max_x, p.x());
    min_y = std::min(min_y, p.y());
    max_y = std::max(max_y, p.y());
  }
  for (long y = static_cast<long>(std::floor(min_y)); y <= static_cast<long>(std::ceil(max_y)); ++y) {
    for (long x = static_cast<long>(std::floor(min_x)); x <= static_cast<long>(std::ceil(max_x));
         ++x) {
      const double px = static_cast<double>(x) + 0.5;
      const double py = static_cast<double>(y) + 0.5;
      bool inside = false;
      for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        if ((v[i].y() > py) != (v[j].y() > py) &&
            px < (v[j].x() - v[i].x()) * (py - v[i].y()) / (v[j].y() - v[i].y()) + v[i].x()) {
          inside = !inside;
        }
      }
      if (inside) plot(x, y, c);
    }
  }
}

void Image::draw_rect(long x0, long y0, long x1, long y1, Rgb c) {
  for (long x = x0; x <= x1; ++x) {
    plot(x, y0, c);
    plot(x, y1, c);
  }
  for (long y = y0; y <= y1; ++y) {
    plot(x0, y, c);
    plot(x1, y, c);
  }
}

Rgb colormap(double t) {
  // Control points sampled from viridis.
  static constexpr std::array<std::array<double, 3>, 9> stops{{
      {68, 1, 84},
      {71, 44, 122},
      {59, 81, 139},
      {44, 113, 142},
      {33, 144, 141},
      {39, 173, 129},
      {92, 200, 99},
      {170, 220, 50},
      {253, 231, 37},
  }};
  if (!(t >= 0.0)) t = 0.0;
  if (t > 1.0) t = 1.0;
  const double pos = t * static_cast<double>(stops.size() - 1);
  const auto i = std::min(static_cast<std::size_t>(pos), stops.size() - 2);
  const double f = pos - static_cast<double>(i);
  auto lerp = [&](int ch) {
    return static_cast<std::uint8_t>(
        std::lround(stops[i][ch] + f * (stops[i + 1][ch] - stops[i][ch])));
  };
  return {lerp(0), lerp(1), lerp(2)};
}

void draw_star(Image& image, double cx, double cy, double outer_radius, Rgb c) {
  std::vector<Eigen::Vector2d> v;
  for (int k = 0; k < 10; ++k) {
    const double r = (k % 2 == 0) ? outer_radius : 0.4 * outer_radius;
    const double a = -std::numbers::pi / 2.0 + k * std::numbers::pi / 5.0;
    v.emplace_back(cx + r * std::cos(a), cy + r * std::sin(a));
  }
  image.fill_polygon(v, c);
}

void draw_arrow(Image& image, double x0, double y0, double x1, double y1, double thickness,
                Rgb c) {
  image.draw_line(x0, y0, x1, y1, thickness, c);
  const double length = std::hypot(x1 - x0, y1 - y0);
  if (length <= 0.0) return;
  const double ux = (x1 - x0) / length;
  const double uy = (y1 - y0) / length;
  const double head = std::max(4.0 * thickness, 0.15 * length);
  const Eigen::Vector2d tip(x1, y1);
  const Eigen::Vector2d base(x1 - head * ux, y1 - head * uy);
  const Eigen::Vector2d normal(-uy, ux);
  image.fill_polygon({tip, base + 0.5 * head * normal, base - 0.5 * head * normal}, c);
}

namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f != nullptr) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

}  // namespace

void write_png(const std::filesystem::path& path, const Image& image, const PngText& text) {
  FilePtr file(std::fopen(path.string().c_str(), "wb"));
  if (!file) throw std::runtime_error("cannot write image " + path.string());
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png == nullptr ? nullptr : png_create_info_struct(png);
  if (png == nullptr || info == nullptr) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw std::runtime_error("libpng failed writing " + path.string());
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, static_cast<png_uint_32>(image.width()),
               static_cast<png_uint_32>(image.height()), 8, PNG_COLOR_TYPE_RGB,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  std::vector<std::string> keys, values;
  for (const auto& [k, v] : text) {
    keys.push_back(k);
    values.push_back(v);
  }
  std::vector<png_text> chunks(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    chunks[i].compression = PNG_TEXT_COMPRESSION_NONE;
    chunks[i].key = keys[i].data();
    chunks[i].text = values[i].data();
    chunks[i].text_length = values[i].size();
  }
  if (!chunks.empty()) png_set_text(png, info, chunks.data(), static_cast<int>(chunks.size()));
  png_write_info(png, info);
  const auto& bytes = image.bytes();
  for (std::size_t y = 0; y < image.height(); ++y) {
    png_write_row(png, const_cast<png_bytep>(bytes.data() + 3 * y * image.width()));
  }
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

PngContents read_png(const std::filesystem::path& path) {
  FilePtr file(std::fopen(path.string().c_str(), "rb"));
  if (!file) throw std::runtime_error("cannot read image " + path.string());
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png == nullptr ? nullptr : png_create_info_struct(png);
  if (png == nullptr || info == nullptr) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng initialisation failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("libpng failed reading " + path.string());
  }
  png_init_io(png, file.get());
  png_read_info(png, info);
  const png_uint_32 w = png_get_image_width(png, info);
  const png_uint_32 h = png_get_image_height(png, info);
  if (png_get_color_type(png, info) != PNG_COLOR_TYPE_RGB || png_get_bit_depth(png, info) != 8) {
    png_destroy_read_struct(&png, &info, nullptr);
    throw std::runtime_error("unsupported PNG layout in " + path.string());
  }
  PngContents out;
  out.image = Image(w, h);
  std::vector<png_byte> row(3 * static_cast<std::size_t>(w));
  for (png_uint_32 y = 0; y < h; ++y) {
    png_read_row(png, row.data(), nullptr);
    for (png_uint_32 x = 0; x < w; ++x) out.image.set(x, y, {row[3 * x], row[3 * x + 1], row[3 * x + 2]});
  }
  png_read_end(png, info);
  png_textp chunks = nullptr;
  int n = 0;
  png_get_text(png, info, &chunks, &n);
  for (int i = 0; i < n; ++i) out.text[chunks[i].key] = std::string(chunks[i].text, chunks[i].text_length);
  png_destroy_read_struct(&png, &info, nullptr);
  return out;
}

}  // namespace larsnet
