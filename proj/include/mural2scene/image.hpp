#pragma once

// 8-bit RGBA rasters and their PNG/JPEG encodings.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "mural2scene/math.hpp"

namespace mural2scene {

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;

  friend bool operator==(const Rgba &, const Rgba &) = default;
};

/// Row-major, top row first, 4 bytes per pixel.
class Image {
 public:
  Image() = default;
  Image(int width, int height, Rgba fill = {});

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return width_ == 0 || height_ == 0; }

  Rgba at(int x, int y) const;
  void set(int x, int y, Rgba c);
  std::uint8_t *row(int y) { return data_.data() + static_cast<std::size_t>(y) * width_ * 4; }
  const std::uint8_t *row(int y) const {
    return data_.data() + static_cast<std::size_t>(y) * width_ * 4;
  }
  const std::vector<std::uint8_t> &bytes() const { return data_; }
  std::vector<std::uint8_t> &bytes() { return data_; }

  /// Copies `src` into this image with its top-left at (x, y).
  void blit(const Image &src, int x, int y);
  Image crop(int x, int y, int w, int h) const;

  friend bool operator==(const Image &, const Image &) = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> data_;
};

/// Decodes a PNG or JPEG file (chosen by signature). Throws IoError.
Image read_image(const std::filesystem::path &path);
Image decode_image(const std::vector<std::uint8_t> &bytes, const std::string &name);

/// 8-bit RGBA, non-interlaced, no timestamp: equal images give equal bytes.
std::vector<std::uint8_t> encode_png(const Image &img);
void write_png(const std::filesystem::path &path, const Image &img);

std::vector<std::uint8_t> read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes);
void write_file(const std::filesystem::path &path, const std::string &text);

}  // namespace mural2scene
