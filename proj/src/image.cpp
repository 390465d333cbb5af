#include "mural2scene/image.hpp"

#include <png.h>
#include <jpeglib.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mural2scene/diagnostic.hpp"

namespace mural2scene {

Image::Image(int width, int height, Rgba fill) : width_(width), height_(height) {
  if (width < 0 || height < 0) throw std::invalid_argument("negative image size");
  data_.resize(static_cast<std::size_t>(width) * height * 4);
  for (std::size_t i = 0; i < data_.size(); i += 4) {
    data_[i] = fill.r;
    data_[i + 1] = fill.g;
    data_[i + 2] = fill.b;
    data_[i + 3] = fill.a;
  }
}

Rgba Image::at(int x, int y) const {
  const std::uint8_t *p = row(y) + static_cast<std::size_t>(x) * 4;
  return {p[0], p[1], p[2], p[3]};
}

void Image::set(int x, int y, Rgba c) {
  std::uint8_t *p = row(y) + static_cast<std::size_t>(x) * 4;
  p[0] = c.r;
  p[1] = c.g;
  p[2] = c.b;
  p[3] = c.a;
}

void Image::blit(const Image &src, int x, int y) {
  for (int sy = 0; sy < src.height(); ++sy) {
    const int dy = y + sy;
    if (dy < 0 || dy >= height_) continue;
    for (int sx = 0; sx < src.width(); ++sx) {
      const int dx = x + sx;
      if (dx < 0 || dx >= width_) continue;
      set(dx, dy, src.at(sx, sy));
    }
  }
}

Image Image::crop(int x, int y, int w, int h) const {
  Image out(w, h);
  for (int cy = 0; cy < h; ++cy) {
    std::memcpy(out.row(cy), row(y + cy) + static_cast<std::size_t>(x) * 4,
                static_cast<std::size_t>(w) * 4);
  }
  return out;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path &path) {
  std::error_code ec;
  if (std::filesystem::is_directory(path, ec)) throw IoError(path.string(), "is a directory");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(path.string(), "cannot open for reading");
  try {
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError(path.string(), "read failed");
    return bytes;
  } catch (const std::ios_base::failure &e) {
    throw IoError(path.string(), e.what());
  }
}

void write_file(const std::filesystem::path &path, const std::vector<std::uint8_t> &bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(path.string(), "cannot open for writing");
  out.write(reinterpret_cast<const char *>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(path.string(), "write failed");
}

void write_file(const std::filesystem::path &path, const std::string &text) {
  write_file(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

namespace {

Image decode_png(const std::vector<std::uint8_t> &bytes, const std::string &name) {
  png_image img;
  std::memset(&img, 0, sizeof img);
  img.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&img, bytes.data(), bytes.size())) {
    throw IoError(name, std::string("PNG decode failed: ") + img.message);
  }
  img.format = PNG_FORMAT_RGBA;
  Image out(static_cast<int>(img.width), static_cast<int>(img.height));
  if (!png_image_finish_read(&img, nullptr, out.bytes().data(), 0, nullptr)) {
    const std::string msg = img.message;
    png_image_free(&img);
    throw IoError(name, "PNG decode failed: " + msg);
  }
  return out;
}

struct JpegError {
  jpeg_error_mgr mgr;
  std::jmp_buf jump;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_fail(j_common_ptr cinfo) {
  auto *err = reinterpret_cast<JpegError *>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, err->message);
  std::longjmp(err->jump, 1);
}

Image decode_jpeg(const std::vector<std::uint8_t> &bytes, const std::string &name) {
  jpeg_decompress_struct cinfo;
  JpegError err;
  cinfo.err = jpeg_std_error(&err.mgr);
  err.mgr.error_exit = jpeg_fail;
  Image out;
  if (setjmp(err.jump)) {
    jpeg_destroy_decompress(&cinfo);
    throw IoError(name, std::string("JPEG decode failed: ") + err.message);
  }
  jpeg_create_decompress(&cinfo);
  jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
  jpeg_read_header(&cinfo, TRUE);
  cinfo.out_color_space = JCS_RGB;
  jpeg_start_decompress(&cinfo);
  out = Image(static_cast<int>(cinfo.output_width), static_cast<int>(cinfo.output_height));
  std::vector<std::uint8_t> line(static_cast<std::size_t>(cinfo.output_width) * 3);
  while (cinfo.output_scanline < cinfo.output_height) {
    const int y = static_cast<int>(cinfo.output_scanline);
    JSAMPROW rows[1] = {line.data()};
    jpeg_read_scanlines(&cinfo, rows, 1);
    std::uint8_t *dst = out.row(y);
    for (std::size_t x = 0; x < cinfo.output_width; ++x) {
      dst[x * 4] = line[x * 3];
      dst[x * 4 + 1] = line[x * 3 + 1];
      dst[x * 4 + 2] = line[x * 3 + 2];
      dst[x * 4 + 3] = 255;
    }
  }
  jpeg_finish_decompress(&cinfo);
  jpeg_destroy_decompress(&cinfo);
  return out;
}

}  // namespace

Image decode_image(const std::vector<std::uint8_t> &bytes, const std::string &name) {
  static constexpr std::uint8_t png_sig[] = {0x89, 'P', 'N', 'G'};
  if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 4) == 0) {
    return decode_png(bytes, name);
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) {
    return decode_jpeg(bytes, name);
  }
  throw IoError(name, "not a PNG or JPEG file");
}

Image read_image(const std::filesystem::path &path) {
  return decode_image(read_file(path), path.string());
}

std::vector<std::uint8_t> encode_png(const Image &img) {
  png_image desc;
  std::memset(&desc, 0, sizeof desc);
  desc.version = PNG_IMAGE_VERSION;
  desc.width = static_cast<png_uint_32>(img.width());
  desc.height = static_cast<png_uint_32>(img.height());
  desc.format = PNG_FORMAT_RGBA;
  png_alloc_size_t size = 0;
  if (!png_image_write_get_memory_size(desc, size, 0, img.bytes().data(), 0, nullptr)) {
    throw IoError("<png>", std::string("PNG encode failed: ") + desc.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&desc, out.data(), &size, 0, img.bytes().data(), 0, nullptr)) {
    throw IoError("<png>", std::string("PNG encode failed: ") + desc.message);
  }
  out.resize(size);
  return out;
}

void write_png(const std::filesystem::path &path, const Image &img) {
  write_file(path, encode_png(img));
}

}  // namespace mural2scene
