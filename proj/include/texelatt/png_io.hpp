#pragma once

// 8-bit RGB PNG reading and writing on top of libpng's simplified API.

#include <png.h>

#include <cstring>
#include <string>
#include <vector>

#include "texelatt/core.hpp"

namespace texelatt {

namespace detail {

struct PngImageGuard {
  png_image image;
  PngImageGuard() {
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
  }
  ~PngImageGuard() { png_image_free(&image); }
  PngImageGuard(const PngImageGuard&) = delete;
  PngImageGuard& operator=(const PngImageGuard&) = delete;
};

inline RasterImage finish_png_read(PngImageGuard& guard, const std::string& what) {
  png_image& img = guard.image;
  if (img.format & PNG_FORMAT_FLAG_LINEAR) throw DataError(what + ": unsupported bit depth");
  img.format = PNG_FORMAT_RGB;
  std::vector<ColorRGB> pixels(std::size_t(img.width) * img.height);
  if (!png_image_finish_read(&img, nullptr, pixels.data(), 0, nullptr))
    throw DataError(what + ": " + img.message);
  return RasterImage(int(img.width), int(img.height), std::move(pixels));
}

}  // namespace detail

/// Loads an 8-bit PNG as RGB. Alpha is discarded; grayscale and palette
/// images are expanded. 16-bit images are rejected.
inline RasterImage load_png(const std::string& path) {
  detail::PngImageGuard guard;
  if (!png_image_begin_read_from_file(&guard.image, path.c_str()))
    throw DataError("cannot read PNG '" + path + "': " + guard.image.message);
  return detail::finish_png_read(guard, "PNG '" + path + "'");
}

inline RasterImage decode_png(const std::vector<unsigned char>& bytes) {
  detail::PngImageGuard guard;
  if (!png_image_begin_read_from_memory(&guard.image, bytes.data(), bytes.size()))
    throw DataError(std::string("cannot decode PNG: ") + guard.image.message);
  return detail::finish_png_read(guard, "PNG buffer");
}

inline void save_png(const RasterImage& image, const std::string& path) {
  detail::PngImageGuard guard;
  png_image& img = guard.image;
  img.width = png_uint_32(image.width());
  img.height = png_uint_32(image.height());
  img.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&img, path.c_str(), 0, image.pixels().data(), 0, nullptr))
    throw DataError("cannot write PNG '" + path + "': " + img.message);
}

inline std::vector<unsigned char> encode_png(const RasterImage& image) {
  detail::PngImageGuard guard;
  png_image& img = guard.image;
  img.width = png_uint_32(image.width());
  img.height = png_uint_32(image.height());
  img.format = PNG_FORMAT_RGB;
  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&img, nullptr, &size, 0, image.pixels().data(), 0, nullptr))
    throw DataError(std::string("cannot encode PNG: ") + img.message);
  std::vector<unsigned char> out(size);
  if (!png_image_write_to_memory(&img, out.data(), &size, 0, image.pixels().data(), 0, nullptr))
    throw DataError(std::string("cannot encode PNG: ") + img.message);
  out.resize(size);
  return out;
}

}  // namespace texelatt
