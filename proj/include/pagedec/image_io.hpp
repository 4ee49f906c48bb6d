#pragma once

#include <png.h>

#include <array>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

#include "pagedec/raster.hpp"

namespace pagedec {

class ImageIoError : public std::runtime_error {
 public:
  ImageIoError(const std::filesystem::path& path, const std::string& what)
      : std::runtime_error(path.string() + ": " + what) {}
};

/// 8-bit RGB raster used only for overlay output.
struct RgbImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;  // r,g,b interleaved

  RgbImage() = default;
  RgbImage(int w, int h) : width(w), height(h), data(std::size_t(w) * h * 3, 255) {}

  void set(int x, int y, std::array<std::uint8_t, 3> rgb) {
    const std::size_t i = (std::size_t(y) * width + x) * 3;
    data[i] = rgb[0];
    data[i + 1] = rgb[1];
    data[i + 2] = rgb[2];
  }
};

/// ITU-R BT.601 luma, rounded half up, in integer arithmetic.
[[nodiscard]] constexpr std::uint8_t luminance(std::uint8_t r, std::uint8_t g,
                                               std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

namespace detail {

inline std::vector<std::uint8_t> read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ImageIoError(path, "cannot open file");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

inline GrayImage decode_png(const std::filesystem::path& path,
                            const std::vector<std::uint8_t>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw ImageIoError(path, std::string("PNG decode failed: ") + image.message);
  }
  if (image.width == 0 || image.height == 0) {
    png_image_free(&image);
    throw ImageIoError(path, "zero-dimension image");
  }
  const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
  // Keep alpha as a separate channel so it can be ignored rather than
  // composited.
  image.format = color ? PNG_FORMAT_RGBA : PNG_FORMAT_GA;
  const int channels = color ? 4 : 2;
  std::vector<std::uint8_t> buf(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, buf.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw ImageIoError(path, "PNG decode failed: " + msg);
  }
  const int w = static_cast<int>(image.width);
  const int h = static_cast<int>(image.height);
  GrayImage out(w, h);
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) {
    const std::uint8_t* p = &buf[i * channels];
    px[i] = color ? luminance(p[0], p[1], p[2]) : p[0];
  }
  return out;
}

inline GrayImage decode_pgm(const std::filesystem::path& path,
                            const std::vector<std::uint8_t>& bytes) {
  std::size_t pos = 2;
  auto skip_space = [&] {
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
  };
  auto read_int = [&]() -> long {
    skip_space();
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      throw ImageIoError(path, "malformed PGM header");
    }
    long v = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      v = v * 10 + (bytes[pos] - '0');
      if (v > 1'000'000'000L) throw ImageIoError(path, "malformed PGM header");
      ++pos;
    }
    return v;
  };
  const long w = read_int();
  const long h = read_int();
  const long maxval = read_int();
  if (w == 0 || h == 0) throw ImageIoError(path, "zero-dimension image");
  if (maxval <= 0 || maxval > 255) {
    throw ImageIoError(path, "unsupported PGM maxval " + std::to_string(maxval));
  }
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    throw ImageIoError(path, "malformed PGM header");
  }
  ++pos;
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  if (bytes.size() - pos < n) throw ImageIoError(path, "truncated PGM data");
  GrayImage out(static_cast<int>(w), static_cast<int>(h));
  auto px = out.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bytes[pos + i];
    px[i] = maxval == 255 ? static_cast<std::uint8_t>(v)
                          : static_cast<std::uint8_t>((v * 255u + maxval / 2) / maxval);
  }
  return out;
}

}  // namespace detail

/// Loads a PNG or binary PGM (P5). The format is sniffed from the content.
/// Color PNGs are reduced to luminance; alpha is ignored.
[[nodiscard]] inline GrayImage load_page(const std::filesystem::path& path) {
  const auto bytes = detail::read_all(path);
  static constexpr std::array<std::uint8_t, 8> kPngSig = {0x89, 'P', 'N', 'G',
                                                         '\r', '\n', 0x1a, '\n'};
  if (bytes.size() >= 8 && std::equal(kPngSig.begin(), kPngSig.end(), bytes.begin())) {
    return detail::decode_png(path, bytes);
  }
  if (bytes.size() >= 2 && bytes[0] == 'P' && bytes[1] == '5') {
    return detail::decode_pgm(path, bytes);
  }
  throw ImageIoError(path, "unsupported format (expected PNG or binary PGM)");
}

inline void save_png(const GrayImage& img, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width());
  image.height = static_cast<png_uint_32>(img.height());
  image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0,
                               img.pixels().data(), 0, nullptr)) {
    throw ImageIoError(path, std::string("PNG write failed: ") + image.message);
  }
}

inline void save_png(const RgbImage& img, const std::filesystem::path& path) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(img.width);
  image.height = static_cast<png_uint_32>(img.height);
  image.format = PNG_FORMAT_RGB;
  if (!png_image_write_to_file(&image, path.string().c_str(), 0,
                               img.data.data(), 0, nullptr)) {
    throw ImageIoError(path, std::string("PNG write failed: ") + image.message);
  }
}

inline void save_pgm(const GrayImage& img, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ImageIoError(path, "cannot open for writing");
  out << "P5\n" << img.width() << ' ' << img.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.pixels().data()),
            static_cast<std::streamsize>(img.pixels().size()));
  if (!out) throw ImageIoError(path, "write failed");
}

/// Writes PGM when the extension is .pgm, PNG otherwise.
inline void save_page(const GrayImage& img, const std::filesystem::path& path) {
  if (path.extension() == ".pgm") {
    save_pgm(img, path);
  } else {
    save_png(img, path);
  }
}

}  // namespace pagedec
