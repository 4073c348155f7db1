#pragma once

// Binary PNM (P5 grayscale / P6 color, maxval 255) codec and the box filter
// used to build super-resolution training data. Decoding maps bytes to
// [0,1]; encoding clamps and rounds half-up, so encode(decode(x)) == x for
// every valid file.

#include "iinr/tensor.hpp"

#include <cstdint>
#include <fstream>
#include <iterator>
#include <stdexcept>
#include <string>
#include <vector>

namespace iinr {

struct ImageBuffer {
  index_t width = 0;
  index_t height = 0;
  index_t channels = 1;  // 1 or 3
  std::vector<double> data;  // row-major, channel-interleaved, values in [0,1]

  ImageBuffer() = default;
  ImageBuffer(index_t w, index_t h, index_t c, double fill = 0.0)
      : width(w), height(h), channels(c),
        data(static_cast<std::size_t>(w * h * c), fill) {}

  double& at(index_t y, index_t x, index_t c) {
    return data[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
  double at(index_t y, index_t x, index_t c) const {
    return data[static_cast<std::size_t>((y * width + x) * channels + c)];
  }
};

struct PnmParseError : std::runtime_error {
  std::size_t offset;
  PnmParseError(std::size_t off, const std::string& msg)
      : std::runtime_error("pnm parse error at byte " + std::to_string(off) + ": " + msg),
        offset(off) {}
};

namespace detail {

inline bool pnm_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Skips whitespace and '#' comments; returns the next integer token.
inline long pnm_int(const std::vector<std::uint8_t>& b, std::size_t& pos, const char* what) {
  while (pos < b.size()) {
    if (pnm_space(b[pos])) {
      ++pos;
    } else if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  if (pos >= b.size()) throw PnmParseError(pos, std::string("missing ") + what);
  if (b[pos] < '0' || b[pos] > '9')
    throw PnmParseError(pos, std::string("expected digit for ") + what);
  long v = 0;
  while (pos < b.size() && b[pos] >= '0' && b[pos] <= '9') {
    v = v * 10 + (b[pos] - '0');
    if (v > 1'000'000'000) throw PnmParseError(pos, std::string(what) + " out of range");
    ++pos;
  }
  return v;
}

}  // namespace detail

inline ImageBuffer decode_pnm(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '5' && bytes[1] != '6'))
    throw PnmParseError(0, "not a binary P5/P6 file");
  const index_t channels = bytes[1] == '5' ? 1 : 3;
  std::size_t pos = 2;
  const long w = detail::pnm_int(bytes, pos, "width");
  const long h = detail::pnm_int(bytes, pos, "height");
  const long maxval = detail::pnm_int(bytes, pos, "maxval");
  if (w < 1 || h < 1) throw PnmParseError(pos, "empty image");
  if (maxval != 255) throw PnmParseError(pos, "unsupported maxval " + std::to_string(maxval));
  if (pos >= bytes.size() || !detail::pnm_space(bytes[pos]))
    throw PnmParseError(pos, "expected single whitespace before payload");
  ++pos;
  const std::size_t expected = static_cast<std::size_t>(w) * h * channels;
  const std::size_t got = bytes.size() - pos;
  if (got < expected)
    throw PnmParseError(pos, "truncated payload: expected " + std::to_string(expected) +
                                 " bytes, got " + std::to_string(got));
  ImageBuffer img(w, h, channels);
  for (std::size_t i = 0; i < expected; ++i)
    img.data[i] = static_cast<double>(bytes[pos + i]) / 255.0;
  return img;
}

inline std::vector<std::uint8_t> encode_pnm(const ImageBuffer& img) {
  if (img.channels != 1 && img.channels != 3)
    throw std::invalid_argument("encode_pnm: channels must be 1 or 3");
  std::string header = (img.channels == 1 ? "P5\n" : "P6\n") + std::to_string(img.width) + " " +
                       std::to_string(img.height) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.reserve(out.size() + img.data.size());
  for (double v : img.data) {
    v = v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v);
    out.push_back(static_cast<std::uint8_t>(std::floor(v * 255.0 + 0.5)));  // half-up
  }
  return out;
}

inline ImageBuffer load_pnm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return decode_pnm(bytes);
}

inline void save_pnm(const std::string& path, const ImageBuffer& img) {
  const auto bytes = encode_pnm(img);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

// Each output pixel is the plain mean of its factor x factor block.
inline ImageBuffer box_downsample(const ImageBuffer& img, index_t factor) {
  if (factor < 1) throw std::invalid_argument("box_downsample: factor must be >= 1");
  if (img.width % factor != 0 || img.height % factor != 0)
    throw std::invalid_argument("box_downsample: dims not divisible by factor");
  ImageBuffer out(img.width / factor, img.height / factor, img.channels);
  const double inv = 1.0 / static_cast<double>(factor * factor);
  for (index_t y = 0; y < out.height; ++y)
    for (index_t x = 0; x < out.width; ++x)
      for (index_t c = 0; c < img.channels; ++c) {
        double acc = 0.0;
        for (index_t dy = 0; dy < factor; ++dy)
          for (index_t dx = 0; dx < factor; ++dx)
            acc += img.at(y * factor + dy, x * factor + dx, c);
        out.at(y, x, c) = acc * inv;
      }
  return out;
}

// (height*width) x channels tensor view of the pixel data.
inline Mat image_to_mat(const ImageBuffer& img) {
  Mat m(img.height * img.width, img.channels);
  m.data = img.data;
  return m;
}

inline ImageBuffer mat_to_image(const Mat& m, index_t height, index_t width) {
  require_shape(m.rows == height * width, "mat_to_image rows");
  ImageBuffer img(width, height, m.cols);
  img.data = m.data;
  return img;
}

}  // namespace iinr
