#pragma once

// Initial-state field Z. Drawn once per model at a fixed base resolution;
// queries at arbitrary coordinates multilinearly interpolate the base grid
// (bilinear in 2D, trilinear in 3D) with clamp-to-edge, so cross-resolution
// queries (super-resolution grids) stay consistent with training.

#include "iinr/rng.hpp"
#include "iinr/tensor.hpp"

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace iinr {

enum class LatentMode { GaussianNoise, Ones, Zeros };

inline const char* latent_mode_name(LatentMode m) {
  switch (m) {
    case LatentMode::GaussianNoise: return "noise";
    case LatentMode::Ones: return "ones";
    case LatentMode::Zeros: return "zeros";
  }
  return "?";
}

struct LatentField {
  LatentMode mode = LatentMode::GaussianNoise;
  std::uint64_t seed = 0;
  // Grid size per coordinate axis: {W, H} in 2D, {nx, ny, nz} in 3D. The
  // base grid is stored row-major with the first axis fastest, matching the
  // coordinate grids produced by the task builders.
  std::vector<index_t> dims;
  index_t channels = 1;
  Mat base;  // (prod dims) x channels

  static LatentField make(LatentMode mode, std::uint64_t seed, std::vector<index_t> dims,
                          index_t channels) {
    if (dims.size() != 2 && dims.size() != 3)
      throw std::invalid_argument("LatentField: 2D or 3D grids only");
    for (index_t n : dims)
      if (n < 1) throw std::invalid_argument("LatentField: grid dims must be >= 1");
    if (channels < 1) throw std::invalid_argument("LatentField: channels must be >= 1");
    LatentField lf;
    lf.mode = mode;
    lf.seed = seed;
    lf.dims = std::move(dims);
    lf.channels = channels;
    index_t count = 1;
    for (index_t n : lf.dims) count *= n;
    switch (mode) {
      case LatentMode::GaussianNoise: {
        Rng rng(seed);
        lf.base = gaussian(rng, count, channels);
        break;
      }
      case LatentMode::Ones:
        lf.base = Mat(count, channels, 1.0);
        break;
      case LatentMode::Zeros:
        lf.base = Mat(count, channels, 0.0);
        break;
    }
    return lf;
  }

  index_t coord_dim() const { return static_cast<index_t>(dims.size()); }

  // Multilinear interpolation of the base field at coords in [-1,1]^d.
  Mat sample(const Mat& coords) const {
    const auto d = static_cast<std::size_t>(coords.cols);
    if (d != dims.size()) throw ShapeError("LatentField::sample: coordinate dim mismatch");
    Mat out(coords.rows, channels);
    std::vector<index_t> lo(d), hi(d);
    std::vector<double> frac(d);
    std::vector<index_t> stride(d, 1);
    for (std::size_t a = 1; a < d; ++a) stride[a] = stride[a - 1] * dims[a - 1];
    const index_t corners = index_t{1} << d;
    for (index_t r = 0; r < coords.rows; ++r) {
      for (std::size_t a = 0; a < d; ++a) {
        const index_t n = dims[a];
        const double u = (coords(r, static_cast<index_t>(a)) + 1.0) * 0.5 * n - 0.5;
        double fl = std::floor(u);
        index_t k = static_cast<index_t>(fl);
        double f = u - fl;
        if (k < 0) { k = 0; f = 0.0; }
        if (k >= n - 1) { k = n - 1; f = 0.0; }
        lo[a] = k;
        hi[a] = std::min(k + 1, n - 1);
        frac[a] = f;
      }
      for (index_t c = 0; c < channels; ++c) {
        double acc = 0.0;
        for (index_t m = 0; m < corners; ++m) {
          double w = 1.0;
          index_t idx = 0;
          for (std::size_t a = 0; a < d; ++a) {
            const bool up = (m >> a) & 1;
            w *= up ? frac[a] : 1.0 - frac[a];
            idx += (up ? hi[a] : lo[a]) * stride[a];
          }
          if (w != 0.0) acc += w * base(idx, c);
        }
        out(r, c) = acc;
      }
    }
    return out;
  }
};

}  // namespace iinr
