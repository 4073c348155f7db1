#pragma once

// Builders for the four experiment families. Coordinates follow the
// pixel-center convention (2i+1)/N - 1 on every axis, so grids of different
// resolutions stay aligned (the property super-resolution queries rely on).
// Image targets live in [0,1]; occupancy labels in {0,1}. The denoising
// train target is the corrupted observation and may exceed 1 (photon counts
// fluctuate above the mean); metrics clamp at evaluation time instead.

#include "iinr/image.hpp"
#include "iinr/metrics.hpp"
#include "iinr/rng.hpp"
#include "iinr/tensor.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace iinr {

enum class TaskKind { Fit, SuperRes, Denoise, Occupancy };

inline const char* task_kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Fit: return "fit";
    case TaskKind::SuperRes: return "sr";
    case TaskKind::Denoise: return "denoise";
    case TaskKind::Occupancy: return "occupancy";
  }
  return "?";
}

struct SignalTask {
  TaskKind kind = TaskKind::Fit;
  index_t scale = 1;  // SuperRes upscale factor
  index_t coord_dim = 2;
  index_t channels = 1;
  Mat train_coords, train_target;
  Mat eval_coords, eval_target;
  // Evaluation grid extents: {W, H} for images, {n, n, n} for occupancy.
  std::vector<index_t> eval_dims;
  // Training grid extents (used to size latent fields).
  std::vector<index_t> train_dims;
};

// Pixel-center coordinate grid in [-1,1]^2, row-major (y outer, x inner),
// columns (x, y).
inline Mat pixel_center_grid(index_t height, index_t width) {
  Mat coords(height * width, 2);
  for (index_t y = 0; y < height; ++y)
    for (index_t x = 0; x < width; ++x) {
      const index_t r = y * width + x;
      coords(r, 0) = (2.0 * static_cast<double>(x) + 1.0) / static_cast<double>(width) - 1.0;
      coords(r, 1) = (2.0 * static_cast<double>(y) + 1.0) / static_cast<double>(height) - 1.0;
    }
  return coords;
}

// Regular 3D grid, n^3 rows, x fastest, columns (x, y, z).
inline Mat voxel_center_grid(index_t n) {
  Mat coords(n * n * n, 3);
  index_t r = 0;
  for (index_t z = 0; z < n; ++z)
    for (index_t y = 0; y < n; ++y)
      for (index_t x = 0; x < n; ++x, ++r) {
        coords(r, 0) = (2.0 * static_cast<double>(x) + 1.0) / static_cast<double>(n) - 1.0;
        coords(r, 1) = (2.0 * static_cast<double>(y) + 1.0) / static_cast<double>(n) - 1.0;
        coords(r, 2) = (2.0 * static_cast<double>(z) + 1.0) / static_cast<double>(n) - 1.0;
      }
  return coords;
}

inline SignalTask make_fit_task(const ImageBuffer& img) {
  if (img.width < 1 || img.height < 1) throw std::invalid_argument("make_fit_task: empty image");
  SignalTask t;
  t.kind = TaskKind::Fit;
  t.coord_dim = 2;
  t.channels = img.channels;
  t.train_coords = pixel_center_grid(img.height, img.width);
  t.train_target = image_to_mat(img);
  t.eval_coords = t.train_coords;
  t.eval_target = t.train_target;
  t.eval_dims = {img.width, img.height};
  t.train_dims = t.eval_dims;
  return t;
}

// Train on the box-downsampled image at its own grid; evaluate on the
// full-resolution grid against the original. scale 4 stresses generalization
// with a query grid 4x denser per axis than the training grid.
inline SignalTask make_sr_task(const ImageBuffer& img, index_t scale) {
  if (scale != 2 && scale != 4) throw std::invalid_argument("make_sr_task: scale must be 2 or 4");
  if (img.width % scale != 0 || img.height % scale != 0)
    throw std::invalid_argument("make_sr_task: image dims not divisible by scale");
  const ImageBuffer low = box_downsample(img, scale);
  SignalTask t;
  t.kind = TaskKind::SuperRes;
  t.scale = scale;
  t.coord_dim = 2;
  t.channels = img.channels;
  t.train_coords = pixel_center_grid(low.height, low.width);
  t.train_target = image_to_mat(low);
  t.eval_coords = pixel_center_grid(img.height, img.width);
  t.eval_target = image_to_mat(img);
  t.eval_dims = {img.width, img.height};
  t.train_dims = {low.width, low.height};
  return t;
}

// Poisson photon noise plus Gaussian readout noise, both applied in the
// photon domain: noisy = max(0, Poisson(I*max_photons) + N(0, readout)) /
// max_photons. The clean image is kept as the evaluation target, so metrics
// measure restoration.
inline SignalTask make_denoise_task(const ImageBuffer& img, Rng& rng, double max_photons = 30.0,
                                    double readout = 2.0) {
  if (max_photons <= 0.0) throw std::invalid_argument("make_denoise_task: max_photons <= 0");
  SignalTask t = make_fit_task(img);
  t.kind = TaskKind::Denoise;
  Mat noisy(t.train_target.rows, t.train_target.cols);
  for (std::size_t i = 0; i < noisy.data.size(); ++i) {
    const double photons = static_cast<double>(poisson(rng, t.train_target.data[i] * max_photons));
    const double observed = photons + readout * rng.normal();
    noisy.data[i] = std::max(0.0, observed) / max_photons;
  }
  t.train_target = noisy;
  return t;
}

struct OccupancyShape {
  enum class Kind { Sphere, Torus, Box, VoxelGrid };
  Kind kind = Kind::Sphere;
  double radius = 0.5;        // sphere; torus tube radius
  double major_radius = 0.6;  // torus center-line radius
  std::array<double, 3> half_extents{0.5, 0.5, 0.5};
  std::array<index_t, 3> vox_dims{0, 0, 0};
  std::vector<std::uint8_t> vox_bits;  // packed row-major, LSB first

  static OccupancyShape sphere(double r) {
    OccupancyShape s;
    s.kind = Kind::Sphere;
    s.radius = r;
    return s;
  }
  static OccupancyShape torus(double major, double tube) {
    OccupancyShape s;
    s.kind = Kind::Torus;
    s.major_radius = major;
    s.radius = tube;
    return s;
  }
  static OccupancyShape box(double hx, double hy, double hz) {
    OccupancyShape s;
    s.kind = Kind::Box;
    s.half_extents = {hx, hy, hz};
    return s;
  }
  static OccupancyShape voxel_grid(std::array<index_t, 3> dims, std::vector<std::uint8_t> bits) {
    OccupancyShape s;
    s.kind = Kind::VoxelGrid;
    s.vox_dims = dims;
    s.vox_bits = std::move(bits);
    const std::size_t need =
        (static_cast<std::size_t>(dims[0]) * dims[1] * dims[2] + 7) / 8;
    if (s.vox_bits.size() < need)
      throw std::invalid_argument("voxel_grid: bitset shorter than dims imply");
    return s;
  }

  bool contains(double x, double y, double z) const {
    switch (kind) {
      case Kind::Sphere:
        return x * x + y * y + z * z <= radius * radius;
      case Kind::Torus: {
        const double q = std::sqrt(x * x + y * y) - major_radius;
        return q * q + z * z <= radius * radius;
      }
      case Kind::Box:
        return std::abs(x) <= half_extents[0] && std::abs(y) <= half_extents[1] &&
               std::abs(z) <= half_extents[2];
      case Kind::VoxelGrid: {
        const auto cell = [](double v, index_t n) {
          auto k = static_cast<index_t>(std::floor((v + 1.0) * 0.5 * static_cast<double>(n)));
          return k < 0 ? index_t{0} : (k >= n ? n - 1 : k);
        };
        const index_t ix = cell(x, vox_dims[0]);
        const index_t iy = cell(y, vox_dims[1]);
        const index_t iz = cell(z, vox_dims[2]);
        const std::size_t idx =
            static_cast<std::size_t>((iz * vox_dims[1] + iy) * vox_dims[0] + ix);
        return (vox_bits[idx / 8] >> (idx % 8)) & 1;
      }
    }
    return false;
  }
};

// Stratified sampling: one jittered point per cell of the largest g^3 grid
// with g^3 <= count, then uniform fill for the remainder.
inline Mat stratified_points(Rng& rng, index_t count) {
  Mat pts(count, 3);
  index_t g = static_cast<index_t>(std::cbrt(static_cast<double>(count)));
  while ((g + 1) * (g + 1) * (g + 1) <= count) ++g;
  index_t r = 0;
  for (index_t z = 0; z < g && r < count; ++z)
    for (index_t y = 0; y < g && r < count; ++y)
      for (index_t x = 0; x < g && r < count; ++x, ++r) {
        pts(r, 0) = 2.0 * (static_cast<double>(x) + rng.uniform()) / static_cast<double>(g) - 1.0;
        pts(r, 1) = 2.0 * (static_cast<double>(y) + rng.uniform()) / static_cast<double>(g) - 1.0;
        pts(r, 2) = 2.0 * (static_cast<double>(z) + rng.uniform()) / static_cast<double>(g) - 1.0;
      }
  for (; r < count; ++r)
    for (index_t c = 0; c < 3; ++c) pts(r, c) = rng.uniform(-1.0, 1.0);
  return pts;
}

inline SignalTask make_occupancy_task(const OccupancyShape& shape, index_t train_samples,
                                      index_t eval_grid, Rng& rng) {
  if (train_samples < 1 || eval_grid < 1)
    throw std::invalid_argument("make_occupancy_task: counts must be >= 1");
  SignalTask t;
  t.kind = TaskKind::Occupancy;
  t.coord_dim = 3;
  t.channels = 1;
  t.train_coords = stratified_points(rng, train_samples);
  t.train_target = Mat(train_samples, 1);
  for (index_t r = 0; r < train_samples; ++r)
    t.train_target(r, 0) =
        shape.contains(t.train_coords(r, 0), t.train_coords(r, 1), t.train_coords(r, 2)) ? 1.0
                                                                                         : 0.0;
  t.eval_coords = voxel_center_grid(eval_grid);
  t.eval_target = Mat(t.eval_coords.rows, 1);
  for (index_t r = 0; r < t.eval_coords.rows; ++r)
    t.eval_target(r, 0) =
        shape.contains(t.eval_coords(r, 0), t.eval_coords(r, 1), t.eval_coords(r, 2)) ? 1.0 : 0.0;
  t.eval_dims = {eval_grid, eval_grid, eval_grid};
  t.train_dims = t.eval_dims;
  return t;
}

// Metrics for a raw prediction at the task's evaluation coordinates.
// Predictions are clamped to [0,1] here; training never clamps.
inline MetricReport evaluate_prediction(const SignalTask& task, const Mat& pred) {
  require_shape(pred.same_shape(task.eval_target), "evaluate_prediction");
  MetricReport rep;
  const Mat p = clamped01(pred);
  if (task.kind == TaskKind::Occupancy) {
    rep.iou = iou(p, task.eval_target);
    rep.mse = mse(p, task.eval_target);
    return rep;
  }
  const Mat g = clamped01(task.eval_target);
  rep.mse = mse(p, g);
  rep.psnr = psnr(p, g);
  const index_t w = task.eval_dims[0], h = task.eval_dims[1];
  if (h >= 11 && w >= 11) rep.ssim = ssim(p, g, h, w);
  return rep;
}

// Voxel-grid file format: ASCII header line "VOX <nx> <ny> <nz>\n" followed
// by the packed row-major bitset (LSB-first within each byte).
inline OccupancyShape load_voxel_grid(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("voxel grid: missing header");
  std::istringstream hdr(line);
  std::string magic;
  long nx = 0, ny = 0, nz = 0;
  hdr >> magic >> nx >> ny >> nz;
  if (magic != "VOX" || nx < 1 || ny < 1 || nz < 1)
    throw std::runtime_error("voxel grid: bad header '" + line + "'");
  std::vector<std::uint8_t> bits((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  return OccupancyShape::voxel_grid({nx, ny, nz}, std::move(bits));
}

inline void save_voxel_grid(const std::string& path, const OccupancyShape& shape) {
  if (shape.kind != OccupancyShape::Kind::VoxelGrid)
    throw std::invalid_argument("save_voxel_grid: not a voxel grid");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "VOX " << shape.vox_dims[0] << " " << shape.vox_dims[1] << " " << shape.vox_dims[2]
      << "\n";
  out.write(reinterpret_cast<const char*>(shape.vox_bits.data()),
            static_cast<std::streamsize>(shape.vox_bits.size()));
}

}  // namespace iinr
