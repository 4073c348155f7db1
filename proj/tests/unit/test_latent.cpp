#include "iinr/latent.hpp"
#include "iinr/tasks.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace iinr;

TEST_CASE("constant latent modes") {
  const auto ones = LatentField::make(LatentMode::Ones, 9, {4, 4}, 3);
  const auto zeros = LatentField::make(LatentMode::Zeros, 9, {4, 4}, 3);
  const Mat coords = pixel_center_grid(4, 4);
  const Mat z1 = ones.sample(coords);
  const Mat z0 = zeros.sample(coords);
  for (double v : z1.data) REQUIRE(v == 1.0);
  for (double v : z0.data) REQUIRE(v == 0.0);
}

TEST_CASE("gaussian latent is fixed per seed and repeatable") {
  const auto a = LatentField::make(LatentMode::GaussianNoise, 31, {8, 8}, 1);
  const auto b = LatentField::make(LatentMode::GaussianNoise, 31, {8, 8}, 1);
  const Mat coords = pixel_center_grid(8, 8);
  REQUIRE(bit_equal(a.sample(coords), a.sample(coords)));
  REQUIRE(bit_equal(a.sample(coords), b.sample(coords)));
  const auto c = LatentField::make(LatentMode::GaussianNoise, 32, {8, 8}, 1);
  REQUIRE_FALSE(bit_equal(a.sample(coords), c.sample(coords)));
}

TEST_CASE("base-resolution queries recover the stored field") {
  const auto lf = LatentField::make(LatentMode::GaussianNoise, 5, {6, 4}, 2);
  const Mat coords = pixel_center_grid(4, 6);  // H=4 rows, W=6 -> dims {6,4}
  const Mat z = lf.sample(coords);
  REQUIRE(z.rows == lf.base.rows);
  REQUIRE(max_abs_diff(z, lf.base) < 1e-12);
}

TEST_CASE("bilinear interpolation between two cells") {
  auto lf = LatentField::make(LatentMode::Zeros, 0, {2, 1}, 1);
  lf.base(0, 0) = 1.0;
  lf.base(1, 0) = 3.0;
  Mat coords(3, 2);
  coords(0, 0) = -0.5;  // center of cell 0
  coords(0, 1) = 0.0;
  coords(1, 0) = 0.5;  // center of cell 1
  coords(1, 1) = 0.0;
  coords(2, 0) = 0.0;  // midpoint
  coords(2, 1) = 0.0;
  const Mat z = lf.sample(coords);
  REQUIRE(z(0, 0) == Catch::Approx(1.0));
  REQUIRE(z(1, 0) == Catch::Approx(3.0));
  REQUIRE(z(2, 0) == Catch::Approx(2.0));
}

TEST_CASE("queries outside the grid clamp to the edge") {
  auto lf = LatentField::make(LatentMode::Zeros, 0, {2, 2}, 1);
  lf.base(0, 0) = 4.0;
  Mat coords(1, 2);
  coords(0, 0) = -5.0;
  coords(0, 1) = -5.0;
  REQUIRE(lf.sample(coords)(0, 0) == 4.0);
}

TEST_CASE("trilinear sampling matches the 3d grid layout") {
  const auto lf = LatentField::make(LatentMode::GaussianNoise, 77, {5, 5, 5}, 1);
  const Mat coords = voxel_center_grid(5);
  const Mat z = lf.sample(coords);
  REQUIRE(max_abs_diff(z, lf.base) < 1e-12);
}

TEST_CASE("dimension mismatch is rejected") {
  const auto lf = LatentField::make(LatentMode::Zeros, 0, {4, 4}, 1);
  Mat coords3(2, 3, 0.0);
  REQUIRE_THROWS_AS(lf.sample(coords3), ShapeError);
}
