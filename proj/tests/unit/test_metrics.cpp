#include "iinr/metrics.hpp"
#include "iinr/rng.hpp"

#include "oracles.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>

using namespace iinr;

TEST_CASE("psnr spot values") {
  Mat a(10, 1, 0.0), b(10, 1, 0.0);
  REQUIRE(psnr(a, a) == 100.0);  // identical -> cap
  b.fill(0.1);
  REQUIRE(psnr(a, b) == Catch::Approx(20.0).margin(1e-12));  // mse 0.01
  b.fill(1.0);
  REQUIRE(psnr(a, b) == Catch::Approx(0.0).margin(1e-12));  // mse 1
}

TEST_CASE("psnr clamps inputs to [0,1] before comparing") {
  Mat a(4, 1, 1.4);  // clamps to 1
  Mat b(4, 1, 1.0);
  REQUIRE(psnr(a, b) == 100.0);
}

TEST_CASE("psnr decreases as mse grows") {
  Rng rng(51);
  Mat a = gaussian(rng, 50, 1);
  for (auto& v : a.data) v = clamp01(std::abs(v) * 0.3);
  double prev = 101.0;
  for (double noise : {0.01, 0.05, 0.1, 0.3}) {
    Mat b = a;
    for (auto& v : b.data) v = clamp01(v + noise);
    const double p = psnr(a, b);
    REQUIRE(p < prev);
    prev = p;
  }
}

TEST_CASE("ssim of identical images is exactly one") {
  Rng rng(52);
  Mat img(32 * 32, 3);
  for (auto& v : img.data) v = rng.uniform();
  REQUIRE(ssim(img, img, 32, 32) == 1.0);
}

TEST_CASE("ssim constant-vs-constant closed form") {
  Mat a(16 * 16, 1, 0.0), b(16 * 16, 1, 1.0);
  // stabilizer-only ratio: C1/(1+C1) * C2/C2 = 1e-4 / 1.0001
  const double expected = 1e-4 / (1.0 + 1e-4);
  REQUIRE(ssim(a, b, 16, 16) == Catch::Approx(expected).epsilon(1e-9));
  REQUIRE(oracle::ssim_naive(a, b, 16, 16) == Catch::Approx(expected).epsilon(1e-9));
}

TEST_CASE("ssim is symmetric and bounded") {
  Rng rng(53);
  Mat a(20 * 20, 1), b(20 * 20, 1);
  for (auto& v : a.data) v = rng.uniform();
  for (auto& v : b.data) v = rng.uniform();
  const double s1 = ssim(a, b, 20, 20);
  const double s2 = ssim(b, a, 20, 20);
  REQUIRE(s1 == Catch::Approx(s2).margin(1e-12));
  REQUIRE(s1 >= -1.0);
  REQUIRE(s1 <= 1.0);
}

TEST_CASE("ssim rejects images smaller than the window") {
  Mat a(10 * 10, 1, 0.5);
  REQUIRE_THROWS_AS(ssim(a, a, 10, 10), std::domain_error);
}

TEST_CASE("optimized ssim agrees with the naive double loop within 1e-9") {
  Rng rng(54);
  for (int trial = 0; trial < 20; ++trial) {
    Mat a(32 * 32, trial % 2 ? 3 : 1), b(32 * 32, trial % 2 ? 3 : 1);
    for (auto& v : a.data) v = rng.uniform();
    for (auto& v : b.data) v = clamp01(rng.uniform() * 0.5 + 0.25);
    const double fast = ssim(a, b, 32, 32);
    const double slow = oracle::ssim_naive(a, b, 32, 32);
    REQUIRE(std::abs(fast - slow) < 1e-9);
  }
}

TEST_CASE("iou closed-form cases") {
  Mat a(100, 1, 1.0), b(100, 1, 1.0);
  REQUIRE(iou(a, b) == 1.0);  // identical
  Mat c(100, 1, 0.0);
  for (int i = 0; i < 50; ++i) c(i, 0) = 1.0;
  Mat d(100, 1, 0.0);
  for (int i = 50; i < 100; ++i) d(i, 0) = 1.0;
  REQUIRE(iou(c, d) == 0.0);  // disjoint nonempty
  // pred is a 50-element subset of a 100-element gt
  Mat gt(200, 1, 0.0), pred(200, 1, 0.0);
  for (int i = 0; i < 100; ++i) gt(i, 0) = 1.0;
  for (int i = 0; i < 50; ++i) pred(i, 0) = 1.0;
  REQUIRE(iou(pred, gt) == 0.5);
  // both empty
  Mat e(10, 1, 0.0);
  REQUIRE(iou(e, e) == 1.0);
}

TEST_CASE("iou is invariant under simultaneous permutation") {
  Rng rng(55);
  Mat a(64, 1), b(64, 1);
  for (auto& v : a.data) v = rng.uniform();
  for (auto& v : b.data) v = rng.uniform();
  const double base = iou(a, b);
  std::vector<index_t> perm(64);
  for (index_t i = 0; i < 64; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(7));
  Mat ap(64, 1), bp(64, 1);
  for (index_t i = 0; i < 64; ++i) {
    ap(i, 0) = a(perm[i], 0);
    bp(i, 0) = b(perm[i], 0);
  }
  REQUIRE(iou(ap, bp) == base);
}

TEST_CASE("metric functions reject shape mismatches") {
  Mat a(4, 1), b(5, 1);
  REQUIRE_THROWS_AS(psnr(a, b), ShapeError);
  REQUIRE_THROWS_AS(iou(a, b), ShapeError);
  REQUIRE_THROWS_AS(mse(a, b), ShapeError);
}
