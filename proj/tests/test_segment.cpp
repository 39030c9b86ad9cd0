#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mts/segment.hpp"

using namespace mts;

TEST_CASE("rotated hsv conversion") {
  SUBCASE("pure red lands on the rotated center") {
    const Vec3 hsv = rgb_to_rotated_hsv(Vec3(1, 0, 0));
    CHECK(hsv.x() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(hsv.y() == doctest::Approx(1.0));
    CHECK(hsv.z() == doctest::Approx(1.0));
  }
  SUBCASE("gray hue uses the degenerate convention") {
    const Vec3 hsv = rgb_to_rotated_hsv(Vec3(0.5, 0.5, 0.5));
    CHECK(hsv.x() == doctest::Approx(0.25));
    CHECK(hsv.y() == doctest::Approx(0.0));
    CHECK(hsv.z() == doctest::Approx(0.5));
  }
  SUBCASE("red-adjacent hues are continuous after rotation") {
    // hue 350 and hue 10 sit 0.0556 apart instead of wrapping.
    auto rgb_of_hue = [](double hue_deg) {
      // s=1, v=1 for hues in the red neighborhood
      const double h = hue_deg / 60.0;
      const double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
      if (hue_deg < 60.0) return Vec3(1.0, x, 0.0);
      return Vec3(1.0, 0.0, x);  // 300..360
    };
    const Vec3 a = rgb_to_rotated_hsv(rgb_of_hue(350.0));
    const Vec3 b = rgb_to_rotated_hsv(rgb_of_hue(10.0));
    CHECK(a.x() == doctest::Approx(80.0 / 360.0).epsilon(1e-9));
    CHECK(b.x() == doctest::Approx(100.0 / 360.0).epsilon(1e-9));
    CHECK(std::abs(b.x() - a.x()) == doctest::Approx(0.0556).epsilon(1e-3));
  }
  SUBCASE("channels stay in range on random inputs") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      const Vec3 hsv = rgb_to_rotated_hsv(Vec3(u(rng), u(rng), u(rng)));
      CHECK(hsv.x() >= 0.0);
      CHECK(hsv.x() < 1.0);
      CHECK(hsv.y() >= 0.0);
      CHECK(hsv.y() <= 1.0);
      CHECK(hsv.z() >= 0.0);
      CHECK(hsv.z() <= 1.0);
    }
  }
}

TEST_CASE("gaussian density closed-form values") {
  SegmentationModel m;
  m.mean = Vec3(0.25, 0.5, 0.5);
  m.variance = Vec3(1, 1, 1);
  m.tau = 1e-9;
  const double peak = std::pow(2 * kPi, -1.5);
  CHECK(gaussian_density(m.mean, m) == doctest::Approx(peak).epsilon(1e-12));
  CHECK(gaussian_density(m.mean + Vec3(1, 0, 0), m) ==
        doctest::Approx(peak * std::exp(-0.5)).epsilon(1e-12));
  SegmentationModel tight = m;
  tight.variance = Vec3(0.25, 0.25, 0.25);
  CHECK(gaussian_density(tight.mean, tight) == doctest::Approx(8 * peak).epsilon(1e-12));
}

TEST_CASE("gaussian density matches an extended-precision oracle") {
  const SegmentationModel m = SegmentationModel::from_mahalanobis_radius(
      Vec3(0.25, 0.9, 0.9), Vec3(0.004, 0.04, 0.04), 3.0);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 x(u(rng), u(rng), u(rng));
    const long double det = (long double)m.variance.x() * m.variance.y() * m.variance.z();
    long double q = 0.0L;
    for (int k = 0; k < 3; ++k) {
      const long double d = (long double)x(k) - m.mean(k);
      q += d * d / (long double)m.variance(k);
    }
    const long double ref =
        powl(2.0L * 3.14159265358979323846264338327950288L, -1.5L) / sqrtl(det) *
        expl(-0.5L * q);
    const double got = gaussian_density(x, m);
    CHECK(std::abs(got - (double)ref) <= 1e-12 * std::abs((double)ref));
  }
}

TEST_CASE("segment thresholds against the peak") {
  const Vec3 target_rgb(0.9, 0.09, 0.09);
  Image img(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) img.set(x, y, target_rgb);

  SegmentationModel m = SegmentationModel::from_mahalanobis_radius(
      Vec3(0.25, 0.9, 0.9), Vec3(0.004, 0.04, 0.04), 3.0);
  const Mask all = segment(img, m);
  CHECK(target_score(all) == 1.0);

  m.tau = m.peak_density() * 1.01;  // above the peak: nothing can pass
  const Mask none = segment(img, m);
  CHECK(target_score(none) == 0.0);
}

TEST_CASE("segment equals the Mahalanobis-threshold oracle exactly") {
  const SegmentationModel m = SegmentationModel::from_mahalanobis_radius(
      Vec3(0.25, 0.9, 0.9), Vec3(0.004, 0.04, 0.04), 3.0);
  // Algebraically equivalent cut: d^2 <= -2 ln(tau (2pi)^{3/2} |Sigma|^{1/2}).
  const double det = m.variance.prod();
  const double cut = -2.0 * std::log(m.tau * std::pow(2 * kPi, 1.5) * std::sqrt(det));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int w = 100, h = 100;  // 10,000 random pixels
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      // Mix uniform colors with near-target colors so both branches are hit.
      if ((x + y) % 2 == 0)
        img.set(x, y, Vec3(u(rng), u(rng), u(rng)));
      else
        img.set(x, y, Vec3(0.9 + 0.02 * (u(rng) - 0.5), 0.09 + 0.02 * (u(rng) - 0.5),
                           0.09 + 0.02 * (u(rng) - 0.5)));
    }
  const Mask mask = segment(img, m);
  int target_pixels = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      const bool oracle = m.mahalanobis_sq(rgb_to_rotated_hsv(img.at(x, y))) <= cut;
      CHECK(mask.at(x, y) == oracle);
      target_pixels += oracle;
    }
  CHECK(target_pixels > 1000);  // both classes exercised
  CHECK(target_pixels < 9000);
}

TEST_CASE("target_score arithmetic") {
  Mask m(64, 64);
  CHECK(target_score(m) == 0.0);
  for (int i = 0; i < 1024; ++i) m.bits[static_cast<std::size_t>(i * 4)] = 1;
  CHECK(target_score(m) == doctest::Approx(0.25).epsilon(1e-15));
  std::fill(m.bits.begin(), m.bits.end(), 1);
  CHECK(target_score(m) == 1.0);
}

TEST_CASE("centroid") {
  Mask m(32, 32);
  CHECK(!centroid(m).has_value());
  m.set(10, 20, true);
  auto c = centroid(m);
  REQUIRE(c.has_value());
  CHECK(c->x() == 10.0);
  CHECK(c->y() == 20.0);

  // Centrally symmetric blob centers on the middle of the index range.
  Mask blob(32, 32);
  for (int y = 10; y < 22; ++y)
    for (int x = 8; x < 24; ++x) blob.set(x, y, true);
  c = centroid(blob);
  REQUIRE(c.has_value());
  CHECK(c->x() == doctest::Approx(15.5));
  CHECK(c->y() == doctest::Approx(15.5));
}

TEST_CASE("segmentation is pixel-wise independent under permutation") {
  const SegmentationModel m = SegmentationModel::from_mahalanobis_radius(
      Vec3(0.25, 0.9, 0.9), Vec3(0.004, 0.04, 0.04), 3.0);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int w = 24, h = 24;
  Image img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      img.set(x, y, (x * y) % 3 ? Vec3(u(rng), u(rng), u(rng)) : Vec3(0.9, 0.09, 0.09));

  std::vector<int> perm(w * h);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);

  Image shuffled(w, h);
  for (int i = 0; i < w * h; ++i)
    shuffled.set(perm[i] % w, perm[i] / w, img.at(i % w, i / w));

  const Mask direct = segment(img, m);
  const Mask via = segment(shuffled, m);
  for (int i = 0; i < w * h; ++i)
    CHECK(direct.at(i % w, i / w) == via.at(perm[i] % w, perm[i] / w));
  // Pixel count (and so the score) is permutation invariant.
  CHECK(target_score(direct) == target_score(via));
}
