#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "dpnash/philox.hpp"
#include "dpnash/privacy.hpp"

using namespace dpnash;

namespace {

double laplace_cdf(double x, double scale) {
  return x < 0.0 ? 0.5 * std::exp(x / scale)
                 : 1.0 - 0.5 * std::exp(-x / scale);
}

// Two-sided Kolmogorov-Smirnov distance against a reference CDF.
double ks_distance(std::vector<double> xs, double scale) {
  std::sort(xs.begin(), xs.end());
  const double n = double(xs.size());
  double worst = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double f = laplace_cdf(xs[i], scale);
    worst = std::max(worst, std::abs(f - double(i + 1) / n));
    worst = std::max(worst, std::abs(f - double(i) / n));
  }
  return worst;
}

}  // namespace

TEST_CASE("counter cipher reproduces the published test vectors") {
  {
    const auto out = philox4x32_10({0, 0, 0, 0}, {0, 0});
    CHECK(out[0] == 0x6627e8d5u);
    CHECK(out[1] == 0xe169c58du);
    CHECK(out[2] == 0xbc57ac4cu);
    CHECK(out[3] == 0x9b00dbd8u);
  }
  {
    const auto out = philox4x32_10(
        {0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
        {0xffffffffu, 0xffffffffu});
    CHECK(out[0] == 0x408f276du);
    CHECK(out[1] == 0x41c83b0eu);
    CHECK(out[2] == 0xa20bc7c6u);
    CHECK(out[3] == 0x6d5451fdu);
  }
  {
    const auto out = philox4x32_10(
        {0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
        {0xa4093822u, 0x299f31d0u});
    CHECK(out[0] == 0xd16cfe09u);
    CHECK(out[1] == 0x94fdccebu);
    CHECK(out[2] == 0x5001e420u);
    CHECK(out[3] == 0x24126ea1u);
  }
}

TEST_CASE("uniform mapping lands strictly inside (0, 1)") {
  CHECK(uniform_open01(0u, 0u) > 0.0);
  CHECK(uniform_open01(0xffffffffu, 0xffffffffu) < 1.0);
  // Top bit set: ((2^63 >> 11) + 0.5) * 2^-53 = 0.5 + 2^-54, never exactly 1/2.
  CHECK(uniform_open01(0x80000000u, 0u) == 0.5 + 0x1.0p-53);
}

TEST_CASE("draws are reproducible coordinates, not stream state") {
  NoiseParams params;
  params.d = 1.0;
  params.q_bar = 0.99;
  const NoiseStream a(params, 42, 7);
  const NoiseStream b(params, 42, 7);

  // Query order is irrelevant.
  const double late = a.draw(3, 100);
  CHECK(b.draw(3, 100) == late);
  CHECK(a.draw(0, 0) == b.draw(0, 0));

  // Any coordinate change decorrelates the draw.
  const NoiseStream other_seed(params, 43, 7);
  const NoiseStream other_replica(params, 42, 8);
  CHECK(a.draw(0, 0) != other_seed.draw(0, 0));
  CHECK(a.draw(0, 0) != other_replica.draw(0, 0));
  CHECK(a.draw(0, 0) != a.draw(1, 0));
  CHECK(a.draw(0, 0) != a.draw(0, 1));
}

TEST_CASE("scale decays geometrically and d = 0 silences the stream") {
  NoiseParams params;
  params.d = 2.0;
  params.q_bar = 0.9;
  const NoiseStream ns(params, 1);
  CHECK(ns.scale_at(0) == 2.0);
  CHECK(ns.scale_at(3) == doctest::Approx(2.0 * 0.729).epsilon(1e-15));
  CHECK(ns.draw(0, 5) == ns.scale_at(5) * ns.unit_draw(0, 5));

  NoiseParams off;
  off.d = 0.0;
  const NoiseStream silent(off, 1);
  for (int k = 0; k < 10; ++k) CHECK(silent.draw(0, k) == 0.0);
}

TEST_CASE("unit draws follow the unit double-exponential distribution") {
  NoiseParams params;
  params.d = 1.0;
  params.q_bar = 0.99;
  const int n = 200000;
  std::vector<double> xs(n);
  double mean = 0.0, var = 0.0;
  for (int r = 0; r < n; ++r) {
    const NoiseStream ns(params, 2024, std::uint64_t(r));
    xs[r] = ns.unit_draw(0, 0);
    mean += xs[r];
  }
  mean /= n;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= n - 1;

  // alpha = 0.001 Kolmogorov quantile: 1.94947 / sqrt(n)
  CHECK(ks_distance(xs, 1.0) < 1.94947 / std::sqrt(double(n)));
  CHECK(std::abs(mean) < 0.02);
  CHECK(var == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("budget formula and its inverse") {
  // 2 * 1 * 24.75 * 0.99 / (1 * 0.09)
  CHECK(epsilon_of(1.0, 0.9, 1.0, 0.99, 24.75) ==
        doctest::Approx(544.5).epsilon(1e-12));
  // At these parameters the budget is exactly 22 gradient-bounds.
  CHECK(epsilon_of(1.0, 0.9, 1.0, 0.99, 24.75) / 24.75 ==
        doctest::Approx(22.0).epsilon(1e-12));

  // Round trip d -> epsilon -> d across scales.
  for (double d : {0.01, 0.5, 1.0, 3.0, 250.0}) {
    const double eps = epsilon_of(0.7, 0.85, d, 0.97, 11.0);
    const double back = scale_for_epsilon(0.7, 0.85, 0.97, 11.0, eps);
    CHECK(back == doctest::Approx(d).epsilon(1e-12));
  }
}

TEST_CASE("budget requires noise and a decay gap") {
  CHECK_THROWS_AS(epsilon_of(1.0, 0.9, 0.0, 0.99, 24.75), ValidationError);
  try {
    epsilon_of(1.0, 0.99, 1.0, 0.9, 24.75);
    FAIL_CHECK("expected rejection of q_bar <= q");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("q_bar") != std::string::npos);
  }

  NoiseParams params;
  params.d = -1.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
  params.d = 1.0;
  params.q_bar = 1.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
  params.q_bar = 0.0;
  CHECK_THROWS_AS(params.validate(), ValidationError);
}
