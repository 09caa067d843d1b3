#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "bevkit/error.hpp"
#include "bevkit/semantic.hpp"

using namespace bevkit;
using doctest::Approx;

namespace {

// Independent calibration route used as the oracle: textbook softmax without
// max subtraction, then the affine rescale.
std::vector<double> calibrate_oracle(const std::vector<double>& raw, double T) {
  std::vector<double> s(raw.size());
  double z = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) z += std::exp(raw[i] / T);
  for (std::size_t i = 0; i < raw.size(); ++i) s[i] = std::exp(raw[i] / T) / z;
  const double lo = *std::min_element(s.begin(), s.end());
  const double hi = *std::max_element(s.begin(), s.end());
  if (hi - lo < 1e-12) return std::vector<double>(raw.size(), 0.5);
  for (double& v : s) v = (v - lo) / (hi - lo);
  return s;
}

}  // namespace

TEST_CASE("calibration on forced cases") {
  SUBCASE("constant input maps to 0.5 everywhere") {
    for (double c : {0.0, 0.3, 1.0}) {
      const auto out = calibrate_scores({c, c, c}, 1.0);
      for (double v : out) CHECK(v == 0.5);
    }
  }
  SUBCASE("two elements always span {0, 1}") {
    const auto out = calibrate_scores({0.0, 1.0}, 1.0);
    CHECK(out[0] == Approx(0.0));
    CHECK(out[1] == Approx(1.0));
  }
  SUBCASE("middle element lands strictly inside, matching the oracle") {
    const auto out = calibrate_scores({0.0, 0.5, 1.0}, 1.0);
    const auto expect = calibrate_oracle({0.0, 0.5, 1.0}, 1.0);
    CHECK(out[1] > 0.0);
    CHECK(out[1] < 1.0);
    for (int i = 0; i < 3; ++i) CHECK(out[i] == Approx(expect[i]).epsilon(1e-12));
  }
}

TEST_CASE("calibration input validation") {
  CHECK_THROWS_AS(calibrate_scores({}, 1.0), InputError);
  CHECK_THROWS_AS(calibrate_scores({0.5}, 0.0), InputError);
  CHECK_THROWS_AS(calibrate_scores({0.5}, -1.0), InputError);
}

TEST_CASE("calibration range and order preservation") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> temp(0.2, 4.0);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 30);
    std::vector<double> raw(n);
    for (double& v : raw) v = u(rng);
    const double T = temp(rng);
    const auto out = calibrate_scores(raw, T);
    const auto expect = calibrate_oracle(raw, T);
    double lo = 1e9, hi = -1e9;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      CHECK(out[i] >= 0.0);
      CHECK(out[i] <= 1.0);
      CHECK(out[i] == Approx(expect[i]).epsilon(1e-9));
      lo = std::min(lo, out[i]);
      hi = std::max(hi, out[i]);
      for (std::size_t j = 0; j < i; ++j) {
        if (raw[j] < raw[i]) CHECK(out[j] <= out[i] + 1e-12);
      }
    }
    const auto [rlo, rhi] = std::minmax_element(raw.begin(), raw.end());
    if (*rhi - *rlo > 1e-6) {
      CHECK(lo == Approx(0.0));
      CHECK(hi == Approx(1.0));
    }
  }
}

TEST_CASE("quality weights forced cases and floor") {
  CHECK(quality_weights({0.0}, 0.5).q[0] == Approx(0.5));
  CHECK(quality_weights({1.0}, 0.5).q[0] == Approx(1.0));
  const auto diversity_only = quality_weights({0.1, 0.7, 0.9}, 0.0);
  for (double v : diversity_only.q) CHECK(v == 1.0);

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 30; ++trial) {
    const double alpha = u(rng);
    std::vector<double> cal(8);
    for (double& v : cal) v = u(rng);
    const auto w = quality_weights(cal, alpha);
    for (double v : w.q) {
      CHECK(v >= 1.0 - alpha - 1e-15);
      CHECK(v <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("quality weights reject out-of-range alpha") {
  CHECK_THROWS_AS(quality_weights({0.5}, -0.1), InputError);
  CHECK_THROWS_AS(quality_weights({0.5}, 1.1), InputError);
}

TEST_CASE("keyword aggregation") {
  SUBCASE("single keyword is the identity") {
    const auto out = aggregate_keyword_scores({{0.2}, {0.9}, {0.4}});
    CHECK(out == std::vector<double>{0.2, 0.9, 0.4});
  }
  SUBCASE("max rule across keywords") {
    const auto out = aggregate_keyword_scores({{0.2, 0.7}});
    CHECK(out[0] == Approx(0.7));
  }
  SUBCASE("all-zero matrix stays zero") {
    const auto out = aggregate_keyword_scores({{0.0, 0.0}, {0.0, 0.0}});
    for (double v : out) CHECK(v == 0.0);
  }
  SUBCASE("clamped to [0, 1]") {
    const auto out = aggregate_keyword_scores({{1.4, -0.2}});
    CHECK(out[0] == 1.0);
  }
  CHECK_THROWS_AS(aggregate_keyword_scores({}), InputError);
  CHECK_THROWS_AS(aggregate_keyword_scores({{}}), InputError);
}
