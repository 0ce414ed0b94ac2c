#include <cmath>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "kamtori/diophantine.hpp"
#include "oracles.hpp"

using namespace kamtori;
using kamtori::testing::brute_force;

namespace {

const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;

}  // namespace

TEST_CASE("resonant vector fails with its witness") {
  const auto r = check_diophantine({1.0, 2.0}, 1e-6, 1.5, 5);
  CHECK_FALSE(r.passed);
  CHECK(r.min_value == 0.0);
  CHECK(std::abs(r.worst_k[0] * 1.0 + r.worst_k[1] * 2.0) == 0.0);
  CHECK(estimate_gamma({1.0, 2.0}, 1.5, 5) == 0.0);
  CHECK_THROWS_AS(FrequencyVector::verified({1.0, 2.0}, 1e-6, 1.5, 5), std::invalid_argument);
  try {
    FrequencyVector::verified({1.0, 2.0}, 1e-6, 1.5, 5);
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("k = (2,-1)") != std::string::npos);
  }
}

TEST_CASE("golden mean scan matches the independent oracle exactly") {
  const double est = estimate_gamma({kGolden}, 1.0, 10000);
  CHECK(est == brute_force({kGolden}, 1.0, 10000));
  CHECK(est > 0.0);
  const auto pass = check_diophantine({kGolden}, est * 0.999, 1.0, 10000);
  CHECK(pass.passed);
  CHECK_FALSE(check_diophantine({kGolden}, est * 1.001, 1.0, 10000).passed);
  const auto at = check_diophantine({kGolden}, est, 1.0, 10000);
  CHECK(at.passed);
  CHECK(at.margin == 0.0);
  const double k = at.worst_k[0];
  CHECK(std::abs(k * kGolden - at.nearest_integer) * k == est);
}

TEST_CASE("two-dimensional scan matches brute force") {
  const std::vector<double> w{1.0, kGolden};
  for (long h : {5L, 40L, 200L}) CHECK(estimate_gamma(w, 1.5, h) == brute_force(w, 1.5, h));
}

TEST_CASE("monotonicity in horizon and sigma") {
  CHECK(estimate_gamma({kGolden}, 1.0, 10000) <= estimate_gamma({kGolden}, 1.0, 1000));
  const std::vector<double> w{1.0, std::sqrt(2.0)};
  CHECK(estimate_gamma(w, 1.5, 300) <= estimate_gamma(w, 1.5, 100));
  CHECK(estimate_gamma(w, 1.2, 100) <= estimate_gamma(w, 1.5, 100));
  CHECK(estimate_gamma(w, 1.5, 100) <= estimate_gamma(w, 2.5, 100));
}

TEST_CASE("homogeneity for n = 2") {
  const std::vector<double> w{1.0, kGolden};
  const double g = estimate_gamma(w, 1.5, 60) * 0.9;
  for (double c : {0.5, 3.0}) {
    const auto a = check_diophantine(w, g, 1.5, 60);
    const auto b = check_diophantine({c * w[0], c * w[1]}, c * g, 1.5, 60);
    CHECK(a.passed == b.passed);
    CHECK(a.worst_k == b.worst_k);
    CHECK(b.min_value == doctest::Approx(c * a.min_value).epsilon(1e-12));
  }
}

TEST_CASE("input validation") {
  CHECK_THROWS_AS(check_diophantine({1.0, kGolden}, 0.1, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(check_diophantine({0.0, 0.0}, 0.1, 1.5, 10), std::invalid_argument);
  CHECK_THROWS_AS(check_diophantine({kGolden}, 0.0, 1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(check_diophantine({kGolden}, 0.1, 1.0, 0), std::invalid_argument);
}

TEST_CASE("thread count does not change the result") {
  const std::vector<double> w{1.0, std::sqrt(3.0)};
  setenv("KAMTORI_THREADS", "1", 1);
  const auto a = scan_diophantine(w, 1.3, 150);
  setenv("KAMTORI_THREADS", "7", 1);
  const auto b = scan_diophantine(w, 1.3, 150);
  unsetenv("KAMTORI_THREADS");
  CHECK(a.min_value == b.min_value);
  CHECK(a.worst_k == b.worst_k);
}
