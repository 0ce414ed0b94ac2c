#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kamtori/cohomology.hpp"
#include "kamtori/errors.hpp"

using namespace kamtori;

namespace {
const double kGolden = (std::sqrt(5.0) - 1.0) / 2.0;
}

TEST_CASE("single cosine mode") {
  const auto w = FrequencyVector::estimated({kGolden}, 1.0, 100);
  FourierMap g(1, 1, 4);
  const int k1[] = {1};
  g.set_mode(k1, 0, 0.5);
  const auto sol = solve_cohomological(g, w);
  for (double th : {0.0, 0.1, 0.77}) {
    const double t[] = {th};
    CHECK(sol.phi.evaluate(t)[0] ==
          doctest::Approx(std::sin(2 * std::numbers::pi * th) / (2 * std::numbers::pi * kGolden)).epsilon(1e-13));
  }
  CHECK(sol.average[0] == 0.0);
}

TEST_CASE("constant right-hand side") {
  const auto w = FrequencyVector::estimated({kGolden}, 1.0, 100);
  const double c[] = {2.5};
  const auto sol = solve_cohomological(FourierMap::constant(1, c, 3), w);
  CHECK(sol.phi.synthesize().max_abs() == 0.0);
  CHECK(sol.average[0] == 2.5);
}

TEST_CASE("forward application, amplification bound (n = 2)") {
  const auto w = FrequencyVector::estimated({1.0, kGolden}, 1.5, 40);
  std::mt19937 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    FourierMap g(2, 2, 6);
    for (std::size_t idx = 0; idx < g.num_modes(); ++idx)
      for (int c = 0; c < 2; ++c) g.coeff(idx, c) = {u(rng), u(rng)};
    g.symmetrize();
    const auto sol = solve_cohomological(g, w);
    const FourierMap back = directional_derivative(sol.phi, w.omega);
    FourierMap target = g;
    const std::size_t z = g.mode_index(std::vector<int>{0, 0});
    for (int c = 0; c < 2; ++c) target.coeff(z, c) = 0.0;
    const double err = (back - target).synthesize().max_abs();
    CHECK(err <= 1e-10 * target.synthesize().max_abs());
    for (std::size_t idx = 0; idx < g.num_modes(); ++idx) {
      const auto k = g.wavevector(idx);
      const double l1 = std::abs(k[0]) + std::abs(k[1]);
      if (l1 == 0) continue;
      for (int c = 0; c < 2; ++c)
        CHECK(std::abs(sol.phi.coeff(idx, c)) <=
              std::abs(g.coeff(idx, c)) * std::pow(l1, w.sigma) / (2 * std::numbers::pi * w.gamma) * (1 + 1e-12));
    }
    CHECK(sol.report.max_amplification <= 1.0 / (2 * std::numbers::pi * sol.report.min_divisor) * (1 + 1e-12));
  }
}

TEST_CASE("resonance and horizon errors") {
  FrequencyVector w{{1.0, 2.0}, 0.1, 1.5, 10};
  FourierMap g(2, 1, 3);
  g.set_mode(std::vector<int>{2, -1}, 0, 1.0);
  CHECK_THROWS_AS(solve_cohomological(g, w), ResonanceError);
  try {
    solve_cohomological(g, w);
  } catch (const ResonanceError& e) {
    CHECK(std::abs(e.wavevector()[0] * 1.0 + e.wavevector()[1] * 2.0) == 0.0);
  }
  FrequencyVector shallow{{1.0, kGolden}, 0.1, 1.5, 2};
  CHECK_THROWS_AS(solve_cohomological(g, shallow), std::invalid_argument);
}
