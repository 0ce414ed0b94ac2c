#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "kamtori/errors.hpp"
#include "kamtori/fourier.hpp"

using namespace kamtori;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

FourierMap random_map(int n, int m, int M, std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierMap f(n, m, M);
  for (std::size_t idx = 0; idx < f.num_modes(); ++idx)
    for (int c = 0; c < m; ++c) f.coeff(idx, c) = {u(rng), u(rng)};
  f.symmetrize();
  return f;
}

GridSamples sample(int n, int m, int N, auto&& fn) {
  GridSamples g{n, m, N, {}};
  g.values.resize(g.num_points() * m);
  for (std::size_t j = 0; j < g.num_points(); ++j) {
    const auto th = g.theta(j);
    for (int c = 0; c < m; ++c) g.values[j * m + c] = fn(th, c);
  }
  return g;
}

}  // namespace

TEST_CASE("analyze of a constant field gives a single mode") {
  const auto g = sample(2, 1, 9, [](auto&, int) { return 3.5; });
  const FourierMap f = analyze(g);
  for (std::size_t idx = 0; idx < f.num_modes(); ++idx) {
    const auto k = f.wavevector(idx);
    const double expect = (k[0] == 0 && k[1] == 0) ? 3.5 : 0.0;
    CHECK(std::abs(f.coeff(idx, 0) - cplx(expect)) < 1e-14);
  }
}

TEST_CASE("analyze of cos has amplitude one half at +-1") {
  const auto g = sample(1, 1, 11, [](auto& t, int) { return std::cos(kTwoPi * t[0]); });
  const FourierMap f = analyze(g);
  for (int k = -5; k <= 5; ++k) {
    const int kk[] = {k};
    CHECK(std::abs(f.mode(kk, 0) - cplx(std::abs(k) == 1 ? 0.5 : 0.0)) < 1e-14);
  }
}

TEST_CASE("analysis matches the brute-force DFT sum") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int M = 4, N = 2 * M + 1;
  GridSamples g{2, 1, N, std::vector<double>(N * N)};
  for (double& v : g.values) v = u(rng);
  const FourierMap f = analyze(g);
  double worst = 0.0;
  for (int k0 = -M; k0 <= M; ++k0)
    for (int k1 = -M; k1 <= M; ++k1) {
      cplx sum = 0.0;
      for (std::size_t j = 0; j < g.num_points(); ++j) {
        const auto th = g.theta(j);
        sum += g.values[j] * std::polar(1.0, -kTwoPi * (k0 * th[0] + k1 * th[1]));
      }
      sum /= static_cast<double>(N * N);
      const int k[] = {k0, k1};
      worst = std::max(worst, std::abs(sum - f.mode(k, 0)));
    }
  CHECK(worst < 1e-13);
}

TEST_CASE("round trip, reality and linearity") {
  std::mt19937 rng(11);
  for (int n = 1; n <= 3; ++n) {
    const FourierMap f = random_map(n, 2, 3, rng), h = random_map(n, 2, 3, rng);
    const FourierMap back = analyze(f.synthesize());
    double worst = 0.0, scale = 0.0;
    for (std::size_t idx = 0; idx < f.num_modes(); ++idx)
      for (int c = 0; c < 2; ++c) {
        worst = std::max(worst, std::abs(back.coeff(idx, c) - f.coeff(idx, c)));
        scale = std::max(scale, std::abs(f.coeff(idx, c)));
        auto k = f.wavevector(idx);
        for (int& v : k) v = -v;
        CHECK(std::abs(f.mode(k, c) - std::conj(f.coeff(idx, c))) == 0.0);
      }
    CHECK(worst <= 1e-12 * scale);

    GridSamples mix = f.synthesize();
    const GridSamples hs = h.synthesize();
    for (std::size_t i = 0; i < mix.values.size(); ++i) mix.values[i] = 2.0 * mix.values[i] - 0.5 * hs.values[i];
    const FourierMap lin = analyze(mix);
    const FourierMap ref = 2.0 * f - 0.5 * h;
    for (std::size_t idx = 0; idx < f.num_modes(); ++idx)
      CHECK(std::abs(lin.coeff(idx, 1) - ref.coeff(idx, 1)) < 1e-12);
  }
}

TEST_CASE("even grid sizes are rejected") {
  GridSamples g{1, 1, 8, std::vector<double>(8, 0.0)};
  CHECK_THROWS(analyze(g));
  GridSamples bad{1, 1, 9, std::vector<double>(5, 0.0)};
  CHECK_THROWS(analyze(bad));
}

TEST_CASE("directional derivative") {
  const double omega1[] = {0.7};
  const double c[] = {2.0};
  CHECK(directional_derivative(FourierMap::constant(1, c, 3), omega1).synthesize().max_abs() == 0.0);

  FourierMap s(1, 1, 3);
  const int k1[] = {1};
  s.set_mode(k1, 0, cplx(0.0, -0.5));  // sin(2 pi theta)
  const FourierMap ds = directional_derivative(s, omega1);
  for (double th : {0.0, 0.13, 0.61}) {
    const double t[] = {th};
    CHECK(ds.evaluate(t)[0] == doctest::Approx(kTwoPi * 0.7 * std::cos(kTwoPi * th)).epsilon(1e-12));
  }

  const double a = 0.3, b = 1.1;
  const double omega2[] = {a, b};
  FourierMap f(2, 1, 3);
  const int k12[] = {1, 2};
  f.set_mode(k12, 0, 0.5);  // cos(2 pi (t1 + 2 t2))
  const FourierMap df = directional_derivative(f, omega2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double h = 1e-5;
  for (int i = 0; i < 10; ++i) {
    const double t1 = u(rng), t2 = u(rng);
    // five-point stencil along the flow direction; a plain central difference has
    // an O(h^2) error of about 6e-8 here
    auto at = [&](double s) {
      const double p[] = {t1 + s * a, t2 + s * b};
      return f.evaluate(p)[0];
    };
    const double t[] = {t1, t2};
    const double fd = (-at(2 * h) + 8 * at(h) - 8 * at(-h) + at(-2 * h)) / (12 * h);
    CHECK(std::abs(fd - df.evaluate(t)[0]) < 1e-8);
    CHECK(df.evaluate(t)[0] == doctest::Approx(-kTwoPi * (a + 2 * b) * std::sin(kTwoPi * (t1 + 2 * t2))));
  }
  CHECK(average(df)[0] == 0.0);
  CHECK_THROWS_AS(directional_derivative(f, omega1), DimensionError);
}

TEST_CASE("average") {
  const double c[] = {3.5};
  CHECK(average(FourierMap::constant(2, c, 2))[0] == 3.5);
  FourierMap cs(1, 1, 2);
  const int k1[] = {1};
  cs.set_mode(k1, 0, 0.5);
  CHECK(average(cs)[0] == 0.0);

  std::mt19937 rng(5);
  const FourierMap f = random_map(2, 1, 4, rng);
  double sum = 0.0;
  const int Q = 100;
  for (int i = 0; i < Q; ++i)
    for (int j = 0; j < Q; ++j) {
      const double t[] = {(i + 0.5) / Q, (j + 0.5) / Q};
      sum += f.evaluate(t)[0];
    }
  CHECK(std::abs(sum / (Q * Q) - average(f)[0]) < 1e-9);
}

TEST_CASE("strip norm") {
  const double c[] = {-2.5};
  CHECK(strip_norm(FourierMap::constant(1, c, 3), 0.4).value == doctest::Approx(2.5));

  FourierMap single(2, 1, 3);
  single.coeff(single.mode_index(std::vector<int>{1, -2}), 0) = cplx(0.3, 0.4);
  CHECK(strip_norm(single, 0.1).value == doctest::Approx(0.5 * std::exp(kTwoPi * 3 * 0.1)));

  FourierMap cs(1, 1, 3);
  const int k1[] = {1};
  cs.set_mode(k1, 0, 0.5);
  const auto est = strip_norm(cs, 0.1);
  CHECK(est.value == doctest::Approx(std::exp(0.2 * std::numbers::pi)));
  double gmax = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double t[] = {i / 1000.0};
    gmax = std::max(gmax, std::abs(cs.evaluate(t)[0]));
  }
  CHECK(est.value >= gmax);
  CHECK_FALSE(est.tail_flag);

  FourierMap tail(1, 1, 4);
  const int k4[] = {4};
  tail.set_mode(k4, 0, 1e-3);
  CHECK(strip_norm(tail, 0.0).tail_flag);
}

TEST_CASE("strip norm bounds the grid sup and grows with rho; Parseval holds") {
  std::mt19937 rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    const FourierMap f = random_map(2, 2, 3, rng);
    const GridSamples g = f.synthesize();
    double prev = 0.0;
    for (double rho : {0.0, 0.05, 0.1, 0.3}) {
      const double v = strip_norm(f, rho).value;
      CHECK(v >= g.max_abs());
      CHECK(v >= prev);
      prev = v;
    }
    double coeff_sq = 0.0, sample_sq = 0.0;
    for (std::size_t idx = 0; idx < f.num_modes(); ++idx) coeff_sq += std::norm(f.coeff(idx, 0));
    for (std::size_t j = 0; j < g.num_points(); ++j) sample_sq += g.values[j * 2] * g.values[j * 2];
    CHECK(std::abs(coeff_sq - sample_sq / g.num_points()) <= 1e-10 * coeff_sq);
  }
}

TEST_CASE("partial, shifted and resized agree with direct evaluation") {
  std::mt19937 rng(17);
  const FourierMap f = random_map(2, 1, 3, rng);
  const double shift[] = {0.21, -0.4};
  const FourierMap sh = f.shifted(shift);
  const double t[] = {0.3, 0.8}, ts[] = {0.51, 0.4};
  CHECK(sh.evaluate(t)[0] == doctest::Approx(f.evaluate(ts)[0]).epsilon(1e-12));
  CHECK(f.resized(6).evaluate(t)[0] == doctest::Approx(f.evaluate(t)[0]).epsilon(1e-12));
  const double h = 1e-5;
  const double tp[] = {0.3 + h, 0.8}, tm[] = {0.3 - h, 0.8};
  CHECK(std::abs(f.partial(0).evaluate(t)[0] - (f.evaluate(tp)[0] - f.evaluate(tm)[0]) / (2 * h)) < 1e-6);
}
