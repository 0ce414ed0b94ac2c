#include <cmath>
#include <random>

#include "doctest.h"
#include "kamtori/bernstein.hpp"
#include "kamtori/errors.hpp"
#include "oracles.hpp"

using namespace kamtori;
using kamtori::testing::defining_sum;
using kamtori::testing::symbolic;

TEST_CASE("weights sum to one and match the binomial formula") {
  for (int k : {1, 7, 64, 1000}) {
    for (double x : {0.0, 0.013, 0.5, 0.77, 1.0}) {
      const auto w = bernstein_weights(k, x);
      long double sum = 0.0L;
      for (auto v : w.weights) sum += v;
      CHECK(std::abs(static_cast<double>(sum) - 1.0) < 1e-15);
      if (k <= 64) {
        for (std::size_t i = 0; i < w.weights.size(); ++i) {
          const int p = w.first + static_cast<int>(i);
          const double exact = std::exp(std::lgamma(k + 1.0) - std::lgamma(p + 1.0) - std::lgamma(k - p + 1.0)) *
                               std::pow(x, p) * std::pow(1 - x, k - p);
          CHECK(std::abs(static_cast<double>(w.weights[i]) - exact) < 1e-13);
        }
      }
    }
  }
  CHECK_THROWS_AS(bernstein_weights(5, 1.5), DomainError);
}

TEST_CASE("affine and constant functions are reproduced exactly") {
  for (int k = 1; k <= 64; ++k) {
    const auto b = Bernstein1D::from_function([](double x) { return 2.5 * x - 0.75; }, k);
    const auto c = Bernstein1D::from_function([](double) { return 3.25; }, k);
    for (double x : {0.0, 0.1, 0.333, 0.9, 1.0}) {
      CHECK(std::abs(b(x) - (2.5 * x - 0.75)) < 1e-14);
      CHECK(std::abs(c(x) - 3.25) < 1e-14);
      CHECK(std::abs(b.derivative(x, 1) - 2.5) < 1e-12);
    }
  }
}

TEST_CASE("x squared at degree 10") {
  auto sq = [](double x) { return x * x; };
  const auto b = Bernstein1D::from_function(sq, 10);
  for (int i = 0; i < 100; ++i) {
    const double x = (i + 0.5) / 100;
    CHECK(std::abs(b(x) - (x * x + x * (1 - x) / 10)) < 1e-12);
    CHECK(std::abs(b(x) - defining_sum(sq, 10, x)) < 1e-12);
    CHECK(std::abs(b.derivative(x, 1) - (2 * x + (1 - 2 * x) / 10)) < 1e-12);
    CHECK(std::abs(b.derivative(x, 1) - static_cast<double>(symbolic(b.samples(), x, 1))) < 1e-11);
  }
  CHECK_THROWS(b.derivative(0.5, 11));
  CHECK_THROWS(Bernstein1D(std::vector<double>{1.0}));
}

TEST_CASE("difference-form derivatives equal symbolic differentiation") {
  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<int> kd(3, 64);
  double worst = 0.0;
  for (int set = 0; set < 50; ++set) {
    const int k = kd(rng);
    std::vector<double> s(k + 1);
    for (double& v : s) v = u(rng);
    const Bernstein1D b(s);
    for (int q = 1; q <= 3; ++q) {
      long double scale = 1.0L;
      std::vector<long double> ref;
      for (int i = 0; i <= 20; ++i) {
        ref.push_back(symbolic(s, i / 20.0, q));
        scale = std::max(scale, std::abs(ref.back()));
      }
      for (int i = 0; i <= 20; ++i)
        worst = std::max(worst, static_cast<double>(std::abs(b.derivative(i / 20.0, q) - ref[i]) / scale));
    }
    // q = k: constant k! Delta^k f(0)
    const double top = b.derivative(0.37, k);
    long double fact = 1.0L;
    for (int i = 2; i <= k; ++i) fact *= i;
    CHECK(top == doctest::Approx(static_cast<double>(fact * b.forward_differences(k)[0])).epsilon(1e-9));
    CHECK(std::abs(top - symbolic(s, 0.37, k)) <= 1e-9 * std::max(1.0L, std::abs(symbolic(s, 0.37, k))));
  }
  CHECK(worst < 1e-11);
}

TEST_CASE("convexity and endpoint interpolation") {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> s(31);
  for (double& v : s) v = u(rng);
  const Bernstein1D b(s);
  const double lo = *std::min_element(s.begin(), s.end()), hi = *std::max_element(s.begin(), s.end());
  for (int i = 0; i <= 1000; ++i) {
    const double v = b(i / 1000.0);
    CHECK(v >= lo - 1e-12);
    CHECK(v <= hi + 1e-12);
  }
  CHECK(b(0.0) == s.front());
  CHECK(b(1.0) == s.back());
}

TEST_CASE("rescaling to the unit cube") {
  const Box box{{-1.0}, {1.0}};
  const auto a = BernsteinApproximant::build([](std::span<const double> x) { return x[0]; }, box, {{4}});
  for (double y : {0.0, 0.3, 1.0}) {
    const double yy[] = {y};
    CHECK(a->derivatives_unit(yy, 0)[0] == doctest::Approx(2 * y - 1));
  }
  const double x[] = {0.5};
  CHECK(a->value(x) == doctest::Approx(0.5));
  CHECK(a->derivatives(x, 1)[1] == doctest::Approx(1.0));
  CHECK_THROWS_AS(BernsteinApproximant::build([](std::span<const double>) { return 0.0; }, Box{{0.0}, {0.0}}, {{4}}),
                  std::invalid_argument);
}

TEST_CASE("multivariate affine reproduction and corners") {
  const Box box{{-1.0, 0.5, 2.0}, {1.0, 1.5, 3.0}};
  auto f = [](std::span<const double> z) { return 1.0 + 2.0 * z[0] - 0.5 * z[1] + 0.25 * z[2]; };
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k : {1, 2, 5, 16}) {
    const auto a = BernsteinApproximant::build(f, box, {{k, k + 1, k + 2}});
    for (int i = 0; i < 20; ++i) {
      const std::vector<double> y{u(rng), u(rng), u(rng)};
      const auto z = box.from_unit(y);
      const auto d = a->derivatives(z, 1);
      CHECK(std::abs(d[0] - f(z)) < 1e-13);
      CHECK(std::abs(d[1] - 2.0) < 1e-12);
      CHECK(std::abs(d[2] + 0.5) < 1e-12);
      CHECK(std::abs(d[3] - 0.25) < 1e-12);
    }
    for (int c = 0; c < 8; ++c) {
      const std::vector<double> corner{c & 1 ? 1.0 : -1.0, c & 2 ? 1.5 : 0.5, c & 4 ? 3.0 : 2.0};
      CHECK(a->value(corner) == f(corner));
    }
  }
}

TEST_CASE("x1^2 x2: C0 error halves as k doubles, exact derivatives decrease") {
  const Box box{{0.0, 0.0}, {1.0, 1.0}};
  auto f = [](std::span<const double> z) { return z[0] * z[0] * z[1]; };
  std::vector<double> c0, c3;
  for (int k : {8, 16, 32, 64}) {
    const auto a = BernsteinApproximant::build(f, box, {{k, k}});
    double e0 = 0.0, e3 = 0.0;
    for (int i = 0; i <= 40; ++i)
      for (int j = 0; j <= 40; ++j) {
        const double z[] = {i / 40.0, j / 40.0};
        const auto d = a->derivatives(z, 3);
        // exact partials of x1^2 x2 in MultiIndexSet order (2 variables, order <= 3)
        const double x = z[0], y = z[1];
        const double ex[] = {x * x * y, 2 * x * y, x * x, 2 * y, 2 * x, 0, 0, 2, 0, 0};
        e0 = std::max(e0, std::abs(d[0] - ex[0]));
        for (int m = 0; m < 10; ++m) e3 = std::max(e3, std::abs(d[m] - ex[m]));
      }
    c0.push_back(e0);
    c3.push_back(e3);
  }
  for (int i = 0; i + 1 < 4; ++i) {
    const double ratio = c0[i] / c0[i + 1];
    CHECK(ratio >= 2.0 / 1.5);
    CHECK(ratio <= 2.0 * 1.5);
    CHECK(c3[i + 1] < c3[i]);
  }
}

TEST_CASE("strict inner policy") {
  const Box box{{0.0, 0.0}, {1.0, 1.0}};
  auto affine = [](std::span<const double> z) { return 0.5 + z[0] - 2 * z[1]; };
  BernsteinOptions opt{{2, 4}, InnerPolicy::Strict, 1e-2, 64, 8};
  const auto a = BernsteinApproximant::build(affine, box, opt);
  for (int d : a->slice_degrees()) CHECK(d == 2);
  const double z[] = {0.3, 0.6};
  CHECK(a->value(z) == doctest::Approx(affine(z)));

  // smooth non-polynomial slices need more inner degree as the outer tolerance shrinks
  auto wave = [](std::span<const double> z) { return std::sin(z[0]) * z[1]; };
  BernsteinOptions loose{{2, 3}, InnerPolicy::Strict, 1e3, 4096, 8};
  const auto b = BernsteinApproximant::build(wave, box, loose);
  BernsteinOptions tight{{2, 3}, InnerPolicy::Strict, 1e2, 4096, 8};
  const auto c = BernsteinApproximant::build(wave, box, tight);
  CHECK(c->max_degrees()[0] >= b->max_degrees()[0]);
  BernsteinOptions impossible{{2, 3}, InnerPolicy::Strict, 1e-6, 64, 8};
  CHECK_THROWS_AS(BernsteinApproximant::build(wave, box, impossible), SmoothingError);
  BernsteinOptions low{{2, 2}, InnerPolicy::Strict, 1.0, 64, 8};
  CHECK_THROWS_AS(BernsteinApproximant::build(wave, box, low), std::invalid_argument);
}

TEST_CASE("stencil derivatives") {
  auto f = [](std::span<const double> z) { return std::sin(z[0]) * std::exp(z[1]); };
  const double z[] = {0.4, -0.2};
  const auto d = stencil_derivatives(f, z, 3, 1e-2);
  const double s = std::sin(0.4), c = std::cos(0.4), e = std::exp(-0.2);
  const double ex[] = {s * e, c * e, s * e, -s * e, c * e, s * e, -c * e, -s * e, c * e, s * e};
  for (int m = 0; m < 10; ++m) CHECK(d[m] == doctest::Approx(ex[m]).epsilon(1e-4));
}

TEST_CASE("huge degree evaluation stays accurate") {
  const int k = 200000;
  const auto b = Bernstein1D::from_function([](double x) { return std::cos(3 * x); }, k);
  // B_k f - f = x(1-x) f''(x) / (2k) + O(k^-2), the remainder bounded by (|f'''| + |f''''|) / k^2
  for (double x : {0.2, 0.5, 0.9}) {
    const double pred = x * (1 - x) * (-9 * std::cos(3 * x)) / (2.0 * k);
    CHECK(std::abs(b(x) - std::cos(3 * x) - pred) < (27.0 + 81.0) / (double(k) * k));
    CHECK(std::abs(pred) > 1e-7);
  }
}

TEST_CASE("C3 error of a C4 function decays like 1/k") {
  auto P = [](double x) { return std::max(x - 0.3, 0.0); };
  auto d = [&](double x, int q) {
    const double t = P(x);
    const double c[] = {std::pow(t, 5), 5 * std::pow(t, 4), 20 * std::pow(t, 3), 60 * t * t};
    return c[q];
  };
  std::vector<double> lk, le;
  for (int k : {8, 16, 32, 64}) {
    const auto b = Bernstein1D::from_function([&](double x) { return d(x, 0); }, k);
    double e = 0.0;
    for (int i = 0; i <= 800; ++i)
      for (int q = 0; q <= 3; ++q) e = std::max(e, std::abs(b.derivative(i / 800.0, q) - d(i / 800.0, q)));
    lk.push_back(std::log(k));
    le.push_back(std::log(e));
  }
  const double mk = (lk[0] + lk[1] + lk[2] + lk[3]) / 4, me = (le[0] + le[1] + le[2] + le[3]) / 4;
  double num = 0.0, den = 0.0;
  for (int i = 0; i < 4; ++i) {
    num += (lk[i] - mk) * (le[i] - me);
    den += (lk[i] - mk) * (lk[i] - mk);
  }
  const double rate = -num / den;
  CHECK(rate >= 0.8);
  CHECK(rate <= 1.2);
}
