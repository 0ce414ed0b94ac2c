#include "kamtori/hamiltonian.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double falling(int m, int q) {
  double r = 1.0;
  for (int i = 0; i < q; ++i) r *= (m - i);
  return r;
}

}  // namespace

Eigen::MatrixXd symplectic_J(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  J.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return J;
}

bool Box::contains(std::span<const double> z, double slack) const {
  if (static_cast<int>(z.size()) != dim()) return false;
  for (int a = 0; a < dim(); ++a) {
    const double s = slack * width(a);
    if (z[a] < lower[a] - s || z[a] > upper[a] + s) return false;
  }
  return true;
}

std::vector<double> Box::to_unit(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim()) throw DimensionError("Box::to_unit: dimension mismatch");
  std::vector<double> y(dim());
  for (int a = 0; a < dim(); ++a) {
    if (!(width(a) > 0.0)) throw std::invalid_argument("Box: zero-width interval on axis " + std::to_string(a));
    y[a] = (x[a] - lower[a]) / width(a);
  }
  return y;
}

std::vector<double> Box::from_unit(std::span<const double> y) const {
  if (static_cast<int>(y.size()) != dim()) throw DimensionError("Box::from_unit: dimension mismatch");
  std::vector<double> x(dim());
  for (int a = 0; a < dim(); ++a) {
    if (!(width(a) > 0.0)) throw std::invalid_argument("Box: zero-width interval on axis " + std::to_string(a));
    x[a] = lower[a] + width(a) * y[a];
  }
  return x;
}

MultiIndexSet::MultiIndexSet(int dim, int max_order) : dim_(dim), max_order_(max_order) {
  std::vector<int> alpha(dim, 0);
  for (int order = 0; order <= max_order; ++order) {
    // lexicographically descending compositions of `order` into dim parts
    auto fill = [&](auto&& self, int axis, int remaining) -> void {
      if (axis == dim - 1) {
        alpha[axis] = remaining;
        lookup_[alpha] = indices_.size();
        indices_.push_back(alpha);
        return;
      }
      for (int v = remaining; v >= 0; --v) {
        alpha[axis] = v;
        self(self, axis + 1, remaining - v);
      }
    };
    if (dim > 0) fill(fill, 0, order);
  }
}

const MultiIndexSet& cached_multi_index_set(int dim, int max_order) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::unique_ptr<MultiIndexSet>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, max_order}];
  if (!slot) slot = std::make_unique<MultiIndexSet>(dim, max_order);
  return *slot;
}

std::size_t MultiIndexSet::position(const std::vector<int>& alpha) const {
  auto it = lookup_.find(alpha);
  if (it == lookup_.end()) throw std::out_of_range("multi-index not in set");
  return it->second;
}

std::size_t MultiIndexSet::first(int i) const {
  std::vector<int> a(dim_, 0);
  a[i] = 1;
  return position(a);
}

std::size_t MultiIndexSet::second(int i, int j) const {
  std::vector<int> a(dim_, 0);
  a[i] += 1;
  a[j] += 1;
  return position(a);
}

HamiltonianModel::HamiltonianModel(int n, std::vector<FourierTaylorTerm> terms,
                                   std::vector<std::shared_ptr<const HamiltonianTerm>> extra, int smoothness_class,
                                   std::optional<Box> validity_box)
    : n_(n), terms_(std::move(terms)), extra_(std::move(extra)), smoothness_(smoothness_class),
      box_(std::move(validity_box)) {
  if (n < 1) throw DimensionError("HamiltonianModel: n must be positive");
  for (const auto& t : terms_)
    if (static_cast<int>(t.k.size()) != n || static_cast<int>(t.m.size()) != n)
      throw DimensionError("HamiltonianModel: term multi-index has wrong length");
  for (const auto& e : extra_)
    if (!e || e->dim() != 2 * n) throw DimensionError("HamiltonianModel: extra term has wrong dimension");
  if (box_ && box_->dim() != 2 * n) throw DimensionError("HamiltonianModel: validity box has wrong dimension");

  // reality: every (k, m, c) needs its partner (-k, m, conj c)
  for (const auto& t : terms_) {
    std::vector<int> neg(t.k);
    for (int& v : neg) v = -v;
    std::complex<double> partner{};
    bool found = false;
    for (const auto& u : terms_) {
      if (u.k == neg && u.m == t.m) {
        partner += u.c;
        found = true;
      }
    }
    const bool self = (neg == t.k);
    const double scale = std::max(1.0, std::abs(t.c));
    if (self) {
      if (std::abs(partner.imag()) > 1e-12 * scale)
        throw std::invalid_argument("HamiltonianModel: k = 0 coefficients must be real in total");
    } else if (!found) {
      throw std::invalid_argument("HamiltonianModel: terms not closed under (k -> -k, c -> conj c)");
    }
  }
  if (!analytic() && smoothness_ == kAnalytic)
    throw std::invalid_argument("HamiltonianModel: non-analytic terms need a finite smoothness class");
}

bool HamiltonianModel::analytic() const {
  return std::all_of(extra_.begin(), extra_.end(), [](const auto& e) { return e->analytic(); });
}

HamiltonianModel HamiltonianModel::analytic_part() const {
  std::vector<std::shared_ptr<const HamiltonianTerm>> keep;
  for (const auto& e : extra_)
    if (e->analytic()) keep.push_back(e);
  return HamiltonianModel(n_, terms_, keep, kAnalytic, box_);
}

HamiltonianModel HamiltonianModel::rough_part() const {
  std::vector<std::shared_ptr<const HamiltonianTerm>> keep;
  for (const auto& e : extra_)
    if (!e->analytic()) keep.push_back(e);
  return HamiltonianModel(n_, {}, keep, keep.empty() ? kAnalytic : smoothness_, box_);
}

HamiltonianModel HamiltonianModel::with_box(Box box) const {
  return HamiltonianModel(n_, terms_, extra_, smoothness_, std::move(box));
}

HamiltonianModel HamiltonianModel::plus(const HamiltonianModel& other) const {
  if (other.n_ != n_) throw DimensionError("HamiltonianModel::plus: dimension mismatch");
  auto terms = terms_;
  terms.insert(terms.end(), other.terms_.begin(), other.terms_.end());
  auto extra = extra_;
  extra.insert(extra.end(), other.extra_.begin(), other.extra_.end());
  int smooth = kAnalytic;
  for (int s : {smoothness_, other.smoothness_})
    if (s != kAnalytic) smooth = (smooth == kAnalytic) ? s : std::min(smooth, s);
  std::optional<Box> box = box_ ? box_ : other.box_;
  if (box_ && other.box_) {
    Box b = *box_;
    for (int a = 0; a < b.dim(); ++a) {
      b.lower[a] = std::max(b.lower[a], other.box_->lower[a]);
      b.upper[a] = std::min(b.upper[a], other.box_->upper[a]);
    }
    box = b;
  }
  return HamiltonianModel(n_, std::move(terms), std::move(extra), smooth, std::move(box));
}

void HamiltonianModel::check_domain(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != 2 * n_) throw DimensionError("HamiltonianModel: point has wrong dimension");
  if (box_ && !box_->contains(z, 1e-12)) {
    std::ostringstream os;
    os << "point (";
    for (std::size_t i = 0; i < z.size(); ++i) os << (i ? ", " : "") << z[i];
    os << ") lies outside the model's validity box";
    throw DomainError(os.str());
  }
}

std::vector<double> HamiltonianModel::derivatives(std::span<const double> z, int max_order) const {
  check_domain(z);
  const MultiIndexSet& set = cached_multi_index_set(2 * n_, max_order);
  std::vector<double> out(set.size(), 0.0);
  for (const auto& t : terms_) {
    double phase = 0.0;
    for (int a = 0; a < n_; ++a) phase += t.k[a] * z[a];
    const std::complex<double> base = t.c * std::polar(1.0, kTwoPi * phase);
    for (std::size_t i = 0; i < set.size(); ++i) {
      const auto& alpha = set[i];
      std::complex<double> f = base;
      for (int a = 0; a < n_; ++a)
        for (int q = 0; q < alpha[a]; ++q) f *= std::complex<double>(0.0, kTwoPi * t.k[a]);
      for (int b = 0; b < n_ && f != 0.0; ++b) {
        const int q = alpha[n_ + b], m = t.m[b];
        if (q > m) {
          f = 0.0;
          break;
        }
        f *= falling(m, q) * std::pow(z[n_ + b], m - q);
      }
      out[i] += f.real();
    }
  }
  for (const auto& e : extra_) {
    const auto d = e->derivatives(z, max_order);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += d[i];
  }
  return out;
}

Jet HamiltonianModel::evaluate_jet(std::span<const double> z) const {
  const int d = 2 * n_;
  const MultiIndexSet& set = cached_multi_index_set(d, 2);
  const auto v = derivatives(z, 2);
  Jet jet{v[0], Eigen::VectorXd(d), Eigen::MatrixXd(d, d)};
  for (int i = 0; i < d; ++i) {
    jet.gradient(i) = v[set.first(i)];
    for (int j = 0; j < d; ++j) jet.hessian(i, j) = v[set.second(i, j)];
  }
  return jet;
}

double HamiltonianModel::value(std::span<const double> z) const { return derivatives(z, 0)[0]; }

PeriodicBumpSpline::PeriodicBumpSpline(int dim, int axis, double amplitude, int order)
    : dim_(dim), axis_(axis), amplitude_(amplitude), order_(order) {
  if (axis < 0 || axis >= dim) throw DimensionError("PeriodicBumpSpline: axis out of range");
  if (order < 1) throw std::invalid_argument("PeriodicBumpSpline: order must be positive");
  poly_.assign(2 * order + 1, 0.0);
  const double scale = amplitude * std::pow(4.0, order);
  double binom = 1.0;
  for (int j = 0; j <= order; ++j) {
    poly_[order + j] = scale * binom * ((j % 2) ? -1.0 : 1.0);
    binom = binom * (order - j) / (j + 1);
  }
}

double PeriodicBumpSpline::profile(double x, int q) const {
  const double t = x - std::floor(x);
  double acc = 0.0;
  for (int p = static_cast<int>(poly_.size()) - 1; p >= q; --p) acc = acc * t + poly_[p] * falling(p, q);
  return acc;
}

std::vector<double> PeriodicBumpSpline::derivatives(std::span<const double> z, int max_order) const {
  if (max_order == 0) return {profile(z[axis_], 0)};
  const MultiIndexSet& set = cached_multi_index_set(dim_, max_order);
  std::vector<double> out(set.size(), 0.0);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& alpha = set[i];
    int total = 0;
    for (int a : alpha) total += a;
    if (alpha[axis_] != total) continue;
    out[i] = profile(z[axis_], total);
  }
  return out;
}

FourierMap vector_field(const HamiltonianModel& H, const Torus& K) {
  const int n = K.n();
  if (H.n() != n) throw DimensionError("vector_field: Hamiltonian and torus dimensions differ");
  const GridSamples z = K.samples();
  GridSamples f{n, 2 * n, z.points_per_axis, std::vector<double>(z.values.size())};
  const MultiIndexSet& set = cached_multi_index_set(2 * n, 1);
  for (std::size_t j = 0; j < z.num_points(); ++j) {
    const auto d = H.derivatives(z.at(j), 1);
    for (int a = 0; a < n; ++a) {
      f.values[j * 2 * n + a] = d[set.first(n + a)];   // dH/dy
      f.values[j * 2 * n + n + a] = -d[set.first(a)];  // -dH/dx
    }
  }
  return analyze(f);
}

FourierMap linearization(const HamiltonianModel& H, const Torus& K) {
  const int n = K.n();
  if (H.n() != n) throw DimensionError("linearization: Hamiltonian and torus dimensions differ");
  const GridSamples z = K.samples();
  const int d = 2 * n;
  GridSamples f{n, d * d, z.points_per_axis, std::vector<double>(z.num_points() * d * d)};
  const Eigen::MatrixXd J = symplectic_J(n);
  for (std::size_t j = 0; j < z.num_points(); ++j) {
    const Eigen::MatrixXd A = J * H.evaluate_jet(z.at(j)).hessian;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c) f.values[j * d * d + r * d + c] = A(r, c);
  }
  return analyze(f);
}

}  // namespace kamtori
