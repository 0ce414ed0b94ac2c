#include "kamtori/bernstein.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace {

constexpr long double kWindowCut = 1e-18L;

long double falling(int k, int q) {
  long double r = 1.0L;
  for (int i = 0; i < q; ++i) r *= static_cast<long double>(k - i);
  return r;
}

long double binom(int q, int j) {
  long double r = 1.0L;
  for (int i = 0; i < j; ++i) r = r * (q - i) / (i + 1);
  return r;
}

// q-th forward difference of v at p, v accessed through an index functor
template <class Get>
long double forward_difference(const Get& get, int p, int q) {
  long double acc = 0.0L;
  for (int j = 0; j <= q; ++j) acc += (((q - j) % 2) ? -1.0L : 1.0L) * binom(q, j) * get(p + j);
  return acc;
}

double clamp_unit(double x) {
  if (x < -1e-12 || x > 1.0 + 1e-12 || std::isnan(x))
    throw DomainError("Bernstein evaluation outside [0, 1]: " + std::to_string(x));
  return std::clamp(x, 0.0, 1.0);
}

}  // namespace

BernsteinWindow bernstein_weights(int k, double x) {
  if (k < 0) throw std::invalid_argument("bernstein_weights: negative degree");
  x = clamp_unit(x);
  if (k == 0 || x == 0.0) return {0, {1.0L}};
  if (x == 1.0) return {k, {1.0L}};
  const long double r = static_cast<long double>(x) / (1.0L - x);
  const int mode = std::min(k, static_cast<int>(std::floor((k + 1) * x)));
  std::vector<long double> up{1.0L}, down;
  long double w = 1.0L;
  for (int p = mode; p < k; ++p) {
    w *= static_cast<long double>(k - p) / (p + 1) * r;
    if (w < kWindowCut) break;
    up.push_back(w);
  }
  w = 1.0L;
  for (int p = mode; p > 0; --p) {
    w *= static_cast<long double>(p) / (k - p + 1) / r;
    if (w < kWindowCut) break;
    down.push_back(w);
  }
  BernsteinWindow out;
  out.first = mode - static_cast<int>(down.size());
  out.weights.assign(down.rbegin(), down.rend());
  out.weights.insert(out.weights.end(), up.begin(), up.end());
  long double sum = 0.0L;
  for (long double v : out.weights) sum += v;
  for (long double& v : out.weights) v /= sum;
  return out;
}

Bernstein1D::Bernstein1D(std::vector<double> samples) : samples_(std::move(samples)) {
  if (samples_.size() < 2) throw std::invalid_argument("Bernstein1D: degree must be at least 1 (need k+1 samples)");
}

Bernstein1D Bernstein1D::from_function(const std::function<double(double)>& f, int k) {
  if (k < 1) throw std::invalid_argument("Bernstein1D: degree must be at least 1");
  std::vector<double> s(k + 1);
  for (int p = 0; p <= k; ++p) s[p] = f(static_cast<double>(p) / k);
  return Bernstein1D(std::move(s));
}

double Bernstein1D::derivative(double x, int q) const {
  const int k = degree();
  if (q < 0 || q > k) throw std::invalid_argument("Bernstein1D::derivative: order exceeds degree");
  const BernsteinWindow w = bernstein_weights(k - q, x);
  auto get = [&](int p) { return static_cast<long double>(samples_[p]); };
  long double acc = 0.0L;
  for (std::size_t i = 0; i < w.weights.size(); ++i)
    acc += w.weights[i] * forward_difference(get, w.first + static_cast<int>(i), q);
  return static_cast<double>(falling(k, q) * acc);
}

std::vector<double> Bernstein1D::forward_differences(int q) const {
  const int k = degree();
  if (q < 0 || q > k) throw std::invalid_argument("Bernstein1D::forward_differences: order exceeds degree");
  auto get = [&](int p) { return static_cast<long double>(samples_[p]); };
  std::vector<double> out(k - q + 1);
  for (int p = 0; p <= k - q; ++p) out[p] = static_cast<double>(forward_difference(get, p, q));
  return out;
}

// ---------------------------------------------------------------------------

struct BernsteinBuilder {
  const ScalarField& f;
  const Box& box;
  std::vector<double> y, z;

  void set_coord(int axis, double t) {
    y[axis] = t;
    z[axis] = box.lower[axis] + box.width(axis) * t;
  }

  void finish(BernsteinApproximant& node) {
    if (node.slices_.empty()) {
      node.min_ = *std::min_element(node.samples_.begin(), node.samples_.end());
      node.max_ = *std::max_element(node.samples_.begin(), node.samples_.end());
      node.zero_ = node.min_ == 0.0 && node.max_ == 0.0;
    } else {
      node.min_ = std::numeric_limits<double>::infinity();
      node.max_ = -node.min_;
      node.zero_ = true;
      for (const auto& s : node.slices_) {
        node.min_ = std::min(node.min_, s.min_);
        node.max_ = std::max(node.max_, s.max_);
        node.zero_ = node.zero_ && s.zero_;
      }
    }
  }

  // tensor node over axes [0, d) with the coordinates of axes >= d already set
  BernsteinApproximant tensor(int d, std::span<const int> degrees) {
    BernsteinApproximant node;
    const int k = degrees[d - 1];
    node.degree_ = k;
    if (d == 1) {
      node.samples_.resize(k + 1);
      for (int p = 0; p <= k; ++p) {
        set_coord(0, static_cast<double>(p) / k);
        node.samples_[p] = f(z);
      }
    } else {
      node.slices_.reserve(k + 1);
      for (int p = 0; p <= k; ++p) {
        set_coord(d - 1, static_cast<double>(p) / k);
        node.slices_.push_back(tensor(d - 1, degrees));
      }
    }
    finish(node);
    return node;
  }
};

namespace {

// sup over a cell-centred grid of all partials up to order 3 of (approx - f) on the
// unit cube in the first d axes, the remaining coordinates fixed at `rest`.
double slice_c3_error(const BernsteinApproximant& inner, const ScalarField& f, const Box& box, int d,
                      std::span<const double> rest_unit, int grid) {
  const int D = box.dim();
  const MultiIndexSet& set = cached_multi_index_set(d, 3);
  const double h = 0.2 / grid;
  // field on the unit slice
  std::vector<double> yfull(D), zfull(D);
  for (int a = d; a < D; ++a) yfull[a] = rest_unit[a - d];
  ScalarField g = [&](std::span<const double> u) {
    for (int a = 0; a < d; ++a) yfull[a] = u[a];
    for (int a = 0; a < D; ++a) zfull[a] = box.lower[a] + box.width(a) * yfull[a];
    return f(zfull);
  };
  std::vector<int> idx(d, 0);
  std::vector<double> u(d);
  double worst = 0.0;
  long total = 1;
  for (int a = 0; a < d; ++a) total *= grid;
  for (long c = 0; c < total; ++c) {
    long rem = c;
    for (int a = 0; a < d; ++a) {
      u[a] = (rem % grid + 0.5) / grid;
      rem /= grid;
    }
    const auto exact = inner.derivatives_unit(u, 3);
    const auto approx_f = stencil_derivatives(g, u, 3, h);
    for (std::size_t i = 0; i < set.size(); ++i) worst = std::max(worst, std::abs(exact[i] - approx_f[i]));
  }
  return worst;
}

}  // namespace

std::shared_ptr<const BernsteinApproximant> BernsteinApproximant::build(const ScalarField& f, const Box& box,
                                                                      const BernsteinOptions& options) {
  const int d = box.dim();
  if (d < 1) throw DimensionError("Bernstein: empty box");
  if (static_cast<int>(options.degrees.size()) != d) throw DimensionError("Bernstein: one degree per axis required");
  for (int a = 0; a < d; ++a) {
    if (!(box.width(a) > 0.0)) throw std::invalid_argument("Bernstein: zero-width interval on axis " + std::to_string(a));
    if (options.degrees[a] < 1) throw std::invalid_argument("Bernstein: degrees must be at least 1");
  }
  BernsteinBuilder b{f, box, std::vector<double>(d), std::vector<double>(d)};
  auto root = std::shared_ptr<BernsteinApproximant>(new BernsteinApproximant());

  if (options.policy == InnerPolicy::Tensor || d == 1) {
    *root = b.tensor(d, options.degrees);
  } else {
    const int k = options.degrees[d - 1];
    if (k < 3) throw std::invalid_argument("Bernstein: the strict slice rule needs outer degree k >= 3");
    const double tol = options.epsilon / (8.0 * (k + 1) * k * (k - 1.0) * (k - 2.0));
    root->degree_ = k;
    Box inner_box{std::vector<double>(box.lower.begin(), box.lower.end() - 1),
                  std::vector<double>(box.upper.begin(), box.upper.end() - 1)};
    for (int p = 0; p <= k; ++p) {
      const double t = static_cast<double>(p) / k;
      std::vector<int> deg(options.degrees.begin(), options.degrees.end());
      double err = std::numeric_limits<double>::infinity();
      BernsteinApproximant slice;
      while (true) {
        b.set_coord(d - 1, t);
        slice = b.tensor(d - 1, deg);
        slice.box_ = inner_box;
        const double rest[] = {t};
        err = slice_c3_error(slice, f, box, d - 1, rest, options.norm_grid);
        if (err <= tol) break;
        if (2 * *std::max_element(deg.begin(), deg.end() - 1) > options.max_inner_degree)
          throw SmoothingError("slice tolerance " + std::to_string(tol) + " unreachable at p = " + std::to_string(p) +
                               " within inner degree " + std::to_string(options.max_inner_degree) +
                               " (measured C3 error " + std::to_string(err) + ")");
        for (int a = 0; a + 1 < d; ++a) deg[a] *= 2;
      }
      root->slices_.push_back(std::move(slice));
    }
    b.finish(*root);
  }
  root->box_ = box;
  return root;
}

std::vector<int> BernsteinApproximant::max_degrees() const {
  if (slices_.empty()) return {degree_};
  std::vector<int> inner;
  for (const auto& s : slices_) {
    const auto m = s.max_degrees();
    if (inner.empty()) inner = m;
    for (std::size_t a = 0; a < m.size(); ++a) inner[a] = std::max(inner[a], m[a]);
  }
  inner.push_back(degree_);
  return inner;
}

std::vector<int> BernsteinApproximant::slice_degrees() const {
  std::vector<int> out;
  for (const auto& s : slices_) out.push_back(s.degree_);
  return out;
}

std::size_t BernsteinApproximant::sample_count() const {
  if (slices_.empty()) return samples_.size();
  std::size_t n = 0;
  for (const auto& s : slices_) n += s.sample_count();
  return n;
}

void BernsteinApproximant::collect_samples(std::vector<double>& out) const {
  if (slices_.empty()) {
    out.insert(out.end(), samples_.begin(), samples_.end());
    return;
  }
  for (const auto& s : slices_) s.collect_samples(out);
}

// Windows depend only on (axis, degree) within one evaluation; slices share them.
struct BernsteinApproximant::WindowCache {
  const double* y;
  int max_order;
  struct Entry {
    int k;
    std::vector<BernsteinWindow> win;
    std::vector<std::vector<double>> dbl;  // the same weights rounded to double, for leaves
  };
  std::vector<std::vector<Entry>> axes;

  const Entry& get(int axis, int k) {
    for (const auto& e : axes[axis])
      if (e.k == k) return e;
    Entry e{k, std::vector<BernsteinWindow>(std::min(max_order, k) + 1), {}};
    for (int q = 0; q < static_cast<int>(e.win.size()); ++q) {
      e.win[q] = bernstein_weights(k - q, y[axis]);
      if (axis == 0) e.dbl.emplace_back(e.win[q].weights.begin(), e.win[q].weights.end());
    }
    axes[axis].push_back(std::move(e));
    return axes[axis].back();
  }
};

std::vector<long double> BernsteinApproximant::eval(const double* y, int max_order, WindowCache& cache) const {
  const int k = degree_;
  if (slices_.empty()) {
    std::vector<long double> out(max_order + 1, 0.0L);
    if (zero_) return out;
    const auto& entry = cache.get(0, k);
    const auto& win = entry.win;
    const int qmax = static_cast<int>(win.size()) - 1;
    int lo = k + 1, hi = 0;
    for (int q = 0; q <= qmax; ++q) {
      lo = std::min(lo, win[q].first);
      hi = std::max(hi, win[q].first + static_cast<int>(win[q].weights.size()) + q);
    }
    hi = std::min(hi, k + 1);
    // Successive forward differences over the union window. Neighbouring samples of a
    // smooth function differ by less than a factor two, so the subtractions are exact
    // in double and the leaf stays in double for speed.
    thread_local std::vector<double> diff;
    diff.assign(samples_.begin() + lo, samples_.begin() + hi);
    for (int q = 0; q <= qmax; ++q) {
      if (q > 0)
        for (std::size_t i = 0; i + q < diff.size(); ++i) diff[i] = diff[i + 1] - diff[i];
      const double* w = entry.dbl[q].data();
      const double* v = diff.data() + (win[q].first - lo);
      double acc = 0.0;
      for (std::size_t i = 0; i < entry.dbl[q].size(); ++i) acc += w[i] * v[i];
      out[q] = falling(k, q) * static_cast<long double>(acc);
    }
    return out;
  }
  // node: dimension is one more than the slices'
  int d = 1;
  for (const BernsteinApproximant* s = this; !s->slices_.empty(); s = &s->slices_.front()) ++d;
  const MultiIndexSet& set = cached_multi_index_set(d, max_order);
  const MultiIndexSet& inner_set = cached_multi_index_set(d - 1, max_order);
  std::vector<long double> out(set.size(), 0.0L);
  if (zero_) return out;

  const auto& win = cache.get(d - 1, k).win;
  const int qmax = static_cast<int>(win.size()) - 1;
  int lo = k + 1, hi = 0;
  for (int q = 0; q <= qmax; ++q) {
    lo = std::min(lo, win[q].first);
    hi = std::max(hi, win[q].first + static_cast<int>(win[q].weights.size()) + q);
  }
  hi = std::min(hi, k + 1);
  std::vector<std::vector<long double>> R(hi - lo);
  for (int p = lo; p < hi; ++p) R[p - lo] = slices_[p].eval(y, max_order, cache);

  std::vector<int> beta(d - 1);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& alpha = set[i];
    const int q = alpha[d - 1];
    if (q > qmax) continue;
    std::copy(alpha.begin(), alpha.end() - 1, beta.begin());
    const std::size_t b = inner_set.position(beta);
    auto get = [&](int p) { return R[p - lo][b]; };
    long double acc = 0.0L;
    for (std::size_t j = 0; j < win[q].weights.size(); ++j)
      acc += win[q].weights[j] * forward_difference(get, win[q].first + static_cast<int>(j), q);
    out[i] = falling(k, q) * acc;
  }
  return out;
}

std::vector<double> BernsteinApproximant::derivatives_unit(std::span<const double> y, int max_order) const {
  if (static_cast<int>(y.size()) != dim()) throw DimensionError("Bernstein: point has wrong dimension");
  std::vector<double> yc(y.size());
  for (std::size_t a = 0; a < y.size(); ++a) yc[a] = clamp_unit(y[a]);
  WindowCache cache{yc.data(), max_order, std::vector<std::vector<WindowCache::Entry>>(dim())};
  const auto v = eval(yc.data(), max_order, cache);
  return {v.begin(), v.end()};
}

std::vector<double> BernsteinApproximant::derivatives(std::span<const double> x, int max_order) const {
  if (static_cast<int>(x.size()) != dim()) throw DimensionError("Bernstein: point has wrong dimension");
  std::vector<double> y(x.size());
  for (int a = 0; a < dim(); ++a) y[a] = clamp_unit((x[a] - box_.lower[a]) / box_.width(a));
  WindowCache cache{y.data(), max_order, std::vector<std::vector<WindowCache::Entry>>(dim())};
  const auto v = eval(y.data(), max_order, cache);
  const MultiIndexSet& set = cached_multi_index_set(dim(), max_order);
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < set.size(); ++i) {
    long double s = v[i];
    for (int a = 0; a < dim(); ++a)
      for (int q = 0; q < set[i][a]; ++q) s /= box_.width(a);
    out[i] = static_cast<double>(s);
  }
  return out;
}

double BernsteinApproximant::value(std::span<const double> x) const { return derivatives(x, 0)[0]; }

std::vector<double> stencil_derivatives(const ScalarField& f, std::span<const double> x, int max_order, double h) {
  if (max_order > 3) throw std::invalid_argument("stencil_derivatives: orders above 3 are not supported");
  static const double c1[] = {1, -8, 0, 8, -1}, c2[] = {-1, 16, -30, 16, -1}, c3[] = {-1, 2, 0, -2, 1};
  const double scale[] = {1.0, 1.0 / (12 * h), 1.0 / (12 * h * h), 1.0 / (2 * h * h * h)};
  const int d = static_cast<int>(x.size());
  const MultiIndexSet& set = cached_multi_index_set(d, max_order);
  std::vector<double> out(set.size());
  std::vector<double> p(x.begin(), x.end());
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& alpha = set[i];
    auto rec = [&](auto&& self, int axis) -> double {
      if (axis == d) return f(p);
      const int q = alpha[axis];
      if (q == 0) return self(self, axis + 1);
      const double* c = q == 1 ? c1 : q == 2 ? c2 : c3;
      double acc = 0.0;
      for (int s = -2; s <= 2; ++s) {
        if (c[s + 2] == 0.0) continue;
        p[axis] = x[axis] + s * h;
        acc += c[s + 2] * self(self, axis + 1);
      }
      p[axis] = x[axis];
      return acc * scale[q];
    };
    out[i] = rec(rec, 0);
  }
  return out;
}

}  // namespace kamtori
