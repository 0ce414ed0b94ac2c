#include "kamtori/smoothing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace {

constexpr double kPruneExponent = 40.0;

struct StepJet {
  double g[4] = {0, 0, 0, 0};
};

// C-infinity transition: 0 for t <= 0, 1 for t >= 1, 1 / (1 + e^{1/t - 1/(1-t)}) between.
StepJet smooth_step(double t) {
  StepJet s;
  if (t <= 0.0) return s;
  if (t >= 1.0) {
    s.g[0] = 1.0;
    return s;
  }
  const double u = 1.0 - t;
  const double h = 1.0 / t - 1.0 / u;
  if (h > 700.0) return s;
  if (h < -700.0) {
    s.g[0] = 1.0;
    return s;
  }
  double p, q;  // p = 1 / (1 + e^h), q = 1 - p
  if (h > 0) {
    const double e = std::exp(-h);
    p = e / (1 + e);
    q = 1 / (1 + e);
  } else {
    const double e = std::exp(h);
    p = 1 / (1 + e);
    q = e / (1 + e);
  }
  const double p1 = -p * q;
  const double p2 = -(1 - 2 * p) * p1;
  const double p3 = 2 * p1 * p1 - (1 - 2 * p) * p2;
  const double h1 = -1 / (t * t) - 1 / (u * u);
  const double h2 = 2 / (t * t * t) - 2 / (u * u * u);
  const double h3 = -6 / (t * t * t * t) - 6 / (u * u * u * u);
  s.g[0] = p;
  s.g[1] = p1 * h1;
  s.g[2] = p2 * h1 * h1 + p1 * h2;
  s.g[3] = p3 * h1 * h1 * h1 + 3 * p2 * h1 * h2 + p1 * h3;
  return s;
}

std::vector<int> axes_of(const std::vector<int>& alpha) {
  std::vector<int> out;
  for (std::size_t a = 0; a < alpha.size(); ++a)
    for (int i = 0; i < alpha[a]; ++i) out.push_back(static_cast<int>(a));
  return out;
}

}  // namespace

PlateauCutoff::PlateauCutoff(const Torus& K0, double r) : dim_(2 * K0.n()), r_(r) {
  if (!(r > 0.0)) throw std::invalid_argument("cutoff: r must be positive");
  const int n = K0.n();
  const GridSamples s = K0.samples();
  // periodic copies in every angle direction
  int copies = 1;
  for (int a = 0; a < n; ++a) copies *= 3;
  std::vector<std::vector<double>> pts;
  for (std::size_t j = 0; j < s.num_points(); ++j)
    for (int c = 0; c < copies; ++c) {
      std::vector<double> p(s.at(j).begin(), s.at(j).end());
      int rem = c;
      for (int a = 0; a < n; ++a) {
        p[a] += (rem % 3) - 1;
        rem /= 3;
      }
      pts.push_back(std::move(p));
    }
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a[0] < b[0]; });
  for (const auto& p : pts) points_.insert(points_.end(), p.begin(), p.end());

  log_count_ = std::log(std::max<double>(2.0, static_cast<double>(pts.size())));
  temperature_ = 0.05 * r * r / log_count_;
  r_in2_ = r * r;
  r_out2_ = 6.25 * r * r - temperature_ * log_count_;

  // box over the image for theta in [0, 1]^n, sampled on a refined grid so the
  // curve between grid points is covered, widened by 3r
  const GridSamples fine = K0.resized(4 * K0.trunc() + 4).samples();
  box_.lower.assign(dim_, std::numeric_limits<double>::infinity());
  box_.upper.assign(dim_, -std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < fine.num_points(); ++j)
    for (int a = 0; a < dim_; ++a) {
      const double v = fine.at(j)[a];
      box_.lower[a] = std::min(box_.lower[a], v - 3 * r);
      box_.upper[a] = std::max(box_.upper[a], v + 3 * r);
      // the closing copy theta_a = 1 is the theta_a = 0 point moved by one period
      if (a < n && fine.theta(j)[a] == 0.0) box_.upper[a] = std::max(box_.upper[a], v + 1.0 + 3 * r);
    }
}

double PlateauCutoff::min_sq_distance(std::span<const double> z) const {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t count = point_count();
  for (std::size_t i = 0; i < count; ++i) {
    const double* c = points_.data() + i * dim_;
    const double dx = z[0] - c[0];
    if (dx * dx >= best) {
      if (c[0] > z[0]) break;
      continue;
    }
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) d2 += (z[a] - c[a]) * (z[a] - c[a]);
    best = std::min(best, d2);
  }
  return best;
}

std::vector<double> PlateauCutoff::derivatives(std::span<const double> z, int max_order) const {
  if (static_cast<int>(z.size()) != dim_) throw DimensionError("cutoff: point has wrong dimension");
  if (max_order > 3) throw std::invalid_argument("cutoff: derivatives above order 3 are not provided");
  const MultiIndexSet& set = cached_multi_index_set(dim_, max_order);
  std::vector<double> out(set.size(), 0.0);

  const double T = temperature_;
  const double reach2 = r_out2_ + T * (log_count_ + kPruneExponent);
  const double reach = std::sqrt(reach2);
  const std::size_t count = point_count();
  // candidates by first coordinate (points_ is sorted on it)
  std::size_t lo = 0, hi = count;
  {
    std::size_t a = 0, b = count;
    while (a < b) {
      const std::size_t m = (a + b) / 2;
      if (points_[m * dim_] < z[0] - reach) a = m + 1; else b = m;
    }
    lo = a;
    b = count;
    while (a < b) {
      const std::size_t m = (a + b) / 2;
      if (points_[m * dim_] <= z[0] + reach) a = m + 1; else b = m;
    }
    hi = a;
  }
  double m2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = lo; i < hi; ++i) {
    const double* c = points_.data() + i * dim_;
    double d2 = 0.0;
    for (int a = 0; a < dim_; ++a) d2 += (z[a] - c[a]) * (z[a] - c[a]);
    m2 = std::min(m2, d2);
  }
  if (m2 <= r_in2_) {
    out[0] = 1.0;
    return out;
  }
  if (m2 >= r_out2_ + T * log_count_) return out;

  const int d = dim_;
  double W = 0.0;
  std::vector<double> W1(d, 0.0), W2(max_order >= 2 ? d * d : 0, 0.0), W3(max_order >= 3 ? d * d * d : 0, 0.0);
  std::vector<double> q(d);
  for (std::size_t i = lo; i < hi; ++i) {
    const double* c = points_.data() + i * dim_;
    double d2 = 0.0;
    for (int a = 0; a < d; ++a) {
      q[a] = 2.0 * (z[a] - c[a]);
      d2 += (z[a] - c[a]) * (z[a] - c[a]);
    }
    const double ex = (d2 - m2) / T;
    if (ex > kPruneExponent) continue;
    const double w = std::exp(-ex);
    W += w;
    if (max_order >= 1)
      for (int a = 0; a < d; ++a) W1[a] += -w * q[a] / T;
    if (max_order >= 2)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) W2[a * d + b] += w * (q[a] * q[b] / (T * T) - (a == b ? 2.0 : 0.0) / T);
    if (max_order >= 3)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int e = 0; e < d; ++e) {
            const double qab = a == b ? 2.0 : 0.0, qae = a == e ? 2.0 : 0.0, qbe = b == e ? 2.0 : 0.0;
            W3[(a * d + b) * d + e] +=
                w * (-q[a] * q[b] * q[e] / (T * T * T) + (qab * q[e] + qae * q[b] + qbe * q[a]) / (T * T));
          }
  }
  // s = m2 - T log W;  u = (R_out^2 - s) / (R_out^2 - R_in^2) = (R_out^2 - m2 + T log W) / Delta
  const double delta = r_out2_ - r_in2_;
  const double u = (r_out2_ - m2 + T * std::log(W)) / delta;
  const StepJet g = smooth_step(u);
  out[0] = g.g[0];
  if (max_order == 0) return out;

  // derivatives of L = log W, then u_a = (T / Delta) L_a
  const double k = T / delta;
  auto L1 = [&](int a) { return W1[a] / W; };
  auto L2 = [&](int a, int b) { return W2[a * d + b] / W - W1[a] * W1[b] / (W * W); };
  auto L3 = [&](int a, int b, int e) {
    return W3[(a * d + b) * d + e] / W -
           (W2[a * d + b] * W1[e] + W2[a * d + e] * W1[b] + W2[b * d + e] * W1[a]) / (W * W) +
           2 * W1[a] * W1[b] * W1[e] / (W * W * W);
  };
  for (std::size_t i = 1; i < set.size(); ++i) {
    const auto ax = axes_of(set[i]);
    if (ax.size() == 1) {
      out[i] = g.g[1] * k * L1(ax[0]);
    } else if (ax.size() == 2) {
      const int a = ax[0], b = ax[1];
      out[i] = g.g[2] * k * L1(a) * k * L1(b) + g.g[1] * k * L2(a, b);
    } else {
      const int a = ax[0], b = ax[1], e = ax[2];
      const double ua = k * L1(a), ub = k * L1(b), ue = k * L1(e);
      out[i] = g.g[3] * ua * ub * ue + g.g[2] * (k * L2(a, b) * ue + k * L2(a, e) * ub + k * L2(b, e) * ua) +
               g.g[1] * k * L3(a, b, e);
    }
  }
  return out;
}

CutoffTerm::CutoffTerm(HamiltonianModel source, std::shared_ptr<const PlateauCutoff> cutoff)
    : source_(std::move(source)), cutoff_(std::move(cutoff)) {
  if (!cutoff_ || cutoff_->dim() != 2 * source_.n()) throw DimensionError("CutoffTerm: dimension mismatch");
}

std::vector<double> CutoffTerm::derivatives(std::span<const double> z, int max_order) const {
  const auto phi = cutoff_->derivatives(z, max_order);
  const int d = dim();
  const MultiIndexSet& set = cached_multi_index_set(d, max_order);
  std::vector<double> out(set.size(), 0.0);
  bool zero = true;
  for (double v : phi) zero = zero && v == 0.0;
  if (zero) return out;
  const auto h = source_.derivatives(z, max_order);
  // Leibniz: (h phi)^alpha = sum_{beta <= alpha} C(alpha, beta) h^beta phi^{alpha - beta}
  std::vector<int> gamma(d);
  for (std::size_t i = 0; i < set.size(); ++i) {
    const auto& alpha = set[i];
    for (std::size_t j = 0; j < set.size(); ++j) {
      const auto& beta = set[j];
      double c = 1.0;
      bool ok = true;
      for (int a = 0; a < d && ok; ++a) {
        if (beta[a] > alpha[a]) {
          ok = false;
          break;
        }
        gamma[a] = alpha[a] - beta[a];
        for (int t = 0; t < beta[a]; ++t) c = c * (alpha[a] - t) / (t + 1);
      }
      if (!ok) continue;
      out[i] += c * h[j] * phi[set.position(gamma)];
    }
  }
  return out;
}

HamiltonianModel cutoff_extend(const HamiltonianModel& H, const Torus& K0, double r, double rho) {
  if (!(rho >= 0.0)) throw std::invalid_argument("cutoff_extend: rho must be nonnegative");
  if (H.n() != K0.n()) throw DimensionError("cutoff_extend: Hamiltonian and torus dimensions differ");
  auto cutoff = std::make_shared<const PlateauCutoff>(K0, r);
  const Box& box = cutoff->box();
  if (const auto& own = H.validity_box()) {
    for (int a = 0; a < box.dim(); ++a)
      if (box.lower[a] < own->lower[a] || box.upper[a] > own->upper[a])
        throw DomainError("cutoff_extend: the 3r-neighbourhood of the torus leaves the Hamiltonian's domain");
  }
  const int cls = H.analytic() ? kInfinitelySmooth : H.smoothness_class();
  return HamiltonianModel(H.n(), {}, {std::make_shared<CutoffTerm>(H, cutoff)}, cls, box);
}

HamiltonianModel smoothing_target(const HamiltonianModel& H, std::shared_ptr<const PlateauCutoff> cutoff) {
  const HamiltonianModel smooth = H.analytic_part();
  auto extra = smooth.extra();
  int cls = kAnalytic;
  if (!H.analytic()) {
    extra.push_back(std::make_shared<CutoffTerm>(H.rough_part().with_box(cutoff->box()), cutoff));
    cls = H.smoothness_class();
  }
  return HamiltonianModel(H.n(), smooth.terms(), extra, cls, cutoff->box());
}

std::vector<std::vector<double>> norm_points(const PlateauCutoff& cutoff, int grid, double radius) {
  if (grid < 1) throw std::invalid_argument("norm_points: grid must be positive");
  const Box& box = cutoff.box();
  const int d = box.dim();
  long total = 1;
  for (int a = 0; a < d; ++a) total *= grid;
  std::vector<std::vector<double>> out;
  std::vector<double> z(d);
  for (long c = 0; c < total; ++c) {
    long rem = c;
    for (int a = 0; a < d; ++a) {
      z[a] = box.lower[a] + box.width(a) * ((rem % grid) + 0.5) / grid;
      rem /= grid;
    }
    if (radius > 0.0 && cutoff.min_sq_distance(z) > radius * radius) continue;
    out.push_back(z);
  }
  return out;
}

double sup_distance(const HamiltonianModel& a, const HamiltonianModel& b,
                    const std::vector<std::vector<double>>& points, int order) {
  double worst = 0.0;
  for (const auto& z : points) {
    const auto da = a.derivatives(z, order), db = b.derivatives(z, order);
    for (std::size_t i = 0; i < da.size(); ++i) worst = std::max(worst, std::abs(da[i] - db[i]));
  }
  return worst;
}

double sup_norm(const HamiltonianModel& h, const std::vector<std::vector<double>>& points, int order) {
  double worst = 0.0;
  for (const auto& z : points)
    for (double v : h.derivatives(z, order)) worst = std::max(worst, std::abs(v));
  return worst;
}

SmoothingSequence build_smoothing_sequence(const HamiltonianModel& H, std::shared_ptr<const PlateauCutoff> cutoff,
                                           int l, double sigma, double e0_norm, const SmoothingOptions& options) {
  if (l < 1) throw std::invalid_argument("smoothing: smoothness class l must be at least 1");
  if (options.count < 1) throw std::invalid_argument("smoothing: count must be positive");
  if (!cutoff) throw std::invalid_argument("smoothing: missing cutoff");
  const int d = 2 * H.n();
  if (static_cast<int>(options.base_degrees.size()) != d || static_cast<int>(options.growth.size()) != d)
    throw DimensionError("smoothing: one base degree and one growth factor per axis required");

  SmoothingSequence seq;
  seq.l = l;
  seq.sigma = sigma;
  seq.e0_norm = e0_norm;
  seq.cutoff = cutoff;
  seq.target = smoothing_target(H, cutoff);
  seq.trivial = H.analytic();
  const auto points = norm_points(*cutoff, options.norm_grid, options.norm_radius_factor * cutoff->r());
  seq.target_c3_norm = sup_norm(seq.target, points);

  std::vector<int> deg = options.base_degrees;
  const HamiltonianModel smooth = H.analytic_part();
  const HamiltonianModel rough = H.rough_part().with_box(cutoff->box());
  const CutoffTerm source(rough, cutoff);
  std::vector<std::shared_ptr<const BernsteinApproximant>> parts;
  for (int k = 0; k < options.count; ++k) {
    if (k > 0)
      for (int a = 0; a < d; ++a) deg[a] *= options.growth[a];
    if (*std::max_element(deg.begin(), deg.end()) > options.max_degree)
      throw SmoothingError("smoothing: index " + std::to_string(k) + " needs degree above the configured maximum " +
                           std::to_string(options.max_degree));
    SequenceEntry e;
    e.index = k;
    e.degrees = deg;
    seq.entries.push_back(e);
    if (seq.trivial) {
      seq.approximants.push_back(seq.target);
      continue;
    }
    const PlateauCutoff& phi = *cutoff;
    ScalarField g = [&](std::span<const double> z) {
      const double c = phi.value(z);
      return c == 0.0 ? 0.0 : c * rough.value(z);
    };
    parts.push_back(BernsteinApproximant::build(g, cutoff->box(), {deg}));
    auto extra = smooth.extra();
    extra.push_back(std::make_shared<BernsteinTerm>(parts.back()));
    seq.approximants.emplace_back(H.n(), smooth.terms(), extra, kAnalytic, cutoff->box());
  }

  // The analytic part is shared by target and approximants, so every distance
  // only involves the Bernstein parts and the cutoff-multiplied rough part.
  if (seq.trivial)
    for (auto& e : seq.entries) e.c3_norm = seq.target_c3_norm;
  if (!seq.trivial) {
    std::vector<std::vector<double>> jets(options.count);
    for (const auto& z : points) {
      const auto src = source.derivatives(z, 3);
      const auto base = smooth.derivatives(z, 3);
      for (int k = 0; k < options.count; ++k) jets[k] = parts[k]->derivatives(z, 3);
      for (int k = 0; k < options.count; ++k) {
        SequenceEntry& e = seq.entries[k];
        for (std::size_t i = 0; i < src.size(); ++i) {
          e.c3_norm = std::max(e.c3_norm, std::abs(base[i] + jets[k][i]));
          const double t = std::abs(jets[k][i] - src[i]);
          e.c3_to_target = std::max(e.c3_to_target, t);
          if (i == 0) e.c0_to_target = std::max(e.c0_to_target, t);
          if (k + 1 < options.count) {
            const double g = std::abs(jets[k][i] - jets[k + 1][i]);
            e.c3_gap = std::max(e.c3_gap, g);
            if (i == 0) e.c0_gap = std::max(e.c0_gap, g);
          }
        }
      }
    }
  }

  const double rate = l + 2.0 * sigma;
  for (int k = 0; k + 1 < options.count; ++k)
    seq.A_const = std::max(seq.A_const, seq.entries[k].c3_gap * std::pow(4.0, k * rate));
  for (int k = 0; k < options.count; ++k) {
    SequenceEntry& e = seq.entries[k];
    e.bound = seq.A_const * std::pow(4.0, -k * rate);
    if (e.c3_gap > e.bound * (1 + 1e-12))
      throw SmoothingError("smoothing: gap exceeds the recorded envelope at index " + std::to_string(k));
  }
  for (int k = 0; k < options.count; ++k)
    if (seq.A_const * std::pow(4.0, -(k - 1) * rate) <= e0_norm) {
      seq.trigger_index = k;
      break;
    }
  return seq;
}

}  // namespace kamtori
