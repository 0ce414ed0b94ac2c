#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kamtori/fourier.hpp"
#include "kamtori/torus.hpp"

namespace kamtori {

/// Smoothness class marker for real-analytic models.
inline constexpr int kAnalytic = -1;
/// Smoothness class marker for C-infinity models that are not real-analytic (cutoff extensions).
inline constexpr int kInfinitelySmooth = 1 << 20;

/// J = [[0, I], [-I, 0]] in dimension 2n.
Eigen::MatrixXd symplectic_J(int n);

/// Axis-aligned box [a_1, b_1] x ... x [a_d, b_d].
struct Box {
  std::vector<double> lower;
  std::vector<double> upper;

  int dim() const { return static_cast<int>(lower.size()); }
  double width(int axis) const { return upper[axis] - lower[axis]; }
  bool contains(std::span<const double> z, double slack = 0.0) const;
  /// y_a = (x_a - a_a) / (b_a - a_a); throws on a zero-width axis.
  std::vector<double> to_unit(std::span<const double> x) const;
  std::vector<double> from_unit(std::span<const double> y) const;
};

/// All multi-indices alpha in N^dim with |alpha| <= max_order, ordered by total
/// order and then lexicographically (the zero index first).
class MultiIndexSet {
 public:
  MultiIndexSet(int dim, int max_order);
  int dim() const { return dim_; }
  int max_order() const { return max_order_; }
  std::size_t size() const { return indices_.size(); }
  const std::vector<int>& operator[](std::size_t i) const { return indices_[i]; }
  std::size_t position(const std::vector<int>& alpha) const;
  /// Position of the unit vector e_i, or of e_i + e_j.
  std::size_t first(int i) const;
  std::size_t second(int i, int j) const;

 private:
  int dim_;
  int max_order_;
  std::vector<std::vector<int>> indices_;
  std::map<std::vector<int>, std::size_t> lookup_;
};

/// Shared immutable instance; safe to call from several threads.
const MultiIndexSet& cached_multi_index_set(int dim, int max_order);

struct Jet {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

/// A summand of a Hamiltonian given through its partial derivatives.
class HamiltonianTerm {
 public:
  virtual ~HamiltonianTerm() = default;
  virtual int dim() const = 0;
  virtual bool analytic() const = 0;
  /// Every partial derivative with |alpha| <= max_order, in MultiIndexSet order.
  virtual std::vector<double> derivatives(std::span<const double> z, int max_order) const = 0;
  virtual std::string kind() const = 0;
};

/// c e^{2 pi i k.x} y^m.
struct FourierTaylorTerm {
  std::vector<int> k;
  std::vector<int> m;
  std::complex<double> c;
};

/// H(x, y) on T^n x R^n as a Fourier-Taylor sum plus optional general terms
/// (non-analytic profiles, cutoff extensions, Bernstein approximants).
class HamiltonianModel {
 public:
  HamiltonianModel() = default;
  HamiltonianModel(int n, std::vector<FourierTaylorTerm> terms,
                   std::vector<std::shared_ptr<const HamiltonianTerm>> extra = {},
                   int smoothness_class = kAnalytic, std::optional<Box> validity_box = std::nullopt);

  int n() const { return n_; }
  const std::vector<FourierTaylorTerm>& terms() const { return terms_; }
  const std::vector<std::shared_ptr<const HamiltonianTerm>>& extra() const { return extra_; }
  int smoothness_class() const { return smoothness_; }
  const std::optional<Box>& validity_box() const { return box_; }
  bool analytic() const;

  /// Fourier-Taylor terms and analytic extra terms only.
  HamiltonianModel analytic_part() const;
  /// Non-analytic extra terms only (no Fourier-Taylor terms).
  HamiltonianModel rough_part() const;
  HamiltonianModel with_box(Box box) const;
  HamiltonianModel plus(const HamiltonianModel& other) const;

  std::vector<double> derivatives(std::span<const double> z, int max_order) const;
  Jet evaluate_jet(std::span<const double> z) const;
  double value(std::span<const double> z) const;

 private:
  void check_domain(std::span<const double> z) const;

  int n_ = 0;
  std::vector<FourierTaylorTerm> terms_;
  std::vector<std::shared_ptr<const HamiltonianTerm>> extra_;
  int smoothness_ = kAnalytic;
  std::optional<Box> box_;
};

/// amplitude * 4^p t^p (1 - t)^p with t = frac(x_axis): a periodic spline of class
/// C^{p-1} but not C^p.
class PeriodicBumpSpline : public HamiltonianTerm {
 public:
  PeriodicBumpSpline(int dim, int axis, double amplitude, int order);
  int dim() const override { return dim_; }
  bool analytic() const override { return false; }
  std::vector<double> derivatives(std::span<const double> z, int max_order) const override;
  std::string kind() const override { return "periodic_bump_spline"; }

  int axis() const { return axis_; }
  double amplitude() const { return amplitude_; }
  int order() const { return order_; }
  /// q-th derivative of the 1-D profile.
  double profile(double x, int q) const;

 private:
  int dim_;
  int axis_;
  double amplitude_;
  int order_;
  std::vector<double> poly_;  // power-basis coefficients of amplitude * 4^p t^p (1-t)^p
};

/// Samples J grad H (K(theta)) on the grid of K and analyzes them.
FourierMap vector_field(const HamiltonianModel& H, const Torus& K);

/// A(theta) = D X_H (K(theta)) = J D^2 H (K(theta)); components are the
/// row-major entries of the 2n x 2n matrix.
FourierMap linearization(const HamiltonianModel& H, const Torus& K);

}  // namespace kamtori
