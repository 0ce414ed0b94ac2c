#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kamtori/hamiltonian.hpp"

namespace kamtori {

/// Real function on a box, in box coordinates.
using ScalarField = std::function<double(std::span<const double>)>;

/// Bernstein basis values b_{p,k}(x) = C(k,p) x^p (1-x)^{k-p} for the window of p
/// where they exceed 1e-18 of the peak; the dropped mass is below double precision.
struct BernsteinWindow {
  int first = 0;
  std::vector<long double> weights;
};

/// Requires 0 <= x <= 1 (a slack of 1e-12 is clamped).
BernsteinWindow bernstein_weights(int k, double x);

/// One-variable Bernstein polynomial sum_p f(p/k) b_{p,k}(x) on [0, 1].
class Bernstein1D {
 public:
  /// samples[p] = f(p / k), p = 0..k, with k = samples.size() - 1 >= 1.
  explicit Bernstein1D(std::vector<double> samples);
  static Bernstein1D from_function(const std::function<double(double)>& f, int k);

  int degree() const { return static_cast<int>(samples_.size()) - 1; }
  const std::vector<double>& samples() const { return samples_; }

  double operator()(double x) const { return derivative(x, 0); }
  /// k(k-1)...(k-q+1) sum_p Delta^q f(p/k) b_{p,k-q}(x); throws for q > k.
  double derivative(double x, int q) const;
  /// Delta^q f(p/k) for p = 0..k-q (standard q-th forward difference with step 1/k).
  std::vector<double> forward_differences(int q) const;

 private:
  std::vector<double> samples_;
};

enum class InnerPolicy {
  /// Every slice uses the same fixed inner degrees (tensor-product operator).
  Tensor,
  /// Each slice's inner degree is the least in a doubling schedule whose measured
  /// C^3 slice error meets epsilon / (8 (k+1) k (k-1) (k-2)); unreachable tolerances throw.
  Strict,
};

struct BernsteinOptions {
  /// Degree per axis; for Strict the inner entries are the starting degrees.
  std::vector<int> degrees;
  InnerPolicy policy = InnerPolicy::Tensor;
  double epsilon = 1e-2;           ///< Strict only: the outer tolerance epsilon_k
  int max_inner_degree = 4096;     ///< Strict only: end of the doubling schedule
  int norm_grid = 16;              ///< Strict only: cell-centred points per axis for slice norms
};

/// Multivariate Bernstein approximant built axis by axis: the last axis is the
/// outer Bernstein operator and each of its k+1 slices is an approximant in the
/// remaining variables.
class BernsteinApproximant {
 public:
  static std::shared_ptr<const BernsteinApproximant> build(const ScalarField& f, const Box& box,
                                                           const BernsteinOptions& options);

  int dim() const { return box_.dim(); }
  const Box& box() const { return box_; }
  /// Outer degree of this node.
  int degree() const { return degree_; }
  /// Largest degree used along each axis.
  std::vector<int> max_degrees() const;
  /// Inner degree actually used for every slice (empty in one dimension).
  std::vector<int> slice_degrees() const;
  double sample_min() const { return min_; }
  double sample_max() const { return max_; }
  std::size_t sample_count() const;

  double value(std::span<const double> x) const;
  /// All partials with |alpha| <= max_order in MultiIndexSet order, box coordinates.
  std::vector<double> derivatives(std::span<const double> x, int max_order) const;
  /// Same in unit-cube coordinates y in [0,1]^d.
  std::vector<double> derivatives_unit(std::span<const double> y, int max_order) const;

  /// Flattened samples in the order used by build (outer index slowest).
  void collect_samples(std::vector<double>& out) const;

 private:
  BernsteinApproximant() = default;
  struct WindowCache;
  std::vector<long double> eval(const double* y, int max_order, WindowCache& cache) const;

  Box box_;
  int degree_ = 0;
  bool zero_ = false;
  std::vector<double> samples_;                    // leaf: f(p/k)
  std::vector<BernsteinApproximant> slices_;       // node
  double min_ = 0.0, max_ = 0.0;

  friend struct BernsteinBuilder;
};

/// Hamiltonian term backed by a Bernstein approximant (a polynomial, hence analytic).
class BernsteinTerm : public HamiltonianTerm {
 public:
  explicit BernsteinTerm(std::shared_ptr<const BernsteinApproximant> approx) : approx_(std::move(approx)) {}
  int dim() const override { return approx_->dim(); }
  bool analytic() const override { return true; }
  std::vector<double> derivatives(std::span<const double> z, int max_order) const override {
    return approx_->derivatives(z, max_order);
  }
  std::string kind() const override { return "bernstein"; }
  const BernsteinApproximant& approximant() const { return *approx_; }

 private:
  std::shared_ptr<const BernsteinApproximant> approx_;
};

/// Partial derivatives of a black-box field by tensor 5-point stencils with step h.
std::vector<double> stencil_derivatives(const ScalarField& f, std::span<const double> x, int max_order, double h);

}  // namespace kamtori
