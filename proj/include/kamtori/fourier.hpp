#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace kamtori {

using cplx = std::complex<double>;

/// Real-valued samples of a map T^n -> R^m on the uniform grid with N points
/// per axis, theta_a = j_a / N. Point index j = sum_a j_a N^a (axis 0 fastest);
/// values are stored point-major: values[j * m + c].
struct GridSamples {
  int dim_domain = 0;
  int dim_range = 0;
  int points_per_axis = 0;
  std::vector<double> values;

  std::size_t num_points() const;
  std::span<const double> at(std::size_t point) const {
    return {values.data() + point * dim_range, static_cast<std::size_t>(dim_range)};
  }
  /// Grid coordinates of a point index.
  std::vector<double> theta(std::size_t point) const;
  /// Largest |value| over all points and components.
  double max_abs() const;
};

struct StripNormEstimate {
  double rho = 0.0;
  double value = 0.0;
  /// Modes in the outer dyadic block (|k|_inf > M/2) carry more than 1e-10 of the total.
  bool tail_flag = false;
};

/// Truncated Fourier series K(theta) = sum_{|k|_inf <= M} K_k e^{2 pi i k.theta},
/// K: T^n -> R^m. All (2M+1)^n wavevectors are held; reality K_{-k} = conj(K_k)
/// is restored by symmetrize() and by every analysis.
class FourierMap {
 public:
  FourierMap() = default;
  FourierMap(int dim_domain, int dim_range, int trunc);

  static FourierMap constant(int dim_domain, std::span<const double> value, int trunc);

  int dim_domain() const { return n_; }
  int dim_range() const { return m_; }
  int trunc() const { return trunc_; }
  int points_per_axis() const { return 2 * trunc_ + 1; }
  std::size_t num_modes() const { return num_modes_; }

  std::size_t mode_index(std::span<const int> k) const;
  std::vector<int> wavevector(std::size_t mode) const;
  bool contains(std::span<const int> k) const;

  cplx coeff(std::size_t mode, int component) const { return coeffs_[mode * m_ + component]; }
  cplx& coeff(std::size_t mode, int component) { return coeffs_[mode * m_ + component]; }
  cplx mode(std::span<const int> k, int component) const;
  /// Sets K_k and K_{-k} = conj(K_k) together.
  void set_mode(std::span<const int> k, int component, cplx value);

  const std::vector<cplx>& coefficients() const { return coeffs_; }

  /// Samples on the (2M+1)^n grid.
  GridSamples synthesize() const;
  /// Direct evaluation of the series at an arbitrary real point.
  std::vector<double> evaluate(std::span<const double> theta) const;

  /// Same function at a different truncation (modes beyond the new order are dropped).
  FourierMap resized(int trunc) const;
  /// Component slice [first, first + count).
  FourierMap components(int first, int count) const;
  /// Partial derivative in theta_axis.
  FourierMap partial(int axis) const;
  /// theta -> K(theta + shift), exact on the stored modes.
  FourierMap shifted(std::span<const double> shift) const;

  void symmetrize();

  FourierMap& operator+=(const FourierMap& other);
  FourierMap& operator-=(const FourierMap& other);
  FourierMap& operator*=(double s);

 private:
  int n_ = 0;
  int m_ = 0;
  int trunc_ = 0;
  std::size_t num_modes_ = 0;
  std::vector<cplx> coeffs_;
};

FourierMap operator+(FourierMap a, const FourierMap& b);
FourierMap operator-(FourierMap a, const FourierMap& b);
FourierMap operator*(double s, FourierMap a);

/// Discrete Fourier analysis of grid samples; the grid must have an odd number of
/// points per axis, N = 2M + 1.
FourierMap analyze(const GridSamples& samples);

/// Mode k of the result is 2 pi i (k.omega) times mode k of K.
FourierMap directional_derivative(const FourierMap& K, std::span<const double> omega);

/// Real part of the k = 0 mode.
std::vector<double> average(const FourierMap& K);

/// max over components of sum_k |K_k| e^{2 pi |k|_1 rho}: an upper bound for the
/// sup-norm of the series on the complex strip |Im theta| <= rho.
StripNormEstimate strip_norm(const FourierMap& K, double rho);

/// For a map whose components are the row-major entries of a rows x cols matrix:
/// the operator max-norm bound max_i sum_j strip_norm(K_ij).
double matrix_strip_norm(const FourierMap& K, int rows, int cols, double rho);

}  // namespace kamtori
