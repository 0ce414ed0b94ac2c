#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "kamtori/fourier.hpp"

namespace kamtori {

/// Embedding K: T^n -> T^n x R^n written as K(theta) = (theta, 0) + P(theta) with P
/// a periodic FourierMap valued in R^{2n}. The first n coordinates are the lifted
/// angles, the last n the actions.
class Torus {
 public:
  Torus() = default;
  explicit Torus(FourierMap periodic);

  /// K(theta) = (theta, y0).
  static Torus circle(std::span<const double> y0, int trunc);

  int n() const { return periodic_.dim_domain(); }
  int trunc() const { return periodic_.trunc(); }
  const FourierMap& periodic() const { return periodic_; }

  /// Lifted embedding sampled on the (2M+1)^n grid.
  GridSamples samples() const;
  std::vector<double> embed(std::span<const double> theta) const;
  /// DK(theta) (2n x n) at every grid point.
  std::vector<Eigen::MatrixXd> tangent_on_grid() const;
  /// FourierMap of the 2n x n entries of DK, row-major, including the identity block.
  FourierMap tangent() const;

  Torus resized(int trunc) const { return Torus(periodic_.resized(trunc)); }

 private:
  FourierMap periodic_;
};

/// d_omega K = (omega, 0) + d_omega P, as a FourierMap.
FourierMap torus_directional_derivative(const Torus& K, std::span<const double> omega);

}  // namespace kamtori
