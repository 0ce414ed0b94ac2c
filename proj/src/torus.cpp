#include "kamtori/torus.hpp"

#include "kamtori/errors.hpp"

namespace kamtori {

Torus::Torus(FourierMap periodic) : periodic_(std::move(periodic)) {
  if (periodic_.dim_range() != 2 * periodic_.dim_domain())
    throw DimensionError("Torus: periodic part must map T^n into R^{2n}");
}

Torus Torus::circle(std::span<const double> y0, int trunc) {
  const int n = static_cast<int>(y0.size());
  std::vector<double> value(2 * n, 0.0);
  for (int i = 0; i < n; ++i) value[n + i] = y0[i];
  return Torus(FourierMap::constant(n, value, trunc));
}

GridSamples Torus::samples() const {
  GridSamples s = periodic_.synthesize();
  const int n = this->n();
  for (std::size_t j = 0; j < s.num_points(); ++j) {
    const auto theta = s.theta(j);
    for (int a = 0; a < n; ++a) s.values[j * 2 * n + a] += theta[a];
  }
  return s;
}

std::vector<double> Torus::embed(std::span<const double> theta) const {
  auto z = periodic_.evaluate(theta);
  for (int a = 0; a < n(); ++a) z[a] += theta[a];
  return z;
}

FourierMap Torus::tangent() const {
  const int n = this->n();
  FourierMap DK(n, 2 * n * n, trunc());
  for (int col = 0; col < n; ++col) {
    const FourierMap d = periodic_.partial(col);
    for (std::size_t idx = 0; idx < DK.num_modes(); ++idx)
      for (int row = 0; row < 2 * n; ++row) DK.coeff(idx, row * n + col) = d.coeff(idx, row);
  }
  std::vector<int> zero(n, 0);
  const std::size_t z = DK.mode_index(zero);
  for (int a = 0; a < n; ++a) DK.coeff(z, a * n + a) += 1.0;
  return DK;
}

std::vector<Eigen::MatrixXd> Torus::tangent_on_grid() const {
  const int n = this->n();
  const GridSamples s = tangent().synthesize();
  std::vector<Eigen::MatrixXd> out(s.num_points(), Eigen::MatrixXd(2 * n, n));
  for (std::size_t j = 0; j < s.num_points(); ++j)
    for (int row = 0; row < 2 * n; ++row)
      for (int col = 0; col < n; ++col) out[j](row, col) = s.values[j * 2 * n * n + row * n + col];
  return out;
}

FourierMap torus_directional_derivative(const Torus& K, std::span<const double> omega) {
  FourierMap d = directional_derivative(K.periodic(), omega);
  std::vector<int> zero(K.n(), 0);
  const std::size_t z = d.mode_index(zero);
  for (int a = 0; a < K.n(); ++a) d.coeff(z, a) += omega[a];
  return d;
}

}  // namespace kamtori
