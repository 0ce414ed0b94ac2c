#include "kamtori/cohomology.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kamtori/errors.hpp"

namespace kamtori {

CohomologySolution solve_cohomological(const FourierMap& g, const FrequencyVector& omega) {
  const int n = g.dim_domain();
  if (omega.dim() != n) throw DimensionError("solve_cohomological: frequency and map dimensions differ");
  if (omega.horizon < g.trunc())
    throw std::invalid_argument("solve_cohomological: Diophantine horizon " + std::to_string(omega.horizon) +
                                " is below the truncation order " + std::to_string(g.trunc()));

  CohomologySolution out{FourierMap(n, g.dim_range(), g.trunc()), average(g), {}};
  DivisorReport& rep = out.report;
  rep.min_divisor = std::numeric_limits<double>::infinity();
  const int m = g.dim_range();
  for (std::size_t idx = 0; idx < g.num_modes(); ++idx) {
    const auto k = g.wavevector(idx);
    double dot = 0.0;
    bool zero = true;
    for (int a = 0; a < n; ++a) {
      dot += k[a] * omega.omega[a];
      zero = zero && k[a] == 0;
    }
    if (zero) continue;
    const double div = std::abs(dot);
    if (div < rep.min_divisor) {
      rep.min_divisor = div;
      rep.min_divisor_k = k;
    }
    if (div < kResonanceTolerance) throw ResonanceError(k, div);
    const cplx factor = 1.0 / cplx(0.0, 2.0 * std::numbers::pi * dot);
    bool nonzero = false;
    for (int c = 0; c < m; ++c) {
      out.phi.coeff(idx, c) = g.coeff(idx, c) * factor;
      nonzero = nonzero || g.coeff(idx, c) != 0.0;
    }
    if (nonzero && std::abs(factor) > rep.max_amplification) {
      rep.max_amplification = std::abs(factor);
      rep.max_amplification_k = k;
    }
  }
  return out;
}

}  // namespace kamtori
