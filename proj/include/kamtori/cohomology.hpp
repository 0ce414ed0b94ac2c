#pragma once

#include <vector>

#include "kamtori/diophantine.hpp"
#include "kamtori/fourier.hpp"

namespace kamtori {

/// Divisors below this magnitude are treated as exact resonances.
inline constexpr double kResonanceTolerance = 1e-14;

struct DivisorReport {
  double min_divisor = 0.0;            ///< min |k.omega| over retained k != 0
  std::vector<int> min_divisor_k;      ///< wavevector attaining it
  double max_amplification = 0.0;      ///< max |phi_k| / |g_k| over modes with g_k != 0
  std::vector<int> max_amplification_k;
};

struct CohomologySolution {
  FourierMap phi;               ///< mean-free solution of d_omega phi = g - <g>
  std::vector<double> average;  ///< <g>, the solvability obstruction
  DivisorReport report;
};

/// Solves d_omega phi = g - <g> mode by mode. Requires omega.horizon >= trunc(g)
/// and throws ResonanceError on a retained near-resonant mode.
CohomologySolution solve_cohomological(const FourierMap& g, const FrequencyVector& omega);

}  // namespace kamtori
