#pragma once

#include <Eigen/Dense>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kamtori/cohomology.hpp"
#include "kamtori/diophantine.hpp"
#include "kamtori/fourier.hpp"
#include "kamtori/hamiltonian.hpp"
#include "kamtori/torus.hpp"

namespace kamtori {

struct ErrorField {
  FourierMap e;  ///< J grad H(K) - d_omega K
  StripNormEstimate norm_rho;
  double norm_grid = 0.0;  ///< max |e| over grid points and components
};

ErrorField invariance_error(const HamiltonianModel& H, const Torus& K, std::span<const double> omega,
                            double rho = 0.0);

struct NondegeneracyData {
  FourierMap N;  ///< (DK^T DK)^{-1}, n x n row-major
  FourierMap S;  ///< N DK^T (A J - J A) DK N, n x n row-major
  Eigen::MatrixXd avg_S;
  Eigen::MatrixXd avg_S_inv;
  double N_norm = 0.0;          ///< matrix strip norm at the requested width
  double avg_S_inv_norm = 0.0;  ///< max row sum of <S>^{-1}
  double DK_norm = 0.0;
  double cond_DK = 0.0;         ///< max over the grid of cond(DK^T DK)
  double avg_S_min_sv = 0.0;
};

/// Throws NondegeneracyError when DK^T DK is ill-conditioned (cond >= 1e8) or <S> is singular.
NondegeneracyData nondegeneracy(const HamiltonianModel& H, const Torus& K, std::span<const double> omega,
                                double rho = 0.0);

struct StepReport {
  double error_grid = 0.0;  ///< |e|_grid of the input torus
  DivisorReport normal_divisors;
  DivisorReport tangent_divisors;
  double eta_tangent_norm = 0.0;  ///< grid sup of the first projected component
  double eta_normal_norm = 0.0;
  double eta_normal_average = 0.0;  ///< max |<eta_2>|, dropped by the normal solve
  double min_det_frame = 0.0;
  double correction_norm = 0.0;  ///< grid sup of the torus update
};

/// One quasi-Newton correction in the adapted frame [DK | J DK N].
std::pair<Torus, StepReport> newton_step(const HamiltonianModel& H, const Torus& K, const FrequencyVector& omega,
                                         const NondegeneracyData& nd);

struct SolveOptions {
  double tol = 1e-11;
  int max_iter = 20;
  double rho = 0.0;  ///< width for strip norms in the trace
  /// If set, a diverging run whose best error is below this floor returns that iterate instead of throwing.
  std::optional<double> floor_tol;
  bool adapt_trunc = false;  ///< double the truncation when the tail flag trips
  int max_trunc = 256;
};

struct IterationRecord {
  int iter = 0;
  int trunc = 0;
  double error_grid = 0.0;
  double error_rho = 0.0;
  bool tail_flag = false;
  double DK_norm = 0.0;
  double N_norm = 0.0;
  double avg_S_inv_norm = 0.0;
  double cond_DK = 0.0;
  std::optional<StepReport> step;  ///< the step taken from this iterate, if any
};

struct SolveResult {
  Torus K;
  std::vector<IterationRecord> trace;
  bool converged = false;
  int steps = 0;
  std::string stop_reason;  ///< "tolerance", "max_iter" or "floor"
};

SolveResult solve_torus(const HamiltonianModel& H, const Torus& K0, const FrequencyVector& omega,
                        const SolveOptions& options = {});

}  // namespace kamtori
