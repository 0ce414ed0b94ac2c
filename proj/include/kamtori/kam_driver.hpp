#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "kamtori/diophantine.hpp"
#include "kamtori/hamiltonian.hpp"
#include "kamtori/smoothing.hpp"
#include "kamtori/torus.hpp"
#include "kamtori/torus_solver.hpp"

namespace kamtori {

/// Polynomial with positive coefficients in (y1, y2, y3, y4) = (mu, d, v, tau),
/// written like "y1*y2^2*y3^2*y4^2" or "2*y1 + 0.5*y2*y4^3 + 1".
class LambdaPolynomial {
 public:
  explicit LambdaPolynomial(std::string spec);
  const std::string& spec() const { return spec_; }
  double operator()(double mu, double d, double v, double tau) const;

 private:
  struct Monomial {
    double coeff;
    std::array<int, 4> exponent;
  };
  std::string spec_;
  std::vector<Monomial> terms_;
};

inline constexpr const char* kDefaultLambda = "y1*y2^2*y3^2*y4^2";

struct ConditionReport {
  double c = 0.0;
  double lhs_small = 0.0;  ///< c gamma^-4 delta0^-4 sigma |e0|
  double lhs_radius = 0.0;  ///< c gamma^-2 delta0^-2 sigma |e0|
  double r = 0.0;
  double margin_small = 0.0;  ///< 1 - lhs_small
  double margin_radius = 0.0;  ///< r - lhs_radius
  bool pass_small = false;
  bool pass_radius = false;
  bool pass() const { return pass_small && pass_radius; }
};

/// Smallness of the initial error and the radius bound it implies; pure arithmetic.
ConditionReport check_conditions(double c, double gamma, double sigma, double delta0, double e_norm, double r);

/// Widths, radii and capped constants of the smoothing cascade.
struct KamSchedule {
  double rho = 0.0;
  double r = 0.0;
  int l = 4;
  double sigma = 0.0;
  double gamma = 0.0;
  double delta0 = 0.0;  ///< min(1, rho / 12)
  double beta_statement = 0.0;  ///< gamma^-2 delta0^{2 sigma - 1} 2^{-4 sigma}
  double beta = 0.0;            ///< gamma^-2 delta0^{2 sigma - 1} / (2^{4 sigma} - 2^{2 sigma + 1}); used for the caps
  double mu0 = 0.0, d0 = 0.0, v0 = 0.0, tau0 = 0.0;
  double mu = 0.0, d = 0.0, v = 0.0, tau = 0.0;

  /// Requires sigma > 1/2 so that the geometric series behind beta converges.
  static KamSchedule make(double rho, double r, int l, double sigma, double gamma, double mu0, double d0,
                          double v0, double tau0);

  double rho_k(int k) const;    ///< rho / 2^{k-1}
  double delta_k(int k) const;  ///< rho_k / 12
  double r_k(int k) const;      ///< r 4^{-(l + sigma)(k - 1)}
  /// r sum_{i<k} 4^{-(l + sigma) i}, the drift allowance after k stages.
  double drift_allowance(int k) const;
};

/// Measured smoothing data consumed by select_k0: gaps[k] = |H_k - H_{k+1}|_{C^3}
/// (one fewer than the approximants) and to_target[k] = |H_k - H|_{C^3}.
struct SequenceData {
  std::vector<double> gaps;
  std::vector<double> to_target;
  double A = 0.0;  ///< envelope: gaps[k] <= A 4^{-k (l + 2 sigma)}
  int l = 4;
  double sigma = 0.0;
};

SequenceData sequence_data(const SmoothingSequence& seq);

struct K0Witness {
  int index = 0;
  double lhs_gap = 0.0;   ///< max_{k >= k0, k >= 1} 2 d^2 v^2 |H_k - H_{k-1}| tau, compared with 1/2
  double lhs_target = 0.0;   ///< max_{k >= k0} |H_k - H|, compared with 1
  double lhs_sum = 0.0;  ///< 4 d^2 v^2 tau^2 (|H_k0 - H| + sum_{k > k0} |H_k - H_{k-1}|), compared with 1
  double tail = 0.0;   ///< envelope bound for the unmeasured gaps, included in lhs_sum
  double lhs_trigger = 0.0;  ///< A 4^{-(k0 - 1)(l + 2 sigma)}, compared with |e0|
  bool pass_gap = false, pass_target = false, pass_sum = false, pass_trigger = false;
  bool pass() const { return pass_gap && pass_target && pass_sum && pass_trigger; }
};

struct K0Selection {
  std::optional<int> k0;
  std::vector<K0Witness> candidates;  ///< one per index, in order
  std::string blocking;  ///< first failing inequality at the last index when no k0 exists
};

K0Selection select_k0(const SequenceData& data, double d, double v, double tau, double e0_norm);

struct GapEnvelopeReport {
  std::vector<double> gaps;
  std::vector<double> prefix_A;  ///< A_J = max_{k <= J} gaps[k] 4^{l k}
  double A = 0.0;
  int l = 1;
  bool pass = false;
};

/// Throws std::invalid_argument with fewer than three gaps. Passes when adding the
/// last gap does not raise the fitted envelope.
GapEnvelopeReport gap_envelope_check(const std::vector<double>& gaps, int l);

enum class GateMode { Strict, Report };
enum class CascadeStart { K0, First };

struct KamParams {
  double rho = 0.1;
  double r = 0.05;
  int l = 4;
  double sigma = 1.1;
  double gamma = 0.0;  ///< required, verified against omega up to the horizon
  long horizon = 1000;
  std::string lambda_spec = kDefaultLambda;
  GateMode gate = GateMode::Strict;
  CascadeStart cascade_start = CascadeStart::K0;
  int gap_envelope_class = 1;  ///< exponent of the torus-gap envelope; 1 matches the C^1 conclusion
  double target_error = 1e-7;  ///< invariance error against the original H
  SmoothingOptions smoothing;
  SolveOptions solve;
};

struct StatementCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct StageRecord {
  int stage = 0;           ///< k = 1, 2, ...
  int sequence_index = 0;  ///< which approximant H_k is
  double rho_k = 0.0, delta_k = 0.0, r_k = 0.0;
  double e_norm = 0.0;  ///< |J grad H_k(K_{k-1}) - d_omega K_{k-1}| at width rho_k
  double e_grid = 0.0;
  double mu_k = 0.0, d_k = 0.0, v_k = 0.0, tau_k = 0.0, c_k = 0.0;
  StatementCheck A1, A2, A3, A4;
  bool solved = false;
  int steps = 0;
  std::string solve_stop;
  double torus_gap = 0.0;  ///< |K_k - K_{k-1}| at width rho / 4^k
  double error_vs_H = 0.0;  ///< grid invariance error of K_k against the original H
  std::vector<IterationRecord> trace;
};

struct KamCertificate {
  std::vector<double> omega;
  double gamma = 0.0, sigma = 0.0;
  long horizon = 0;
  double diophantine_min = 0.0;
  double rho = 0.0, r = 0.0;
  int l = 0;
  std::string lambda_spec;
  std::string gate;
  std::string cascade_start;
  double e0_norm = 0.0, e0_grid = 0.0;
  bool e0_tail_flag = false;
  KamSchedule schedule;
  ConditionReport conditions;
  bool analytic_input = false;
  std::vector<SequenceEntry> sequence;
  double A_const = 0.0;
  K0Selection k0;
  int cascade_first_index = 0;
  std::vector<StageRecord> stages;
  std::optional<GapEnvelopeReport> gap_envelope;
  double final_error_vs_H = 0.0;
  double final_error_vs_H_rho = 0.0;
  double final_drift = 0.0;  ///< |K_inf - K_0| at width rho / 2
  double drift_bound = 0.0;  ///< 4/3 r
  double target_error = 0.0;
  std::string stop_reason;  ///< "target", "floor", "exhausted", "single_solve", "gate", "error"
  std::vector<std::string> failures;  ///< every failed check, in order
  bool passed = false;
};

/// Stage-0 assessment of an approximate torus: invariance error, non-degeneracy,
/// capped constants and the smallness conditions. No solve is attempted.
struct InitialCheck {
  double e0_norm = 0.0, e0_grid = 0.0;
  bool e0_tail_flag = false;
  bool nondegenerate = false;
  double DK_norm = 0.0, N_norm = 0.0, avg_S_inv_norm = 0.0, cond_DK = 0.0, avg_S_min_sv = 0.0;
  bool schedule_ready = false;  ///< false when non-degeneracy or the domain check failed
  KamSchedule schedule;
  double c = 0.0;
  ConditionReport conditions;
  std::vector<std::string> failures;
  std::shared_ptr<const PlateauCutoff> cutoff;
  bool passed() const { return failures.empty(); }
};

InitialCheck check_initial(const HamiltonianModel& H, const Torus& K0, const std::vector<double>& omega,
                           const KamParams& params);

struct SchemeResult {
  Torus K;
  KamCertificate certificate;
};

/// Cutoff extension, smoothing, k0 selection and the shrinking-width Newton cascade.
/// Analytic input short-circuits to one solve with the original H.
SchemeResult run_scheme(const HamiltonianModel& H, const Torus& K0, const std::vector<double>& omega,
                        const KamParams& params);

}  // namespace kamtori
