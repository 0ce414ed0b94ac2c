#pragma once

#include <vector>

namespace kamtori {

/// Outcome of an exhaustive scan over 0 < |k|_1 <= horizon.
///
/// For n >= 2 the scanned quantity is |k.omega| |k|_1^sigma. For n = 1 the
/// condition is read in its nearest-integer form, min_p |k omega - p| |k|^sigma,
/// and `nearest_integer` records the p attaining it.
struct DiophantineReport {
  bool passed = false;
  std::vector<int> worst_k;
  long nearest_integer = 0;
  double min_value = 0.0;  ///< min over the horizon of the scanned quantity
  double margin = 0.0;     ///< min_value - gamma
  double gamma = 0.0;
  double sigma = 0.0;
  long horizon = 0;
};

/// omega together with Diophantine constants verified up to a finite horizon.
struct FrequencyVector {
  std::vector<double> omega;
  double gamma = 0.0;
  double sigma = 0.0;
  long horizon = 0;

  int dim() const { return static_cast<int>(omega.size()); }

  /// Throws if (gamma, sigma) fail the scan up to `horizon`.
  static FrequencyVector verified(std::vector<double> omega, double gamma, double sigma, long horizon);
  /// gamma set to estimate_gamma(omega, sigma, horizon).
  static FrequencyVector estimated(std::vector<double> omega, double sigma, long horizon);
};

DiophantineReport check_diophantine(const std::vector<double>& omega, double gamma, double sigma,
                                    long horizon);

/// Largest gamma admissible over the horizon; 0 when a resonance lies inside it.
double estimate_gamma(const std::vector<double>& omega, double sigma, long horizon);

/// Full scan result without a gamma threshold (gamma = 0 in the report).
DiophantineReport scan_diophantine(const std::vector<double>& omega, double sigma, long horizon);

/// Worker count for parallel scans: KAMTORI_THREADS if set, otherwise hardware concurrency.
unsigned worker_count();

}  // namespace kamtori
