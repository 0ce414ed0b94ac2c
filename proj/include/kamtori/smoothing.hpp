#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kamtori/bernstein.hpp"
#include "kamtori/hamiltonian.hpp"
#include "kamtori/torus.hpp"

namespace kamtori {

/// Smooth plateau function around the sampled image of a torus K0.
///
/// With s(z) a soft minimum of the squared distances from z to the image samples
/// (periodic images in the angles included), phi = step((R_out^2 - s) / (R_out^2 - R_in^2))
/// where step is the C-infinity transition built from e^{-1/t}. phi = 1 wherever the
/// sampled distance is at most r and phi = 0 wherever it is at least 5r/2.
class PlateauCutoff {
 public:
  PlateauCutoff(const Torus& K0, double r);

  double r() const { return r_; }
  int dim() const { return dim_; }
  /// Bounding box of the 3r-neighbourhood of the image.
  const Box& box() const { return box_; }
  std::size_t point_count() const { return points_.size() / dim_; }

  /// Squared distance from z to the nearest image sample.
  double min_sq_distance(std::span<const double> z) const;
  double value(std::span<const double> z) const { return derivatives(z, 0)[0]; }
  /// Partials up to order 3 in MultiIndexSet order.
  std::vector<double> derivatives(std::span<const double> z, int max_order) const;

 private:
  int dim_;
  double r_;
  double r_in2_, r_out2_, temperature_, log_count_;
  std::vector<double> points_;  // sorted by first coordinate
  Box box_;
};

/// source * phi, with phi a plateau cutoff.
class CutoffTerm : public HamiltonianTerm {
 public:
  CutoffTerm(HamiltonianModel source, std::shared_ptr<const PlateauCutoff> cutoff);
  int dim() const override { return 2 * source_.n(); }
  bool analytic() const override { return false; }
  std::vector<double> derivatives(std::span<const double> z, int max_order) const override;
  std::string kind() const override { return "cutoff_extension"; }
  const PlateauCutoff& cutoff() const { return *cutoff_; }

 private:
  HamiltonianModel source_;
  std::shared_ptr<const PlateauCutoff> cutoff_;
};

/// H * phi on the box B(K0) containing the 3r-neighbourhood of the image. Throws
/// DomainError when that box leaves H's own validity box. The image is sampled on the
/// real grid of K0; rho is accepted for interface symmetry and recorded only.
HamiltonianModel cutoff_extend(const HamiltonianModel& H, const Torus& K0, double r, double rho);

/// Analytic part of H plus (non-analytic part) * phi on the same box: the function that
/// the smoothing sequence approximates. It equals H on the r-neighbourhood of the image
/// and needs no smoothing at all when H is analytic.
HamiltonianModel smoothing_target(const HamiltonianModel& H, std::shared_ptr<const PlateauCutoff> cutoff);

/// Sample points for C^3 norms: a cell-centred grid of `grid` points per axis over the
/// cutoff box, keeping those within `radius` of the image (radius <= 0 keeps all).
std::vector<std::vector<double>> norm_points(const PlateauCutoff& cutoff, int grid, double radius);

/// max over points and |alpha| <= order of |d^alpha (a - b)|.
double sup_distance(const HamiltonianModel& a, const HamiltonianModel& b,
                    const std::vector<std::vector<double>>& points, int order = 3);
/// max over points and |alpha| <= order of |d^alpha h|.
double sup_norm(const HamiltonianModel& h, const std::vector<std::vector<double>>& points, int order = 3);

struct SmoothingOptions {
  std::vector<int> base_degrees;  ///< per axis, for index 0
  std::vector<int> growth;        ///< per-axis degree multiplier from one index to the next
  int count = 4;
  int max_degree = 1 << 20;
  int norm_grid = 64;
  double norm_radius_factor = 2.0;  ///< norms on the (factor * r)-neighbourhood of the image
};

struct SequenceEntry {
  int index = 0;
  std::vector<int> degrees;
  double c0_gap = 0.0;  ///< |H_k - H_{k+1}|_{C^0}; 0 for the last entry
  double c3_gap = 0.0;  ///< |H_k - H_{k+1}|_{C^3}; 0 for the last entry
  double bound = 0.0;   ///< A 4^{-k(l+2 sigma)}
  double c3_to_target = 0.0;  ///< |H_k - target|_{C^3}
  double c0_to_target = 0.0;
  double c3_norm = 0.0;  ///< |H_k|_{C^3} on the norm points
};

struct SmoothingSequence {
  std::vector<HamiltonianModel> approximants;
  std::vector<SequenceEntry> entries;
  double A_const = 0.0;
  int l = 4;
  double sigma = 0.0;
  double target_c3_norm = 0.0;  ///< |target|_{C^3} on the norm points
  bool trivial = false;         ///< analytic input: every H_k equals H
  /// First index k with A 4^{-(k-1)(l+2 sigma)} <= e0_norm, or -1 if none.
  int trigger_index = -1;
  double e0_norm = 0.0;
  std::shared_ptr<const PlateauCutoff> cutoff;
  HamiltonianModel target;
};

/// H_k = analytic part of H + Bernstein approximant of (rough part * phi) at degrees
/// base * growth^k. A_const is the smallest envelope covering every measured gap.
SmoothingSequence build_smoothing_sequence(const HamiltonianModel& H, std::shared_ptr<const PlateauCutoff> cutoff,
                                           int l, double sigma, double e0_norm, const SmoothingOptions& options);

}  // namespace kamtori
