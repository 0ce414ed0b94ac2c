#include "kamtori/torus_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace {

GridSamples matrices_to_grid(const std::vector<Eigen::MatrixXd>& mats, int n, int points_per_axis) {
  const int rows = static_cast<int>(mats.front().rows()), cols = static_cast<int>(mats.front().cols());
  GridSamples g{n, rows * cols, points_per_axis, std::vector<double>(mats.size() * rows * cols)};
  for (std::size_t j = 0; j < mats.size(); ++j)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) g.values[j * rows * cols + r * cols + c] = mats[j](r, c);
  return g;
}

std::vector<Eigen::MatrixXd> grid_to_matrices(const GridSamples& g, int rows, int cols) {
  std::vector<Eigen::MatrixXd> out(g.num_points(), Eigen::MatrixXd(rows, cols));
  for (std::size_t j = 0; j < g.num_points(); ++j)
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) out[j](r, c) = g.values[j * rows * cols + r * cols + c];
  return out;
}

double max_row_sum(const Eigen::MatrixXd& m) { return m.cwiseAbs().rowwise().sum().maxCoeff(); }

void check_dims(const HamiltonianModel& H, const Torus& K, std::size_t omega_dim) {
  if (H.n() != K.n() || static_cast<int>(omega_dim) != K.n())
    throw DimensionError("torus solver: Hamiltonian, torus and frequency dimensions differ");
}

}  // namespace

ErrorField invariance_error(const HamiltonianModel& H, const Torus& K, std::span<const double> omega, double rho) {
  check_dims(H, K, omega.size());
  ErrorField out;
  out.e = vector_field(H, K) - torus_directional_derivative(K, omega);
  out.norm_rho = strip_norm(out.e, rho);
  out.norm_grid = out.e.synthesize().max_abs();
  return out;
}

NondegeneracyData nondegeneracy(const HamiltonianModel& H, const Torus& K, std::span<const double> omega,
                                double rho) {
  check_dims(H, K, omega.size());
  const int n = K.n();
  const Eigen::MatrixXd J = symplectic_J(n);
  const FourierMap tangent = K.tangent();
  const auto DK = grid_to_matrices(tangent.synthesize(), 2 * n, n);
  const GridSamples z = K.samples();

  NondegeneracyData nd;
  std::vector<Eigen::MatrixXd> N(DK.size()), S(DK.size());
  for (std::size_t j = 0; j < DK.size(); ++j) {
    const Eigen::MatrixXd G = DK[j].transpose() * DK[j];
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
    const auto& sv = svd.singularValues();
    const double smallest = sv(sv.size() - 1);
    const double cond = smallest > 0.0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
    nd.cond_DK = std::max(nd.cond_DK, cond);
    if (!(cond < 1e8)) throw NondegeneracyError("DK^T DK is numerically singular on the grid", smallest);
    N[j] = G.inverse();
    const Eigen::MatrixXd A = J * H.evaluate_jet(z.at(j)).hessian;
    S[j] = N[j] * DK[j].transpose() * (A * J - J * A) * DK[j] * N[j];
  }
  nd.N = analyze(matrices_to_grid(N, n, z.points_per_axis));
  nd.S = analyze(matrices_to_grid(S, n, z.points_per_axis));
  const auto avg = average(nd.S);
  nd.avg_S = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(avg.data(), n, n);
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(nd.avg_S);
  nd.avg_S_min_sv = svd.singularValues()(n - 1);
  if (!(nd.avg_S_min_sv > 1e-12 * std::max(1.0, svd.singularValues()(0))))
    throw NondegeneracyError("the average of S is singular (twist condition fails)", nd.avg_S_min_sv);
  nd.avg_S_inv = nd.avg_S.inverse();
  nd.N_norm = matrix_strip_norm(nd.N, n, n, rho);
  nd.DK_norm = matrix_strip_norm(tangent, 2 * n, n, rho);
  nd.avg_S_inv_norm = max_row_sum(nd.avg_S_inv);
  return nd;
}

std::pair<Torus, StepReport> newton_step(const HamiltonianModel& H, const Torus& K, const FrequencyVector& omega,
                                         const NondegeneracyData& nd) {
  check_dims(H, K, omega.omega.size());
  const int n = K.n();
  const Eigen::MatrixXd J = symplectic_J(n);
  const FourierMap e = vector_field(H, K) - torus_directional_derivative(K, omega.omega);
  const GridSamples eg = e.synthesize();
  const auto DK = grid_to_matrices(K.tangent().synthesize(), 2 * n, n);
  const auto N = grid_to_matrices(nd.N.synthesize(), n, n);
  const auto S = grid_to_matrices(nd.S.synthesize(), n, n);
  const std::size_t P = DK.size();
  const int ppa = K.periodic().points_per_axis();

  StepReport rep;
  rep.error_grid = eg.max_abs();
  rep.min_det_frame = std::numeric_limits<double>::infinity();

  std::vector<Eigen::MatrixXd> frame(P);
  GridSamples eta{n, 2 * n, ppa, std::vector<double>(P * 2 * n)};
  for (std::size_t j = 0; j < P; ++j) {
    Eigen::MatrixXd M(2 * n, 2 * n);
    M << DK[j], J * DK[j] * N[j];
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(M);
    rep.min_det_frame = std::min(rep.min_det_frame, std::abs(lu.determinant()));
    const Eigen::VectorXd x = lu.solve(Eigen::Map<const Eigen::VectorXd>(eg.values.data() + j * 2 * n, 2 * n));
    std::copy(x.data(), x.data() + 2 * n, eta.values.begin() + j * 2 * n);
    frame[j] = std::move(M);
  }
  const FourierMap eta_f = analyze(eta);
  const FourierMap eta1 = eta_f.components(0, n), eta2 = eta_f.components(n, n);
  rep.eta_tangent_norm = eta1.synthesize().max_abs();
  rep.eta_normal_norm = eta2.synthesize().max_abs();

  // normal part: d_omega xi2 = eta2, mean fixed below
  const CohomologySolution normal = solve_cohomological(eta2, omega);
  rep.normal_divisors = normal.report;
  for (double v : normal.average) rep.eta_normal_average = std::max(rep.eta_normal_average, std::abs(v));
  const GridSamples xi2_tilde = normal.phi.synthesize();

  // the mean of xi2 cancels the obstruction <S xi2 + eta1> = 0
  GridSamples src{n, n, ppa, std::vector<double>(P * n)};
  const GridSamples eta1_g = eta1.synthesize();
  auto S_times = [&](std::size_t j, const Eigen::VectorXd& v) { return Eigen::VectorXd(S[j] * v); };
  for (std::size_t j = 0; j < P; ++j) {
    const Eigen::VectorXd v = S_times(j, Eigen::Map<const Eigen::VectorXd>(xi2_tilde.values.data() + j * n, n));
    for (int a = 0; a < n; ++a) src.values[j * n + a] = v(a) + eta1_g.values[j * n + a];
  }
  const auto src_avg = average(analyze(src));
  const Eigen::VectorXd xi2_bar = -nd.avg_S_inv * Eigen::Map<const Eigen::VectorXd>(src_avg.data(), n);

  GridSamples xi2 = xi2_tilde;
  for (std::size_t j = 0; j < P; ++j)
    for (int a = 0; a < n; ++a) xi2.values[j * n + a] += xi2_bar(a);

  // tangent part: d_omega xi1 = S xi2 + eta1, mean zero
  GridSamples rhs{n, n, ppa, std::vector<double>(P * n)};
  for (std::size_t j = 0; j < P; ++j) {
    const Eigen::VectorXd v = S_times(j, Eigen::Map<const Eigen::VectorXd>(xi2.values.data() + j * n, n));
    for (int a = 0; a < n; ++a) rhs.values[j * n + a] = v(a) + eta1_g.values[j * n + a];
  }
  const CohomologySolution tangent = solve_cohomological(analyze(rhs), omega);
  rep.tangent_divisors = tangent.report;
  const GridSamples xi1 = tangent.phi.synthesize();

  GridSamples delta{n, 2 * n, ppa, std::vector<double>(P * 2 * n)};
  for (std::size_t j = 0; j < P; ++j) {
    Eigen::VectorXd xi(2 * n);
    for (int a = 0; a < n; ++a) {
      xi(a) = xi1.values[j * n + a];
      xi(n + a) = xi2.values[j * n + a];
    }
    const Eigen::VectorXd d = frame[j] * xi;
    std::copy(d.data(), d.data() + 2 * n, delta.values.begin() + j * 2 * n);
  }
  rep.correction_norm = delta.max_abs();
  FourierMap next = K.periodic() + analyze(delta);
  next.symmetrize();
  return {Torus(std::move(next)), rep};
}

SolveResult solve_torus(const HamiltonianModel& H, const Torus& K0, const FrequencyVector& omega,
                        const SolveOptions& options) {
  if (options.max_iter < 0) throw std::invalid_argument("solve_torus: max_iter must be nonnegative");
  SolveResult res;
  Torus K = K0;
  Torus best = K0;
  double best_err = std::numeric_limits<double>::infinity();
  int increases = 0;
  double prev = std::numeric_limits<double>::infinity();

  for (int it = 0;; ++it) {
    if (options.adapt_trunc) {
      while (strip_norm(K.periodic(), options.rho).tail_flag && 2 * K.trunc() <= options.max_trunc &&
             2 * K.trunc() <= omega.horizon)
        K = K.resized(2 * K.trunc());
    }
    const ErrorField err = invariance_error(H, K, omega.omega, options.rho);
    IterationRecord rec;
    rec.iter = it;
    rec.trunc = K.trunc();
    rec.error_grid = err.norm_grid;
    rec.error_rho = err.norm_rho.value;
    rec.tail_flag = strip_norm(K.periodic(), options.rho).tail_flag;

    if (err.norm_grid > prev) {
      ++increases;
    } else {
      increases = 0;
    }
    prev = err.norm_grid;
    if (err.norm_grid < best_err) {
      best_err = err.norm_grid;
      best = K;
    }

    const NondegeneracyData nd = nondegeneracy(H, K, omega.omega, options.rho);
    rec.DK_norm = nd.DK_norm;
    rec.N_norm = nd.N_norm;
    rec.avg_S_inv_norm = nd.avg_S_inv_norm;
    rec.cond_DK = nd.cond_DK;

    if (err.norm_grid <= options.tol) {
      res.trace.push_back(rec);
      res.K = K;
      res.converged = true;
      res.steps = it;
      res.stop_reason = "tolerance";
      return res;
    }
    if (increases >= 2) {
      res.trace.push_back(rec);
      if (options.floor_tol && best_err <= *options.floor_tol) {
        res.K = best;
        res.converged = true;
        res.steps = it;
        res.stop_reason = "floor";
        return res;
      }
      throw DivergenceError("Newton iteration diverged: error grew on two consecutive steps (best " +
                            std::to_string(best_err) + ")");
    }
    if (it == options.max_iter) {
      res.trace.push_back(rec);
      const bool at_floor = options.floor_tol && best_err <= *options.floor_tol;
      res.K = at_floor ? best : K;
      res.converged = at_floor;
      res.steps = it;
      res.stop_reason = at_floor ? "floor" : "max_iter";
      return res;
    }
    auto [next, step] = newton_step(H, K, omega, nd);
    rec.step = step;
    res.trace.push_back(rec);
    K = std::move(next);
  }
}

}  // namespace kamtori
