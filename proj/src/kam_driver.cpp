#include "kamtori/kam_driver.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

double parse_number(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw std::invalid_argument("lambda: cannot read '" + s + "' in " + context);
  return v;
}

// |a - b| at width rho, padding the coarser series with zeros
double torus_distance(const Torus& a, const Torus& b, double rho) {
  const int M = std::max(a.trunc(), b.trunc());
  return strip_norm(a.periodic().resized(M) - b.periodic().resized(M), rho).value;
}

double rate(int l, double sigma) { return l + 2.0 * sigma; }

}  // namespace

// ---------------------------------------------------------------------------

LambdaPolynomial::LambdaPolynomial(std::string spec) : spec_(std::move(spec)) {
  std::string compact;
  for (char ch : spec_)
    if (!std::isspace(static_cast<unsigned char>(ch))) compact += ch;
  if (compact.empty()) throw std::invalid_argument("lambda: empty specification");
  for (const std::string& term : split(compact, '+')) {
    if (term.empty()) throw std::invalid_argument("lambda: empty term in '" + spec_ + "'");
    Monomial m{1.0, {0, 0, 0, 0}};
    for (const std::string& factor : split(term, '*')) {
      if (factor.size() >= 2 && factor[0] == 'y' && factor[1] >= '1' && factor[1] <= '4') {
        const int var = factor[1] - '1';
        int power = 1;
        if (factor.size() > 2) {
          if (factor[2] != '^') throw std::invalid_argument("lambda: malformed factor '" + factor + "'");
          const double p = parse_number(factor.substr(3), factor);
          if (p < 0 || p != std::floor(p)) throw std::invalid_argument("lambda: exponents must be natural numbers");
          power = static_cast<int>(p);
        }
        m.exponent[var] += power;
      } else {
        m.coeff *= parse_number(factor, term);
      }
    }
    if (!(m.coeff > 0.0)) throw std::invalid_argument("lambda: coefficients must be positive ('" + term + "')");
    terms_.push_back(m);
  }
}

double LambdaPolynomial::operator()(double mu, double d, double v, double tau) const {
  const double y[4] = {mu, d, v, tau};
  double total = 0.0;
  for (const auto& m : terms_) {
    double t = m.coeff;
    for (int i = 0; i < 4; ++i) t *= std::pow(y[i], m.exponent[i]);
    total += t;
  }
  return total;
}

// ---------------------------------------------------------------------------

ConditionReport check_conditions(double c, double gamma, double sigma, double delta0, double e_norm, double r) {
  if (!(c > 0 && gamma > 0 && delta0 > 0 && r > 0 && e_norm >= 0 && sigma > 0))
    throw std::invalid_argument("check_conditions: inputs must be positive");
  ConditionReport rep;
  rep.c = c;
  rep.r = r;
  rep.lhs_small = c * std::pow(gamma, -4.0) * std::pow(delta0, -4.0 * sigma) * e_norm;
  rep.lhs_radius = c * std::pow(gamma, -2.0) * std::pow(delta0, -2.0 * sigma) * e_norm;
  rep.margin_small = 1.0 - rep.lhs_small;
  rep.margin_radius = r - rep.lhs_radius;
  rep.pass_small = rep.lhs_small < 1.0;
  rep.pass_radius = rep.lhs_radius < r;
  return rep;
}

KamSchedule KamSchedule::make(double rho, double r, int l, double sigma, double gamma, double mu0, double d0,
                              double v0, double tau0) {
  if (!(rho > 0 && r > 0 && gamma > 0)) throw std::invalid_argument("schedule: rho, r and gamma must be positive");
  if (!(sigma > 0.5)) throw std::invalid_argument("schedule: sigma must exceed 1/2 for the growth constant beta");
  KamSchedule s;
  s.rho = rho;
  s.r = r;
  s.l = l;
  s.sigma = sigma;
  s.gamma = gamma;
  s.delta0 = std::min(1.0, rho / 12.0);
  const double base = std::pow(gamma, -2.0) * std::pow(s.delta0, 2.0 * sigma - 1.0);
  s.beta_statement = base * std::pow(2.0, -4.0 * sigma);
  s.beta = base / (std::pow(2.0, 4.0 * sigma) - std::pow(2.0, 2.0 * sigma + 1.0));
  s.mu0 = mu0;
  s.d0 = d0;
  s.v0 = v0;
  s.tau0 = tau0;
  s.mu = mu0 + 1.0;
  s.d = d0 + s.beta;
  s.v = v0 + s.beta;
  s.tau = tau0 + s.beta + 1.0;
  return s;
}

double KamSchedule::rho_k(int k) const { return rho / std::pow(2.0, k - 1); }
double KamSchedule::delta_k(int k) const { return rho_k(k) / 12.0; }
double KamSchedule::r_k(int k) const { return r * std::pow(4.0, -(l + sigma) * (k - 1)); }

double KamSchedule::drift_allowance(int k) const {
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += std::pow(4.0, -(l + sigma) * i);
  return r * s;
}

// ---------------------------------------------------------------------------

SequenceData sequence_data(const SmoothingSequence& seq) {
  SequenceData d;
  d.A = seq.A_const;
  d.l = seq.l;
  d.sigma = seq.sigma;
  for (std::size_t k = 0; k < seq.entries.size(); ++k) {
    d.to_target.push_back(seq.entries[k].c3_to_target);
    if (k + 1 < seq.entries.size()) d.gaps.push_back(seq.entries[k].c3_gap);
  }
  return d;
}

K0Selection select_k0(const SequenceData& data, double d, double v, double tau, double e0_norm) {
  const int count = static_cast<int>(data.to_target.size());
  if (count < 1 || static_cast<int>(data.gaps.size()) != count - 1)
    throw std::invalid_argument("select_k0: need one gap fewer than sequence entries");
  const double q = std::pow(4.0, -rate(data.l, data.sigma));
  // envelope bound on every gap beyond the measured ones: sum_{j >= count-1} A q^j
  const double tail = data.A * std::pow(q, count - 1) / (1.0 - q);
  const double unmeasured_gap = data.A * std::pow(q, count - 1);
  const double w8 = 2.0 * d * d * v * v * tau;
  const double w10 = 4.0 * d * d * v * v * tau * tau;

  K0Selection sel;
  for (int k0 = 0; k0 < count; ++k0) {
    K0Witness w;
    w.index = k0;
    w.tail = tail;
    double worst_gap = unmeasured_gap;
    for (int k = std::max(k0, 1); k < count; ++k) worst_gap = std::max(worst_gap, data.gaps[k - 1]);
    w.lhs_gap = w8 * worst_gap;
    w.lhs_target = data.to_target[count - 1] + tail;
    for (int k = k0; k < count; ++k) w.lhs_target = std::max(w.lhs_target, data.to_target[k]);
    double sum = data.to_target[k0] + tail;
    for (int k = k0 + 1; k < count; ++k) sum += data.gaps[k - 1];
    w.lhs_sum = w10 * sum;
    w.lhs_trigger = data.A * std::pow(q, k0 - 1);
    w.pass_gap = w.lhs_gap < 0.5;
    w.pass_target = w.lhs_target < 1.0;
    w.pass_sum = w.lhs_sum < 1.0;
    w.pass_trigger = w.lhs_trigger <= e0_norm;
    sel.candidates.push_back(w);
    if (!sel.k0 && w.pass()) sel.k0 = k0;
  }
  if (!sel.k0) {
    const K0Witness& last = sel.candidates.back();
    sel.blocking = !last.pass_gap ? "gap" : !last.pass_target ? "target" : !last.pass_sum ? "sum" : "trigger";
  }
  return sel;
}

GapEnvelopeReport gap_envelope_check(const std::vector<double>& gaps, int l) {
  if (gaps.size() < 3) throw std::invalid_argument("gap_envelope_check: at least three gaps are required");
  GapEnvelopeReport rep;
  rep.gaps = gaps;
  rep.l = l;
  double A = 0.0;
  for (std::size_t k = 0; k < gaps.size(); ++k) {
    A = std::max(A, gaps[k] * std::pow(4.0, static_cast<double>(l) * k));
    rep.prefix_A.push_back(A);
  }
  rep.A = A;
  rep.pass = rep.prefix_A.back() <= rep.prefix_A[rep.prefix_A.size() - 2] * (1.0 + 1e-12);
  return rep;
}

// ---------------------------------------------------------------------------

InitialCheck check_initial(const HamiltonianModel& H, const Torus& K0, const std::vector<double>& omega,
                           const KamParams& params) {
  const LambdaPolynomial lambda(params.lambda_spec);
  InitialCheck out;
  const ErrorField e0 = invariance_error(H, K0, omega, params.rho);
  out.e0_norm = e0.norm_rho.value;
  out.e0_grid = e0.norm_grid;
  out.e0_tail_flag = e0.norm_rho.tail_flag;
  NondegeneracyData nd;
  try {
    nd = nondegeneracy(H, K0, omega, params.rho);
  } catch (const KamError& ex) {
    out.failures.push_back(std::string("nondegeneracy: ") + ex.what());
    return out;
  }
  out.nondegenerate = true;
  out.DK_norm = nd.DK_norm;
  out.N_norm = nd.N_norm;
  out.avg_S_inv_norm = nd.avg_S_inv_norm;
  out.cond_DK = nd.cond_DK;
  out.avg_S_min_sv = nd.avg_S_min_sv;

  out.cutoff = std::make_shared<const PlateauCutoff>(K0, params.r);
  try {
    (void)cutoff_extend(H, K0, params.r, params.rho);
  } catch (const DomainError& ex) {
    out.failures.push_back(std::string("domain: ") + ex.what());
    return out;
  }
  const auto points = norm_points(*out.cutoff, params.smoothing.norm_grid,
                                  params.smoothing.norm_radius_factor * params.r);
  const double mu0 = sup_norm(smoothing_target(H, out.cutoff), points);
  out.schedule = KamSchedule::make(params.rho, params.r, params.l, params.sigma, params.gamma, mu0, nd.DK_norm,
                                   nd.N_norm, nd.avg_S_inv_norm);
  out.schedule_ready = true;
  const KamSchedule& S = out.schedule;
  out.c = lambda(S.mu, S.d, S.v, S.tau);
  out.conditions = check_conditions(out.c, params.gamma, params.sigma, S.delta0, out.e0_norm, params.r);
  if (!out.conditions.pass_small) out.failures.push_back("smallness condition");
  if (!out.conditions.pass_radius) out.failures.push_back("radius condition");
  return out;
}

SchemeResult run_scheme(const HamiltonianModel& H, const Torus& K0, const std::vector<double>& omega,
                        const KamParams& params) {
  if (static_cast<int>(omega.size()) != H.n() || K0.n() != H.n())
    throw DimensionError("run_scheme: Hamiltonian, torus and frequency dimensions differ");
  if (!(params.gamma > 0.0)) throw std::invalid_argument("run_scheme: gamma must be positive");
  const LambdaPolynomial lambda(params.lambda_spec);

  SchemeResult out{K0, {}};
  KamCertificate& cert = out.certificate;
  cert.omega = omega;
  cert.gamma = params.gamma;
  cert.sigma = params.sigma;
  cert.horizon = params.horizon;
  cert.rho = params.rho;
  cert.r = params.r;
  cert.l = params.l;
  cert.lambda_spec = params.lambda_spec;
  cert.gate = params.gate == GateMode::Strict ? "strict" : "report";
  cert.cascade_start = params.cascade_start == CascadeStart::K0 ? "k0" : "first";
  cert.target_error = params.target_error;
  cert.drift_bound = 4.0 / 3.0 * params.r;
  cert.analytic_input = H.analytic();
  const bool strict = params.gate == GateMode::Strict;

  auto finish = [&](const std::string& reason) {
    cert.stop_reason = reason;
    cert.passed = cert.failures.empty() && cert.final_error_vs_H <= params.target_error && reason != "gate" &&
                  reason != "error";
    return out;
  };

  const DiophantineReport dio = check_diophantine(omega, params.gamma, params.sigma, params.horizon);
  cert.diophantine_min = dio.min_value;
  if (!dio.passed) {
    cert.failures.push_back("diophantine: omega fails the condition for the given gamma and sigma");
    return finish("gate");
  }
  const FrequencyVector freq{omega, params.gamma, params.sigma, params.horizon};

  // stage-0 quantities
  const InitialCheck init = check_initial(H, K0, omega, params);
  cert.e0_norm = init.e0_norm;
  cert.e0_grid = init.e0_grid;
  cert.e0_tail_flag = init.e0_tail_flag;
  cert.final_error_vs_H = init.e0_grid;
  cert.failures = init.failures;
  if (!init.schedule_ready) return finish("gate");
  cert.schedule = init.schedule;
  cert.conditions = init.conditions;
  const KamSchedule& S = cert.schedule;
  const auto& cutoff = init.cutoff;
  const double c = init.c;
  if (strict && !cert.conditions.pass()) return finish("gate");

  // smoothing sequence
  SmoothingOptions sopt = params.smoothing;
  const int dim = 2 * H.n();
  if (sopt.base_degrees.empty()) sopt.base_degrees.assign(dim, 64);
  if (sopt.growth.empty()) sopt.growth.assign(dim, 2);
  SmoothingSequence seq;
  try {
    seq = build_smoothing_sequence(H, cutoff, params.l, params.sigma, cert.e0_norm, sopt);
  } catch (const KamError& ex) {
    cert.failures.push_back(std::string("smoothing: ") + ex.what());
    return finish("error");
  }
  cert.sequence = seq.entries;
  cert.A_const = seq.A_const;

  cert.k0 = select_k0(sequence_data(seq), S.d, S.v, S.tau, cert.e0_norm);
  if (!cert.k0.k0) {
    cert.failures.push_back("k0: no index satisfies the gap, target, sum and trigger inequalities; first blocked by " + cert.k0.blocking);
    if (strict) return finish("gate");
  }
  const int start = params.cascade_start == CascadeStart::First ? 0 : cert.k0.k0.value_or(0);
  cert.cascade_first_index = start;

  // shrinking-width cascade
  Torus K = K0;
  std::vector<double> torus_gaps;
  std::string reason = "exhausted";
  for (int k = 1; start + k - 1 < static_cast<int>(seq.approximants.size()); ++k) {
    const int idx = start + k - 1;
    const HamiltonianModel& Hk = seq.approximants[idx];
    StageRecord st;
    st.stage = k;
    st.sequence_index = idx;
    st.rho_k = S.rho_k(k);
    st.delta_k = S.delta_k(k);
    st.r_k = S.r_k(k);

    const ErrorField ek = invariance_error(Hk, K, omega, st.rho_k);
    st.e_norm = ek.norm_rho.value;
    st.e_grid = ek.norm_grid;
    NondegeneracyData nd;
    try {
      nd = nondegeneracy(Hk, K, omega, st.rho_k);
    } catch (const KamError& ex) {
      cert.failures.push_back("stage " + std::to_string(k) + " nondegeneracy: " + ex.what());
      cert.stages.push_back(st);
      reason = "error";
      break;
    }
    st.mu_k = seq.entries[idx].c3_norm;
    st.d_k = nd.DK_norm;
    st.v_k = nd.N_norm;
    st.tau_k = nd.avg_S_inv_norm;
    st.c_k = lambda(st.mu_k, st.d_k, st.v_k, st.tau_k);
    st.A2 = {st.c_k, c, st.c_k <= c};
    const double lhs_radius = st.c_k * std::pow(params.gamma, -4.0) * std::pow(st.delta_k, -4.0 * params.sigma) * st.e_norm;
    const double lhs4 = st.c_k * std::pow(params.gamma, -2.0) * std::pow(st.delta_k, -2.0 * params.sigma) * st.e_norm;
    st.A3 = {lhs_radius, 1.0, lhs_radius < 1.0};
    st.A4 = {lhs4, st.r_k, lhs4 < st.r_k};
    bool gate_failed = false;
    const std::pair<const char*, const StatementCheck*> checks[] = {{"A2", &st.A2}, {"A3", &st.A3}, {"A4", &st.A4}};
    for (const auto& [name, chk] : checks) {
      if (!chk->pass) {
        cert.failures.push_back(std::string(name) + "(" + std::to_string(k) + ")");
        gate_failed = true;
      }
    }
    if (strict && gate_failed) {
      cert.stages.push_back(st);
      reason = "gate";
      break;
    }

    SolveOptions so = params.solve;
    so.rho = st.rho_k;
    SolveResult res;
    try {
      res = solve_torus(Hk, K, freq, so);
    } catch (const KamError& ex) {
      cert.failures.push_back("stage " + std::to_string(k) + " solve: " + ex.what());
      cert.stages.push_back(st);
      reason = "error";
      break;
    }
    st.solved = true;
    st.steps = res.steps;
    st.solve_stop = res.stop_reason;
    st.trace = res.trace;
    if (!res.converged) cert.failures.push_back("stage " + std::to_string(k) + " solve: " + res.stop_reason);
    st.torus_gap = torus_distance(res.K, K, params.rho / std::pow(4.0, k));
    torus_gaps.push_back(st.torus_gap);
    K = res.K;
    const double drift = torus_distance(K, K0, S.rho_k(k + 1));
    st.A1 = {drift, S.drift_allowance(k), drift <= S.drift_allowance(k)};
    if (!st.A1.pass) cert.failures.push_back("A1(" + std::to_string(k) + ")");
    st.error_vs_H = invariance_error(H, K, omega).norm_grid;
    cert.stages.push_back(st);
    out.K = K;
    cert.final_error_vs_H = st.error_vs_H;
    if (strict && !st.A1.pass) {
      reason = "gate";
      break;
    }
    if (st.error_vs_H <= params.target_error) {
      reason = seq.trivial && k == 1 ? "single_solve" : "target";
      break;
    }
  }

  // final checks against the original Hamiltonian, on a refined grid
  const Torus fine = out.K.resized(2 * out.K.trunc());
  const ErrorField ef = invariance_error(H, fine, omega, params.rho / 2);
  cert.final_error_vs_H = ef.norm_grid;
  cert.final_error_vs_H_rho = ef.norm_rho.value;
  cert.final_drift = torus_distance(out.K, K0, params.rho / 2);
  if (cert.final_drift > cert.drift_bound) cert.failures.push_back("drift: |K_inf - K_0| exceeds 4r/3");
  if (torus_gaps.size() >= 3) {
    cert.gap_envelope = gap_envelope_check(torus_gaps, params.gap_envelope_class);
    if (!cert.gap_envelope->pass) cert.failures.push_back("torus-gap envelope grows");
  }
  if (cert.final_error_vs_H > params.target_error && reason != "error" && reason != "gate")
    cert.failures.push_back("final invariance error above target");
  return finish(reason);
}

}  // namespace kamtori
