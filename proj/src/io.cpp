#include "kamtori/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

bool canonical(const std::vector<int>& k) {
  for (int v : k)
    if (v != 0) return v > 0;
  return true;  // zero mode
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return in;
}

Json divisors(double v, const std::vector<int>& k) { return Json{{"value", v}, {"k", k}}; }

Json statement(const StatementCheck& s) { return Json{{"lhs", s.lhs}, {"rhs", s.rhs}, {"pass", s.pass}}; }

}  // namespace

// ---------------------------------------------------------------------------

Json hamiltonian_to_json(const HamiltonianModel& H) {
  Json j;
  j["n"] = H.n();
  if (H.smoothness_class() == kAnalytic)
    j["smoothness_class"] = "analytic";
  else
    j["smoothness_class"] = H.smoothness_class();
  Json terms = Json::array();
  for (const auto& t : H.terms())
    terms.push_back(Json{{"k", t.k}, {"m", t.m}, {"re", t.c.real()}, {"im", t.c.imag()}});
  j["terms"] = terms;
  Json rough = Json::array();
  for (const auto& e : H.extra()) {
    const auto* s = dynamic_cast<const PeriodicBumpSpline*>(e.get());
    if (!s) throw std::invalid_argument("hamiltonian_to_json: term of kind '" + e->kind() + "' is not serializable");
    rough.push_back(Json{{"kind", s->kind()}, {"axis", s->axis()}, {"amplitude", s->amplitude()}, {"order", s->order()}});
  }
  j["rough_terms"] = rough;
  if (const auto& box = H.validity_box()) j["box"] = Json{{"lower", box->lower}, {"upper", box->upper}};
  return j;
}

HamiltonianModel hamiltonian_from_json(const Json& j) {
  const int n = j.at("n").get<int>();
  if (n < 1) throw std::invalid_argument("hamiltonian: n must be positive");
  std::vector<FourierTaylorTerm> terms;
  for (const auto& t : j.value("terms", Json::array()))
    terms.push_back({t.at("k").get<std::vector<int>>(), t.at("m").get<std::vector<int>>(),
                     {t.at("re").get<double>(), t.value("im", 0.0)}});
  std::vector<std::shared_ptr<const HamiltonianTerm>> extra;
  for (const auto& r : j.value("rough_terms", Json::array())) {
    const std::string kind = r.at("kind").get<std::string>();
    if (kind != "periodic_bump_spline") throw std::invalid_argument("hamiltonian: unknown rough term '" + kind + "'");
    extra.push_back(std::make_shared<PeriodicBumpSpline>(2 * n, r.at("axis").get<int>(),
                                                         r.at("amplitude").get<double>(), r.at("order").get<int>()));
  }
  int cls = kAnalytic;
  if (j.contains("smoothness_class")) {
    const auto& c = j.at("smoothness_class");
    if (c.is_string()) {
      if (c.get<std::string>() != "analytic") throw std::invalid_argument("hamiltonian: unknown smoothness class");
    } else {
      cls = c.get<int>();
    }
  }
  std::optional<Box> box;
  if (j.contains("box"))
    box = Box{j["box"].at("lower").get<std::vector<double>>(), j["box"].at("upper").get<std::vector<double>>()};
  return HamiltonianModel(n, terms, extra, cls, box);
}

HamiltonianModel load_hamiltonian(const fs::path& path) { return hamiltonian_from_json(read_json(path)); }

// ---------------------------------------------------------------------------

Json torus_to_json(const Torus& K) {
  const FourierMap& P = K.periodic();
  Json j;
  j["n"] = P.dim_domain();
  j["m"] = P.dim_range();
  j["trunc"] = P.trunc();
  Json modes = Json::array();
  for (std::size_t idx = 0; idx < P.num_modes(); ++idx) {
    const auto k = P.wavevector(idx);
    if (!canonical(k)) continue;
    Json c = Json::array();
    for (int comp = 0; comp < P.dim_range(); ++comp) c.push_back(Json::array({P.coeff(idx, comp).real(), P.coeff(idx, comp).imag()}));
    modes.push_back(Json{{"k", k}, {"c", c}});
  }
  j["modes"] = modes;
  return j;
}

Torus torus_from_json(const Json& j) {
  const int n = j.at("n").get<int>(), m = j.at("m").get<int>(), M = j.at("trunc").get<int>();
  if (m != 2 * n) throw DimensionError("torus: m must equal 2n");
  FourierMap P(n, m, M);
  for (const auto& mode : j.at("modes")) {
    const auto k = mode.at("k").get<std::vector<int>>();
    if (static_cast<int>(k.size()) != n || !P.contains(k)) throw std::invalid_argument("torus: wavevector outside truncation");
    std::vector<int> neg(k);
    for (int& v : neg) v = -v;
    const auto& c = mode.at("c");
    if (static_cast<int>(c.size()) != m) throw std::invalid_argument("torus: wrong number of components");
    for (int comp = 0; comp < m; ++comp) {
      const cplx v{c[comp].at(0).get<double>(), c[comp].at(1).get<double>()};
      P.set_mode(k, comp, v);
      P.set_mode(neg, comp, std::conj(v));
    }
  }
  return Torus(P);
}

void write_torus_csv(const Torus& K, const fs::path& path) {
  const FourierMap& P = K.periodic();
  auto out = open_out(path);
  out << "# n=" << P.dim_domain() << " m=" << P.dim_range() << " M=" << P.trunc() << "\n";
  for (int a = 0; a < P.dim_domain(); ++a) out << (a ? "," : "") << "k" << a + 1;
  for (int c = 0; c < P.dim_range(); ++c) out << ",re" << c + 1 << ",im" << c + 1;
  out << "\n";
  for (std::size_t idx = 0; idx < P.num_modes(); ++idx) {
    const auto k = P.wavevector(idx);
    if (!canonical(k)) continue;
    for (int a = 0; a < P.dim_domain(); ++a) out << (a ? "," : "") << k[a];
    for (int c = 0; c < P.dim_range(); ++c) out << "," << fmt(P.coeff(idx, c).real()) << "," << fmt(P.coeff(idx, c).imag());
    out << "\n";
  }
}

Torus read_torus_csv(const fs::path& path) {
  auto in = open_in(path);
  std::string line;
  std::getline(in, line);
  int n = 0, m = 0, M = 0;
  if (std::sscanf(line.c_str(), "# n=%d m=%d M=%d", &n, &m, &M) != 3)
    throw std::invalid_argument("torus csv: missing '# n= m= M=' header in " + path.string());
  std::getline(in, line);  // column names
  Json j{{"n", n}, {"m", m}, {"trunc", M}, {"modes", Json::array()}};
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (static_cast<int>(cells.size()) != n + 2 * m) throw std::invalid_argument("torus csv: malformed row '" + line + "'");
    std::vector<int> k(n);
    for (int a = 0; a < n; ++a) k[a] = std::stoi(cells[a]);
    Json c = Json::array();
    for (int comp = 0; comp < m; ++comp)
      c.push_back(Json::array({std::stod(cells[n + 2 * comp]), std::stod(cells[n + 2 * comp + 1])}));
    j["modes"].push_back(Json{{"k", k}, {"c", c}});
  }
  return torus_from_json(j);
}

Torus load_torus(const fs::path& path) {
  if (path.extension() == ".json") return torus_from_json(read_json(path));
  return read_torus_csv(path);
}

void write_torus_samples_csv(const Torus& K, const fs::path& path) {
  const GridSamples s = K.samples();
  const int n = K.n();
  auto out = open_out(path);
  for (int a = 0; a < n; ++a) out << (a ? "," : "") << "theta" << a + 1;
  for (int c = 0; c < 2 * n; ++c) out << ",z" << c + 1;
  out << "\n";
  for (std::size_t p = 0; p < s.num_points(); ++p) {
    const auto th = s.theta(p);
    for (int a = 0; a < n; ++a) out << (a ? "," : "") << fmt(th[a]);
    for (double v : s.at(p)) out << "," << fmt(v);
    out << "\n";
  }
}

// ---------------------------------------------------------------------------

Json to_json(const DivisorReport& r) {
  return Json{{"min_divisor", divisors(r.min_divisor, r.min_divisor_k)},
              {"max_amplification", divisors(r.max_amplification, r.max_amplification_k)}};
}

Json to_json(const StepReport& r) {
  return Json{{"error_grid", r.error_grid},
              {"normal_divisors", to_json(r.normal_divisors)},
              {"tangent_divisors", to_json(r.tangent_divisors)},
              {"eta_tangent_norm", r.eta_tangent_norm},
              {"eta_normal_norm", r.eta_normal_norm},
              {"eta_normal_average", r.eta_normal_average},
              {"min_det_frame", r.min_det_frame},
              {"correction_norm", r.correction_norm}};
}

Json to_json(const IterationRecord& r) {
  Json j{{"iter", r.iter},         {"trunc", r.trunc},   {"error_grid", r.error_grid},
         {"error_rho", r.error_rho}, {"tail_flag", r.tail_flag}, {"DK_norm", r.DK_norm},
         {"N_norm", r.N_norm},       {"avg_S_inv_norm", r.avg_S_inv_norm}, {"cond_DK", r.cond_DK}};
  j["step"] = r.step ? to_json(*r.step) : Json(nullptr);
  return j;
}

Json to_json(const DiophantineReport& r) {
  return Json{{"worst_k", r.worst_k},     {"nearest_integer", r.nearest_integer},
              {"min_value", r.min_value}, {"gamma", r.gamma},
              {"sigma", r.sigma},         {"horizon", r.horizon},
              {"margin", r.margin},       {"passed", r.passed}};
}

Json to_json(const ConditionReport& r) {
  return Json{{"c", r.c},           {"lhs_small", r.lhs_small},   {"margin_small", r.margin_small}, {"pass_small", r.pass_small},
              {"lhs_radius", r.lhs_radius},     {"r", r.r},         {"margin_radius", r.margin_radius}, {"pass_radius", r.pass_radius}};
}

Json to_json(const KamSchedule& s) {
  return Json{{"rho", s.rho},   {"r", s.r},         {"l", s.l},
              {"sigma", s.sigma}, {"gamma", s.gamma}, {"delta0", s.delta0},
              {"beta_statement", s.beta_statement}, {"beta", s.beta},
              {"mu0", s.mu0},   {"d0", s.d0},       {"v0", s.v0},   {"tau0", s.tau0},
              {"mu", s.mu},     {"d", s.d},         {"v", s.v},     {"tau", s.tau}};
}

Json to_json(const SequenceEntry& e) {
  return Json{{"index", e.index},         {"degrees", e.degrees},           {"c0_gap", e.c0_gap},
              {"c3_gap", e.c3_gap},       {"bound", e.bound},               {"c3_to_target", e.c3_to_target},
              {"c0_to_target", e.c0_to_target}, {"c3_norm", e.c3_norm}};
}

Json to_json(const K0Selection& s) {
  Json c = Json::array();
  for (const auto& w : s.candidates)
    c.push_back(Json{{"index", w.index}, {"lhs_gap", w.lhs_gap},   {"pass_gap", w.pass_gap},   {"lhs_target", w.lhs_target},
                     {"pass_target", w.pass_target}, {"lhs_sum", w.lhs_sum}, {"pass_sum", w.pass_sum}, {"tail", w.tail},
                     {"lhs_trigger", w.lhs_trigger}, {"pass_trigger", w.pass_trigger}});
  return Json{{"k0", s.k0 ? Json(*s.k0) : Json(nullptr)}, {"blocking", s.blocking}, {"candidates", c}};
}

Json to_json(const GapEnvelopeReport& r) {
  return Json{{"l", r.l}, {"gaps", r.gaps}, {"prefix_A", r.prefix_A}, {"A", r.A}, {"pass", r.pass}};
}

Json to_json(const StageRecord& s) {
  return Json{{"stage", s.stage},     {"sequence_index", s.sequence_index},
              {"rho_k", s.rho_k},     {"delta_k", s.delta_k},
              {"r_k", s.r_k},         {"e_norm", s.e_norm},
              {"e_grid", s.e_grid},   {"mu_k", s.mu_k},
              {"d_k", s.d_k},         {"v_k", s.v_k},
              {"tau_k", s.tau_k},     {"c_k", s.c_k},
              {"A1", statement(s.A1)}, {"A2", statement(s.A2)},
              {"A3", statement(s.A3)}, {"A4", statement(s.A4)},
              {"solved", s.solved},   {"steps", s.steps},
              {"solve_stop", s.solve_stop}, {"torus_gap", s.torus_gap},
              {"error_vs_H", s.error_vs_H}};
}

Json to_json(const KamCertificate& c) {
  Json j;
  j["passed"] = c.passed;
  j["stop_reason"] = c.stop_reason;
  j["failures"] = c.failures;
  j["omega"] = c.omega;
  j["gamma"] = c.gamma;
  j["sigma"] = c.sigma;
  j["horizon"] = c.horizon;
  j["diophantine_min"] = c.diophantine_min;
  j["rho"] = c.rho;
  j["r"] = c.r;
  j["l"] = c.l;
  j["lambda_spec"] = c.lambda_spec;
  j["gate"] = c.gate;
  j["cascade_start"] = c.cascade_start;
  j["analytic_input"] = c.analytic_input;
  j["e0"] = Json{{"norm_rho", c.e0_norm}, {"norm_grid", c.e0_grid}, {"tail_flag", c.e0_tail_flag}};
  j["schedule"] = to_json(c.schedule);
  j["conditions"] = to_json(c.conditions);
  Json seq = Json::array();
  for (const auto& e : c.sequence) seq.push_back(to_json(e));
  j["sequence"] = seq;
  j["A_const"] = c.A_const;
  j["k0"] = to_json(c.k0);
  j["cascade_first_index"] = c.cascade_first_index;
  Json stages = Json::array();
  for (const auto& s : c.stages) stages.push_back(to_json(s));
  j["stages"] = stages;
  j["gap_envelope"] = c.gap_envelope ? to_json(*c.gap_envelope) : Json(nullptr);
  j["final"] = Json{{"error_vs_H_grid", c.final_error_vs_H},
                    {"error_vs_H_rho", c.final_error_vs_H_rho},
                    {"target_error", c.target_error},
                    {"drift", c.final_drift},
                    {"drift_bound", c.drift_bound}};
  return j;
}

// ---------------------------------------------------------------------------

void write_json(const fs::path& path, const Json& j) {
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

Json read_json(const fs::path& path) {
  auto in = open_in(path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_jsonl(const fs::path& path, const std::vector<Json>& lines) {
  auto out = open_out(path);
  for (const auto& j : lines) out << j.dump() << "\n";
}

}  // namespace kamtori
