#include "kamtori/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <iostream>
#include <sstream>

#include "kamtori/bernstein.hpp"
#include "kamtori/config.hpp"
#include "kamtori/errors.hpp"
#include "kamtori/io.hpp"

namespace kamtori {

namespace fs = std::filesystem;

namespace {

struct Overrides {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> max_iter;
  std::optional<double> tol;
  std::optional<int> trunc;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--config", o.config, "run configuration (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", o.out, "output directory (overrides the config)");
  sub->add_option("--max-iter", o.max_iter, "Newton iteration cap");
  sub->add_option("--tol", o.tol, "Newton tolerance on the grid error");
  sub->add_option("--trunc", o.trunc, "Fourier truncation M");
}

RunConfig load_config(const Overrides& o) {
  RunConfig cfg = parse_config(o.config);
  if (o.out) cfg.out = *o.out;
  if (o.max_iter) cfg.max_iter = *o.max_iter;
  if (o.tol) cfg.tol = *o.tol;
  if (o.trunc) {
    cfg.trunc = *o.trunc;
    cfg.max_trunc = std::max(cfg.max_trunc, cfg.trunc);
  }
  if (auto v = validate(cfg); !v.empty()) throw ConfigError(v);
  return cfg;
}

Json error_certificate(const std::string& command, const std::string& what) {
  return Json{{"command", command}, {"passed", false}, {"stop_reason", "error"}, {"failures", {what}}};
}

FrequencyVector frequency(const RunConfig& cfg) { return {cfg.omega, cfg.gamma, cfg.sigma, cfg.horizon}; }

std::string join_degrees(const std::vector<int>& d) {
  std::string s;
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "x" : "") + std::to_string(d[i]);
  return s;
}

// ---------------------------------------------------------------------------

int cmd_verify(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const HamiltonianModel H = load_model(cfg);
  const Torus K0 = initial_torus(cfg);
  const InitialCheck c = check_initial(H, K0, cfg.omega, kam_params(cfg));
  Json cert{{"command", "verify"}, {"passed", c.passed()}, {"failures", c.failures}};
  cert["e0"] = Json{{"norm_rho", c.e0_norm}, {"norm_grid", c.e0_grid}, {"tail_flag", c.e0_tail_flag}};
  cert["nondegeneracy"] = Json{{"nondegenerate", c.nondegenerate}, {"DK_norm", c.DK_norm},
                               {"N_norm", c.N_norm},             {"avg_S_inv_norm", c.avg_S_inv_norm},
                               {"cond_DK", c.cond_DK},           {"avg_S_min_sv", c.avg_S_min_sv}};
  cert["schedule"] = c.schedule_ready ? to_json(c.schedule) : Json(nullptr);
  cert["conditions"] = c.schedule_ready ? to_json(c.conditions) : Json(nullptr);
  cert["lambda_spec"] = cfg.lambda;
  write_json(dir / "certificate.json", cert);
  out << "verify: e_grid=" << c.e0_grid << " e_rho=" << c.e0_norm << (c.passed() ? " PASS" : " FAIL") << "\n";
  return c.passed() ? kExitPass : kExitFailure;
}

int cmd_solve(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const HamiltonianModel H = load_model(cfg);
  const Torus K0 = initial_torus(cfg);
  const SolveResult res = solve_torus(H, K0, frequency(cfg), solve_options(cfg));
  std::vector<Json> trace;
  for (const auto& r : res.trace) trace.push_back(to_json(r));
  write_jsonl(dir / "trace.jsonl", trace);
  write_torus_csv(res.K, dir / "torus_final.csv");
  write_torus_samples_csv(res.K, dir / "torus_samples.csv");
  const ErrorField e = invariance_error(H, res.K, cfg.omega, cfg.rho);
  Json cert{{"command", "solve"},       {"passed", res.converged},  {"stop_reason", res.stop_reason},
            {"steps", res.steps},       {"trunc", res.K.trunc()},   {"error_grid", e.norm_grid},
            {"error_rho", e.norm_rho.value}, {"tail_flag", e.norm_rho.tail_flag}};
  write_json(dir / "certificate.json", cert);
  out << "solve: " << res.stop_reason << " after " << res.steps << " steps, e_grid=" << e.norm_grid << "\n";
  return res.converged ? kExitPass : kExitFailure;
}

int cmd_smooth(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const HamiltonianModel H = load_model(cfg);
  const Torus K0 = initial_torus(cfg);
  const KamParams p = kam_params(cfg);
  SmoothingOptions sopt = p.smoothing;
  if (sopt.base_degrees.empty()) sopt.base_degrees.assign(2 * H.n(), 64);
  if (sopt.growth.empty()) sopt.growth.assign(2 * H.n(), 2);
  const double e0 = invariance_error(H, K0, cfg.omega, cfg.rho).norm_rho.value;
  auto cutoff = std::make_shared<const PlateauCutoff>(K0, cfg.r);
  const SmoothingSequence seq = build_smoothing_sequence(H, cutoff, cfg.l, cfg.sigma, e0, sopt);

  std::ofstream table(dir / "smoothing.csv");
  table << "k,degree,c0_gap,c3_gap,bound\n";
  char buf[160];
  for (const auto& e : seq.entries) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g\n", e.c0_gap, e.c3_gap, e.bound);
    table << e.index << "," << join_degrees(e.degrees) << buf;
  }

  // approximants: degrees, box and the Bernstein coefficients f(p/k)
  constexpr std::size_t kMaxSamples = 1u << 22;
  fs::create_directories(dir / "approximants");
  for (std::size_t k = 0; k < seq.approximants.size(); ++k) {
    Json a{{"index", k}, {"degrees", seq.entries[k].degrees}};
    const HamiltonianModel& Hk = seq.approximants[k];
    a["fourier_taylor_part"] = hamiltonian_to_json(HamiltonianModel(Hk.n(), Hk.terms()));
    for (const auto& term : seq.approximants[k].extra()) {
      const auto* b = dynamic_cast<const BernsteinTerm*>(term.get());
      if (!b) continue;
      const BernsteinApproximant& ap = b->approximant();
      a["box"] = Json{{"lower", ap.box().lower}, {"upper", ap.box().upper}};
      a["sample_count"] = ap.sample_count();
      if (ap.sample_count() <= kMaxSamples) {
        std::vector<double> s;
        ap.collect_samples(s);
        a["samples"] = s;
      } else {
        a["samples"] = nullptr;
      }
    }
    write_json(dir / "approximants" / ("H_" + std::to_string(k) + ".json"), a);
  }

  Json cert{{"command", "smooth"}, {"passed", true}, {"trivial", seq.trivial}, {"A_const", seq.A_const},
            {"trigger_index", seq.trigger_index}, {"e0_norm", e0}, {"target_c3_norm", seq.target_c3_norm}};
  Json entries = Json::array();
  for (const auto& e : seq.entries) entries.push_back(to_json(e));
  cert["sequence"] = entries;
  write_json(dir / "certificate.json", cert);
  out << "smooth: " << seq.entries.size() << " approximants, A=" << seq.A_const << "\n";
  return kExitPass;
}

int cmd_diophantine(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const DiophantineReport rep = check_diophantine(cfg.omega, cfg.gamma, cfg.sigma, cfg.horizon);
  const double est = estimate_gamma(cfg.omega, cfg.sigma, cfg.horizon);
  Json summary{{"gamma_est", est}, {"worst_k", rep.worst_k}, {"margin", rep.margin}};
  Json cert{{"command", "diophantine"}, {"passed", rep.passed}, {"gamma_est", est}, {"report", to_json(rep)}};
  write_json(dir / "certificate.json", cert);
  out << summary.dump() << "\n";
  return rep.passed ? kExitPass : kExitFailure;
}

int cmd_run(const RunConfig& cfg, const fs::path& dir, std::ostream& out) {
  const HamiltonianModel H = load_model(cfg);
  const Torus K0 = initial_torus(cfg);
  const SchemeResult res = run_scheme(H, K0, cfg.omega, kam_params(cfg));
  const KamCertificate& c = res.certificate;
  fs::create_directories(dir / "stages");
  for (const auto& st : c.stages) {
    std::vector<Json> lines;
    for (const auto& r : st.trace) lines.push_back(to_json(r));
    write_jsonl(dir / "stages" / ("stage_" + std::to_string(st.stage) + ".jsonl"), lines);
  }
  write_torus_csv(res.K, dir / "torus_final.csv");
  write_torus_samples_csv(res.K, dir / "torus_samples.csv");
  Json cert{{"command", "run"}};
  const Json body = to_json(c);
  for (const auto& [key, value] : body.items()) cert[key] = value;
  write_json(dir / "certificate.json", cert);
  out << "run: " << c.stop_reason << ", " << c.stages.size() << " stages, final error " << c.final_error_vs_H
      << (c.passed ? " PASS" : " FAIL") << "\n";
  for (const auto& f : c.failures) out << "  failed: " << f << "\n";
  return c.passed ? kExitPass : kExitFailure;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariant tori of Hamiltonian systems by the parameterization method"};
  app.name("kamtori");
  app.require_subcommand(1);

  using Command = int (*)(const RunConfig&, const fs::path&, std::ostream&);
  const std::vector<std::tuple<std::string, std::string, Command>> table{
      {"solve", "Newton iteration for an invariant torus", cmd_solve},
      {"verify", "invariance error, non-degeneracy and smallness conditions of the initial torus", cmd_verify},
      {"smooth", "analytic smoothing sequence and its gap table", cmd_smooth},
      {"diophantine", "check (gamma, sigma) for omega up to the horizon", cmd_diophantine},
      {"run", "full smoothing and Newton cascade with certificate", cmd_run}};
  Overrides o;
  std::vector<CLI::App*> subs;
  for (const auto& [name, help, fn] : table) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, o);
    subs.push_back(sub);
  }

  if (!args.empty() && !args[0].starts_with("-") &&
      std::none_of(table.begin(), table.end(), [&](const auto& t) { return std::get<0>(t) == args[0]; })) {
    err << "kamtori: unknown subcommand '" << args[0] << "' (expected solve, verify, smooth, diophantine or run)\n";
    return kExitUsage;
  }

  // CLI11 wants the arguments in reverse order
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << "kamtori: " << e.what() << "\n" << "run 'kamtori --help' for usage\n";
    return kExitUsage;
  }

  std::size_t which = 0;
  while (!subs[which]->parsed()) ++which;
  const auto& [name, help, fn] = table[which];

  RunConfig cfg;
  try {
    cfg = load_config(o);
  } catch (const ConfigError& e) {
    err << "kamtori: invalid configuration\n";
    for (const auto& v : e.violations()) err << "  " << v << "\n";
    return kExitUsage;
  }

  const fs::path dir = cfg.out;
  try {
    fs::create_directories(dir);
    write_json(dir / "config.json", config_to_json(cfg));
  } catch (const std::exception& e) {
    err << "kamtori: " << e.what() << "\n";
    return kExitUsage;
  }
  try {
    return fn(cfg, dir, out);
  } catch (const std::exception& e) {
    write_json(dir / "certificate.json", error_certificate(name, e.what()));
    err << "kamtori " << name << ": " << e.what() << "\n";
    return kExitFailure;
  }
}

int dispatch(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace kamtori
