#include "kamtori/config.hpp"

#include <set>

#include "kamtori/errors.hpp"

namespace kamtori {

namespace fs = std::filesystem;

namespace {

const std::set<std::string> kKnownKeys{
    "hamiltonian", "torus",        "omega",     "gamma",        "sigma",     "horizon",   "rho",
    "r",           "l",            "trunc",     "tol",          "max_iter",  "floor_tol", "adapt_trunc",
    "max_trunc",   "target_error", "lambda",    "gate",         "cascade_start", "gap_envelope_class",
    "smoothing",   "out",          "seed"};

const std::set<std::string> kSmoothingKeys{"base_degrees", "growth", "count", "max_degree", "norm_grid",
                                           "norm_radius_factor"};

/// Typed field access that records problems instead of throwing.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& errors) : errors_(errors) {}

  template <class T>
  void optional(const Json& obj, const std::string& key, T& dst, const std::string& prefix = "") {
    if (!obj.contains(key) || obj.at(key).is_null()) return;
    try {
      dst = obj.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      errors_.push_back(prefix + key + ": wrong type (" + std::string(obj.at(key).type_name()) + ")");
    }
  }

  template <class T>
  void required(const Json& obj, const std::string& key, T& dst) {
    if (!obj.contains(key) || obj.at(key).is_null()) {
      errors_.push_back(key + ": missing required key");
      return;
    }
    optional(obj, key, dst);
  }

 private:
  std::vector<std::string>& errors_;
};

std::string resolve(const std::string& p, const fs::path& base) {
  fs::path path(p);
  if (path.is_relative()) path = base / path;
  return fs::weakly_canonical(path).string();
}

}  // namespace

std::vector<std::string> validate(const RunConfig& cfg) {
  std::vector<std::string> v;
  const int n = cfg.n();
  if (n < 1) v.push_back("omega: must have at least one component");
  if (!(cfg.gamma > 0)) v.push_back("gamma: must be > 0");
  if (n >= 1 && !(cfg.sigma > n - 1))
    v.push_back("sigma: must exceed n - 1 = " + std::to_string(n - 1) + " (Diophantine exponent)");
  if (cfg.horizon < 1) v.push_back("horizon: must be >= 1");
  if (!(cfg.rho > 0)) v.push_back("rho: must be > 0");
  if (!(cfg.r > 0)) v.push_back("r: must be > 0");
  if (cfg.l < 4) v.push_back("l: must be >= 4");
  if (cfg.trunc < 1) v.push_back("trunc: must be >= 1");
  if (!(cfg.tol > 0)) v.push_back("tol: must be > 0");
  if (cfg.max_iter < 0) v.push_back("max_iter: must be >= 0");
  if (cfg.floor_tol && !(*cfg.floor_tol > 0)) v.push_back("floor_tol: must be > 0");
  if (cfg.max_trunc < cfg.trunc) v.push_back("max_trunc: must be >= trunc");
  if (!(cfg.target_error >= 0)) v.push_back("target_error: must be >= 0");
  if (cfg.gate != "strict" && cfg.gate != "report") v.push_back("gate: must be \"strict\" or \"report\"");
  if (cfg.cascade_start != "k0" && cfg.cascade_start != "first")
    v.push_back("cascade_start: must be \"k0\" or \"first\"");
  if (cfg.gap_envelope_class < 1) v.push_back("gap_envelope_class: must be >= 1");
  try {
    LambdaPolynomial{cfg.lambda};
  } catch (const std::exception& e) {
    v.push_back(std::string("lambda: ") + e.what());
  }
  auto per_axis = [&](const std::vector<int>& d, const std::string& name, int min) {
    if (d.empty()) return;
    if (n >= 1 && static_cast<int>(d.size()) != 2 * n) v.push_back("smoothing." + name + ": needs 2n entries");
    for (int x : d)
      if (x < min) {
        v.push_back("smoothing." + name + ": entries must be >= " + std::to_string(min));
        break;
      }
  };
  per_axis(cfg.base_degrees, "base_degrees", 1);
  per_axis(cfg.growth, "growth", 1);
  if (cfg.smoothing_count < 1) v.push_back("smoothing.count: must be >= 1");
  if (cfg.max_degree < 1) v.push_back("smoothing.max_degree: must be >= 1");
  if (cfg.norm_grid < 2) v.push_back("smoothing.norm_grid: must be >= 2");
  if (!(cfg.norm_radius_factor > 0)) v.push_back("smoothing.norm_radius_factor: must be > 0");
  if (cfg.out.empty()) v.push_back("out: must not be empty");

  if (cfg.torus.kind == "circle") {
    if (n >= 1 && static_cast<int>(cfg.torus.y0.size()) != n) v.push_back("torus.y0: needs n entries");
  } else if (cfg.torus.kind != "file") {
    v.push_back("torus.kind: must be \"circle\" or \"file\"");
  }

  // referenced files must exist and parse with matching dimensions
  if (cfg.hamiltonian_path.empty() && cfg.hamiltonian_inline.is_null()) {
    v.push_back("hamiltonian: missing required key");
  } else {
    try {
      const HamiltonianModel H = load_model(cfg);
      if (n >= 1 && H.n() != n) v.push_back("hamiltonian: n = " + std::to_string(H.n()) + " does not match omega");
    } catch (const std::exception& e) {
      v.push_back(std::string("hamiltonian: ") + e.what());
    }
  }
  if (cfg.torus.kind == "file") {
    try {
      const Torus K = load_torus(cfg.torus.path);
      if (n >= 1 && K.n() != n) v.push_back("torus: n = " + std::to_string(K.n()) + " does not match omega");
    } catch (const std::exception& e) {
      v.push_back(std::string("torus: ") + e.what());
    }
  }
  return v;
}

RunConfig config_from_json(const Json& j, const fs::path& base_dir) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw ConfigError({"config: top level must be a JSON object"});
  for (const auto& [key, value] : j.items())
    if (!kKnownKeys.count(key)) errors.push_back(key + ": unknown key");

  RunConfig cfg;
  Reader rd(errors);

  if (!j.contains("hamiltonian")) {
    errors.push_back("hamiltonian: missing required key");
  } else if (j["hamiltonian"].is_string()) {
    cfg.hamiltonian_path = resolve(j["hamiltonian"].get<std::string>(), base_dir);
  } else if (j["hamiltonian"].is_object()) {
    cfg.hamiltonian_inline = j["hamiltonian"];
  } else {
    errors.push_back("hamiltonian: must be a path or an inline model");
  }

  rd.required(j, "omega", cfg.omega);
  rd.required(j, "gamma", cfg.gamma);
  cfg.sigma = cfg.n() + 0.1;
  rd.optional(j, "sigma", cfg.sigma);
  rd.optional(j, "horizon", cfg.horizon);
  rd.optional(j, "rho", cfg.rho);
  rd.optional(j, "r", cfg.r);
  rd.optional(j, "l", cfg.l);
  rd.optional(j, "trunc", cfg.trunc);
  rd.optional(j, "tol", cfg.tol);
  rd.optional(j, "max_iter", cfg.max_iter);
  if (j.contains("floor_tol") && !j["floor_tol"].is_null()) {
    double f = 0.0;
    rd.optional(j, "floor_tol", f);
    cfg.floor_tol = f;
  }
  rd.optional(j, "adapt_trunc", cfg.adapt_trunc);
  cfg.max_trunc = std::max(cfg.max_trunc, cfg.trunc);
  rd.optional(j, "max_trunc", cfg.max_trunc);
  rd.optional(j, "target_error", cfg.target_error);
  rd.optional(j, "lambda", cfg.lambda);
  rd.optional(j, "gate", cfg.gate);
  rd.optional(j, "cascade_start", cfg.cascade_start);
  rd.optional(j, "gap_envelope_class", cfg.gap_envelope_class);
  rd.optional(j, "out", cfg.out);
  rd.optional(j, "seed", cfg.seed);

  if (j.contains("smoothing")) {
    const Json& s = j["smoothing"];
    if (!s.is_object()) {
      errors.push_back("smoothing: must be an object");
    } else {
      for (const auto& [key, value] : s.items())
        if (!kSmoothingKeys.count(key)) errors.push_back("smoothing." + key + ": unknown key");
      rd.optional(s, "base_degrees", cfg.base_degrees, "smoothing.");
      rd.optional(s, "growth", cfg.growth, "smoothing.");
      rd.optional(s, "count", cfg.smoothing_count, "smoothing.");
      rd.optional(s, "max_degree", cfg.max_degree, "smoothing.");
      rd.optional(s, "norm_grid", cfg.norm_grid, "smoothing.");
      rd.optional(s, "norm_radius_factor", cfg.norm_radius_factor, "smoothing.");
    }
  }

  cfg.torus.y0 = cfg.omega;
  if (j.contains("torus")) {
    const Json& t = j["torus"];
    if (!t.is_object()) {
      errors.push_back("torus: must be an object");
    } else {
      rd.optional(t, "kind", cfg.torus.kind, "torus.");
      if (cfg.torus.kind == "file") {
        cfg.torus.y0.clear();
        if (!t.contains("path") || !t["path"].is_string())
          errors.push_back("torus.path: missing required key");
        else
          cfg.torus.path = resolve(t["path"].get<std::string>(), base_dir);
      } else {
        rd.optional(t, "y0", cfg.torus.y0, "torus.");
      }
    }
  }

  // range checks only make sense once every field has the right type
  if (errors.empty()) errors = validate(cfg);
  if (!errors.empty()) throw ConfigError(errors);
  return cfg;
}

RunConfig parse_config(const fs::path& path) {
  Json j;
  try {
    j = read_json(path);
  } catch (const std::exception& e) {
    throw ConfigError({std::string("config: ") + e.what()});
  }
  return config_from_json(j, fs::absolute(path).parent_path());
}

Json config_to_json(const RunConfig& cfg) {
  Json j;
  if (cfg.hamiltonian_inline.is_null())
    j["hamiltonian"] = cfg.hamiltonian_path;
  else
    j["hamiltonian"] = cfg.hamiltonian_inline;
  Json t{{"kind", cfg.torus.kind}};
  if (cfg.torus.kind == "file")
    t["path"] = cfg.torus.path;
  else
    t["y0"] = cfg.torus.y0;
  j["torus"] = t;
  j["omega"] = cfg.omega;
  j["gamma"] = cfg.gamma;
  j["sigma"] = cfg.sigma;
  j["horizon"] = cfg.horizon;
  j["rho"] = cfg.rho;
  j["r"] = cfg.r;
  j["l"] = cfg.l;
  j["trunc"] = cfg.trunc;
  j["tol"] = cfg.tol;
  j["max_iter"] = cfg.max_iter;
  j["floor_tol"] = cfg.floor_tol ? Json(*cfg.floor_tol) : Json(nullptr);
  j["adapt_trunc"] = cfg.adapt_trunc;
  j["max_trunc"] = cfg.max_trunc;
  j["target_error"] = cfg.target_error;
  j["lambda"] = cfg.lambda;
  j["gate"] = cfg.gate;
  j["cascade_start"] = cfg.cascade_start;
  j["gap_envelope_class"] = cfg.gap_envelope_class;
  j["smoothing"] = Json{{"base_degrees", cfg.base_degrees},
                        {"growth", cfg.growth},
                        {"count", cfg.smoothing_count},
                        {"max_degree", cfg.max_degree},
                        {"norm_grid", cfg.norm_grid},
                        {"norm_radius_factor", cfg.norm_radius_factor}};
  j["out"] = cfg.out;
  j["seed"] = cfg.seed;
  return j;
}

HamiltonianModel load_model(const RunConfig& cfg) {
  if (!cfg.hamiltonian_inline.is_null()) return hamiltonian_from_json(cfg.hamiltonian_inline);
  return load_hamiltonian(cfg.hamiltonian_path);
}

Torus initial_torus(const RunConfig& cfg) {
  if (cfg.torus.kind == "file") return load_torus(cfg.torus.path).resized(cfg.trunc);
  return Torus::circle(cfg.torus.y0, cfg.trunc);
}

SolveOptions solve_options(const RunConfig& cfg) {
  SolveOptions o;
  o.tol = cfg.tol;
  o.max_iter = cfg.max_iter;
  o.rho = cfg.rho;
  o.floor_tol = cfg.floor_tol;
  o.adapt_trunc = cfg.adapt_trunc;
  o.max_trunc = cfg.max_trunc;
  return o;
}

KamParams kam_params(const RunConfig& cfg) {
  KamParams p;
  p.rho = cfg.rho;
  p.r = cfg.r;
  p.l = cfg.l;
  p.sigma = cfg.sigma;
  p.gamma = cfg.gamma;
  p.horizon = cfg.horizon;
  p.lambda_spec = cfg.lambda;
  p.gate = cfg.gate == "report" ? GateMode::Report : GateMode::Strict;
  p.cascade_start = cfg.cascade_start == "first" ? CascadeStart::First : CascadeStart::K0;
  p.gap_envelope_class = cfg.gap_envelope_class;
  p.target_error = cfg.target_error;
  p.smoothing.base_degrees = cfg.base_degrees;
  p.smoothing.growth = cfg.growth;
  p.smoothing.count = cfg.smoothing_count;
  p.smoothing.max_degree = cfg.max_degree;
  p.smoothing.norm_grid = cfg.norm_grid;
  p.smoothing.norm_radius_factor = cfg.norm_radius_factor;
  p.solve = solve_options(cfg);
  return p;
}

}  // namespace kamtori
