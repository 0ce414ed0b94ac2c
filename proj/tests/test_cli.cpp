#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "kamtori/cli.hpp"
#include "kamtori/config.hpp"
#include "models.hpp"

using namespace kamtori;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out, err;
};

const fs::path& root() {
  static const fs::path dir = [] {
    const fs::path d = fs::temp_directory_path() / "kamtori_test_cli";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

/// Writes a model and a config next to each other; returns the config path.
fs::path fixture(const std::string& name, const HamiltonianModel& H, Json extra = Json::object()) {
  const fs::path dir = root() / name;
  fs::create_directories(dir);
  write_json(dir / "model.json", hamiltonian_to_json(H));
  Json cfg{{"hamiltonian", "model.json"}, {"omega", {testing::kGolden}}, {"gamma", 0.3}, {"trunc", 32}};
  for (const auto& [k, v] : extra.items()) cfg[k] = v;
  write_json(dir / "config.json", cfg);
  return dir / "config.json";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("verify on the exact rotator torus passes with zero error") {
  const fs::path cfg = fixture("verify", testing::rotator());
  const fs::path out = root() / "verify_out";
  const Outcome o = run({"verify", "--config", cfg.string(), "--out", out.string()});
  CHECK(o.code == 0);
  const Json cert = read_json(out / "certificate.json");
  CHECK(cert["command"] == "verify");
  CHECK(cert["passed"] == true);
  CHECK(cert["e0"]["norm_grid"].get<double>() == 0.0);
  CHECK(cert["conditions"]["lhs_small"].get<double>() == 0.0);
  CHECK(fs::exists(out / "config.json"));
}

TEST_CASE("solve on the pendulum writes the torus, samples and a trace") {
  const fs::path cfg = fixture("solve", testing::pendulum(1e-3), {{"tol", 1e-12}, {"trunc", 48}});
  const fs::path out = root() / "solve_out";
  const Outcome o = run({"solve", "--config", cfg.string(), "--out", out.string(), "--max-iter", "10"});
  CHECK(o.code == 0);
  REQUIRE(fs::exists(out / "torus_final.csv"));
  CHECK(fs::exists(out / "torus_samples.csv"));
  std::ifstream trace(out / "trace.jsonl");
  std::string line;
  int records = 0;
  while (std::getline(trace, line)) {
    CHECK(Json::parse(line).contains("error_grid"));
    ++records;
  }
  CHECK(records >= 2);

  // the saved torus is invariant on reload
  const Torus K = load_torus(out / "torus_final.csv");
  const std::vector<double> omega{testing::kGolden};
  CHECK(invariance_error(testing::pendulum(1e-3), K, omega).norm_grid < 1e-11);
  CHECK(read_json(out / "config.json")["max_iter"] == 10);
}

TEST_CASE("run with a large perturbation stops at the gate with exit 1") {
  const fs::path cfg = fixture("gate", testing::pendulum(0.05));
  const fs::path out = root() / "gate_out";
  const Outcome o = run({"run", "--config", cfg.string(), "--out", out.string()});
  CHECK(o.code == 1);
  const Json cert = read_json(out / "certificate.json");
  CHECK(cert["passed"] == false);
  CHECK(cert["stop_reason"] == "gate");
  CHECK(cert["failures"][0] == "smallness condition");
  CHECK(o.out.find("smallness condition") != std::string::npos);
}

TEST_CASE("run certificates are byte identical across repeats") {
  const fs::path cfg = fixture("repeat", testing::rotator(), {{"lambda", "1e-30"}});
  const fs::path a = root() / "repeat_a", b = root() / "repeat_b";
  CHECK(run({"run", "--config", cfg.string(), "--out", a.string()}).code == 0);
  CHECK(run({"run", "--config", cfg.string(), "--out", b.string()}).code == 0);
  CHECK(slurp(a / "certificate.json") == slurp(b / "certificate.json"));
  CHECK(fs::exists(a / "stages" / "stage_1.jsonl"));
  CHECK(fs::exists(a / "torus_final.csv"));
  CHECK(fs::exists(a / "torus_samples.csv"));
  // the echo is a valid config in its own right
  RunConfig ca = parse_config(a / "config.json"), cb = parse_config(b / "config.json");
  CHECK(ca.out == a.string());
  cb.out = ca.out;
  CHECK(ca == cb);
}

TEST_CASE("diophantine prints the estimate and flags resonances") {
  const fs::path cfg = fixture("dio", testing::rotator(), {{"sigma", 1.0}, {"horizon", 200}});
  Outcome o = run({"diophantine", "--config", cfg.string(), "--out", (root() / "dio_out").string()});
  CHECK(o.code == 0);
  const Json j = Json::parse(o.out);
  CHECK(j["gamma_est"].get<double>() == doctest::Approx(0.381966).epsilon(1e-5));
  CHECK(j["worst_k"] == std::vector<int>{1});

  const fs::path bad = fixture("dio_bad", testing::rotator(), {{"omega", {0.5}}, {"sigma", 1.0}, {"horizon", 50}});
  o = run({"diophantine", "--config", bad.string(), "--out", (root() / "dio_bad_out").string()});
  CHECK(o.code == 1);
  CHECK(Json::parse(o.out)["worst_k"] == std::vector<int>{2});
}

TEST_CASE("smooth writes the gap table") {
  const auto spline = std::make_shared<PeriodicBumpSpline>(2, 0, 1e-4, 5);
  const HamiltonianModel H(1, {{{0}, {2}, 0.5}}, {spline}, 4);
  const fs::path cfg = fixture("smooth", H,
                               {{"torus", {{"kind", "circle"}, {"y0", {0.3}}}},
                                {"smoothing", {{"base_degrees", {32, 16}}, {"growth", {2, 1}}, {"count", 3},
                                               {"norm_grid", 12}}}});
  const fs::path out = root() / "smooth_out";
  CHECK(run({"smooth", "--config", cfg.string(), "--out", out.string()}).code == 0);
  std::ifstream table(out / "smoothing.csv");
  std::string line;
  std::getline(table, line);
  CHECK(line == "k,degree,c0_gap,c3_gap,bound");
  int rows = 0;
  while (std::getline(table, line)) ++rows;
  CHECK(rows == 3);
  CHECK(fs::exists(out / "approximants" / "H_2.json"));
  CHECK(read_json(out / "approximants" / "H_0.json")["samples"].size() == 33u * 17u);
}

TEST_CASE("usage errors exit with 2") {
  const fs::path cfg = fixture("usage", testing::rotator());
  Outcome o = run({"frobnicate", "--config", cfg.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("unknown subcommand 'frobnicate'") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"solve"}).code == 2);
  CHECK(run({"solve", "--config", (root() / "missing.json").string()}).code == 2);
  CHECK(run({"solve", "--config", cfg.string(), "--trunc", "0"}).code == 2);

  const fs::path bad = fixture("usage_bad", testing::rotator(), {{"sigma", 0.0}, {"rho", -1.0}});
  o = run({"verify", "--config", bad.string()});
  CHECK(o.code == 2);
  CHECK(o.err.find("sigma") != std::string::npos);
  CHECK(o.err.find("rho") != std::string::npos);
}
