#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "kamtori/io.hpp"
#include "models.hpp"

using namespace kamtori;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "kamtori_test_io";
  fs::create_directories(dir);
  return dir / name;
}

Torus random_torus(int n, int trunc, std::mt19937& rng) {
  std::vector<double> y0(n, 0.4);
  Torus K = Torus::circle(y0, trunc);
  FourierMap P = K.periodic();
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t idx = 0; idx < P.num_modes(); ++idx) {
    const auto k = P.wavevector(idx);
    std::vector<int> neg(k);
    for (int& v : neg) v = -v;
    for (int c = 0; c < P.dim_range(); ++c) {
      const bool zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
      const cplx v = zero ? cplx{u(rng), 0.0} : cplx{u(rng), u(rng)};
      P.set_mode(k, c, v);
      P.set_mode(neg, c, std::conj(v));
    }
  }
  return Torus(P);
}

void check_same_coefficients(const Torus& a, const Torus& b) {
  const FourierMap& P = a.periodic();
  const FourierMap& Q = b.periodic();
  REQUIRE(P.trunc() == Q.trunc());
  REQUIRE(P.num_modes() == Q.num_modes());
  for (std::size_t idx = 0; idx < P.num_modes(); ++idx)
    for (int c = 0; c < P.dim_range(); ++c) CHECK(P.coeff(idx, c) == Q.coeff(idx, c));
}

}  // namespace

TEST_CASE("hamiltonian JSON round trip preserves values and derivatives") {
  std::mt19937 rng(7);
  const HamiltonianModel H = testing::random_model(2, 5, rng);
  const HamiltonianModel G = hamiltonian_from_json(hamiltonian_to_json(H));
  CHECK(G.n() == 2);
  CHECK(G.analytic());
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> z{u(rng), u(rng), u(rng), u(rng)};
    const auto a = H.derivatives(z, 2), b = G.derivatives(z, 2);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
  }
}

TEST_CASE("hamiltonian JSON with rough terms and a box") {
  const auto spline = std::make_shared<PeriodicBumpSpline>(2, 0, 1e-4, 5);
  const HamiltonianModel H(1, {{{0}, {2}, 0.5}}, {spline}, 4, Box{{-1.0, -1.0}, {2.0, 2.0}});
  const Json j = hamiltonian_to_json(H);
  CHECK(j["smoothness_class"] == 4);
  CHECK(j["rough_terms"][0]["kind"] == "periodic_bump_spline");
  const HamiltonianModel G = hamiltonian_from_json(j);
  CHECK(G.smoothness_class() == 4);
  REQUIRE(G.validity_box());
  CHECK(G.validity_box()->upper[1] == 2.0);
  const std::vector<double> z{0.3, 0.7};
  CHECK(G.value(z) == H.value(z));
  CHECK(hamiltonian_to_json(G).dump() == j.dump());
}

TEST_CASE("hamiltonian JSON rejects unknown rough kinds and bad classes") {
  Json j = Json::parse(R"({"n":1,"terms":[],"rough_terms":[{"kind":"mystery","axis":0,"amplitude":1,"order":3}]})");
  CHECK_THROWS_AS(hamiltonian_from_json(j), std::invalid_argument);
  j = Json::parse(R"({"n":1,"smoothness_class":"smooth","terms":[]})");
  CHECK_THROWS_AS(hamiltonian_from_json(j), std::invalid_argument);
  j = Json::parse(R"({"terms":[]})");
  CHECK_THROWS(hamiltonian_from_json(j));
}

TEST_CASE("torus CSV and JSON round trips are bit exact") {
  std::mt19937 rng(11);
  for (int n : {1, 2}) {
    const Torus K = random_torus(n, n == 1 ? 9 : 4, rng);
    const fs::path csv = scratch("torus_" + std::to_string(n) + ".csv");
    write_torus_csv(K, csv);
    check_same_coefficients(K, load_torus(csv));
    const fs::path js = scratch("torus_" + std::to_string(n) + ".json");
    write_json(js, torus_to_json(K));
    check_same_coefficients(K, load_torus(js));
  }
}

TEST_CASE("torus CSV stores one row per conjugate pair") {
  std::vector<double> y0{0.5};
  const Torus K = Torus::circle(y0, 6);
  const fs::path csv = scratch("circle.csv");
  write_torus_csv(K, csv);
  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header == "# n=1 m=2 M=6");
  int rows = 0;
  std::string line;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 1 + 7);  // column names plus k = 0..6
}

TEST_CASE("torus CSV without a header is rejected") {
  const fs::path csv = scratch("bad.csv");
  std::ofstream(csv) << "k1,re1,im1\n0,1,0\n";
  CHECK_THROWS_AS(read_torus_csv(csv), std::invalid_argument);
}

TEST_CASE("torus samples CSV lists the embedding on the grid") {
  std::vector<double> y0{0.25};
  const Torus K = Torus::circle(y0, 4);
  const fs::path csv = scratch("samples.csv");
  write_torus_samples_csv(K, csv);
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "theta1,z1,z2");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    double th = 0, x = 0, y = 0;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &th, &x, &y) == 3);
    CHECK(x == doctest::Approx(th).epsilon(1e-14));
    CHECK(y == doctest::Approx(0.25).epsilon(1e-14));
  }
  CHECK(rows == 9);
}

TEST_CASE("certificate JSON is deterministic with a fixed key order") {
  KamParams p;
  p.gamma = 0.3;
  p.sigma = 1.1;
  p.lambda_spec = "1e-30";
  std::vector<double> y0{testing::kGolden}, omega{testing::kGolden};
  const Torus K0 = Torus::circle(y0, 16);
  const auto a = run_scheme(testing::rotator(), K0, omega, p);
  const auto b = run_scheme(testing::rotator(), K0, omega, p);
  const Json ja = to_json(a.certificate);
  CHECK(ja.dump(2) == to_json(b.certificate).dump(2));
  CHECK(ja.begin().key() == "passed");
  CHECK(ja["passed"] == true);
  CHECK(ja["lambda_spec"] == "1e-30");
  CHECK(ja["stages"].size() == a.certificate.stages.size());

  const fs::path path = scratch("certificate.json");
  write_json(path, ja);
  CHECK(read_json(path).dump() == ja.dump());
}

TEST_CASE("iteration records serialize their step reports") {
  IterationRecord r;
  r.iter = 2;
  r.error_grid = 1e-9;
  Json j = to_json(r);
  CHECK(j["step"].is_null());
  r.step = StepReport{};
  r.step->correction_norm = 3.5;
  j = to_json(r);
  CHECK(j["step"]["correction_norm"] == 3.5);

  const fs::path path = scratch("trace.jsonl");
  write_jsonl(path, {to_json(r), to_json(r)});
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    CHECK(Json::parse(line)["iter"] == 2);
    ++lines;
  }
  CHECK(lines == 2);
}
