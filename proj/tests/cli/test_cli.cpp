#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "capxray/capgeo.hpp"

using namespace capxray;
namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::path(CAPXRAY_CLI_WORKDIR);

fs::path write_config(const std::string& name, const std::string& text) {
  fs::create_directories(kWork);
  const fs::path p = kWork / name;
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(CAPXRAY_CLI) + " " + args + " > /dev/null 2> " +
                          (kWork / "stderr.txt").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::vector<double>> csv_rows(const fs::path& p) {
  std::vector<std::vector<double>> rows;
  std::ifstream in(p);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || !(std::isdigit(line[0]) || line[0] == '-')) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

const std::string kSmall = R"({
  "domain": {"cap_nu": 16, "cap_nv": 32, "n_psi": 16, "n_a": 8, "quad_nodes": 32},
  "lambdas": [0.0, 0.3],
  "transform": {"pair": {"kind": "random"}}
})";

}  // namespace

TEST_CASE("missing config exits with 2") {
  CHECK(run("transform --config " + (kWork / "does_not_exist.json").string()) == 2);
  CHECK(run("transform") == 2);
}

TEST_CASE("invalid config exits with 2 and names the line") {
  const fs::path cfg = write_config("bad.json", "{\n  \"domain\": {\n    \"bta\": 0.7\n  }\n}\n");
  CHECK(run("transform --config " + cfg.string()) == 2);
  const std::string err = slurp(kWork / "stderr.txt");
  CHECK(err.find("bad.json:3") != std::string::npos);
  CHECK(err.find("/domain/bta") != std::string::npos);
}

TEST_CASE("tampered tolerance fails the identity suite") {
  const fs::path cfg = write_config(
      "tight.json", R"({"domain": {"n_psi": 32, "n_a": 16},
                       "identity_suite": {"tolerances": {"santalo": 1e-30}}})");
  const fs::path out = kWork / "tight";
  CHECK(run("identity-suite --config " + cfg.string() + " --out " + out.string()) == 1);
  const std::string report = slurp(out / "identity_suite.json");
  CHECK(report.find("\"pass\": false") != std::string::npos);
}

TEST_CASE("outputs are byte-identical across runs") {
  const fs::path cfg = write_config("small.json", kSmall);
  for (const std::string cmd : {"transform", "fourier-split", "modulus-plot"}) {
    const fs::path a = kWork / ("det_a_" + cmd), b = kWork / ("det_b_" + cmd);
    const int ra = run(cmd + " --config " + cfg.string() + " --out " + a.string() + " --seed 17");
    const int rb = run(cmd + " --config " + cfg.string() + " --out " + b.string() + " --seed 17");
    CHECK(ra == rb);
    for (const auto& e : fs::directory_iterator(a)) {
      INFO(e.path().string());
      CHECK(slurp(e.path()) == slurp(b / e.path().filename()));
    }
  }
  const fs::path c = kWork / "det_c";
  run("transform --config " + cfg.string() + " --out " + c.string() + " --seed 18");
  CHECK(slurp(c / "sinogram.csv") != slurp(kWork / "det_a_transform" / "sinogram.csv"));
}

TEST_CASE("zero and constant pairs") {
  const fs::path zero = write_config("zero.json", R"({
    "domain": {"n_psi": 16, "n_a": 8}, "transform": {"pair": {"kind": "zero"}}})");
  CHECK(run("transform --config " + zero.string() + " --out " + (kWork / "zero").string()) == 0);
  for (const auto& r : csv_rows(kWork / "zero" / "sinogram.csv")) {
    CHECK(r[2] == 0.0);
    CHECK(r[3] == 0.0);
  }

  const fs::path one = write_config("one.json", R"({
    "domain": {"n_psi": 16, "n_a": 8},
    "transform": {"pair": {"kind": "constant", "value": 1.0, "support_height": 0.5}}})");
  CHECK(run("transform --config " + one.string() + " --out " + (kWork / "one").string()) == 0);
  const RayGrid rays(SphericalCap(0.6, 0.5), 16, 8);
  const auto rows = csv_rows(kWork / "one" / "sinogram.csv");
  REQUIRE(rows.size() == static_cast<std::size_t>(rays.size()));
  for (const auto& r : rows) {
    const double tau = rays.ray(static_cast<int>(r[0]), static_cast<int>(r[1])).tau;
    CHECK(std::abs(r[2] - tau) < 1e-9);
    CHECK(r[3] == 0.0);
  }
}

TEST_CASE("adjoint reads a written sinogram") {
  const fs::path cfg = write_config("small2.json", kSmall);
  const fs::path out = kWork / "adj";
  REQUIRE(run("transform --config " + cfg.string() + " --out " + out.string()) == 0);
  const fs::path acfg = write_config(
      "adj.json", R"({"domain": {"cap_nu": 16, "cap_nv": 32}, "adjoint": {"sinogram": ")" +
                      (out / "sinogram.csv").string() + "\"}}");
  CHECK(run("adjoint --config " + acfg.string() + " --out " + out.string()) == 0);
  CHECK(csv_rows(out / "adjoint_pair.csv").size() == 16u * 32u);
  const fs::path missing = write_config("adj_missing.json", R"({"adjoint": {"sinogram": "nowhere.csv"}})");
  CHECK(run("adjoint --config " + missing.string() + " --out " + out.string()) == 2);
}

TEST_CASE("double-log modulus at s = exp(-e^e)") {
  const fs::path cfg = write_config("mod.json", R"({"modulus_plot": {"kind": "double_log",
    "sigma": 0.25, "rows": 2, "s_max": 0.001, "log_s_max": 15.154262241479262}})");
  const fs::path out = kWork / "mod";
  REQUIRE(run("modulus-plot --config " + cfg.string() + " --out " + out.string()) == 0);
  const auto rows = csv_rows(out / "modulus_double_log.csv");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][2] == doctest::Approx(std::exp(-1.0 / 15.0)).epsilon(1e-10));
  CHECK(rows[0][2] == doctest::Approx(0.9355).epsilon(1e-4));
  CHECK(rows[1][2] > rows[0][2]);
  CHECK(run("modulus-plot --kind triple_log --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "modulus_triple_log.csv"));
}

TEST_CASE("dbar check passes on the default field") {
  const fs::path cfg = write_config("dbar.json", R"({"dbar_check": {"n": 256}})");
  const fs::path out = kWork / "dbar";
  CHECK(run("dbar-check --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(fs::exists(out / "cauchy_transform.cfield"));
}

TEST_CASE("probe writes one row per lambda") {
  const fs::path cfg = write_config("probe.json", R"({
    "lambdas": [0.0, 0.1],
    "probe": {"mode": "function_only", "rings": 2, "max_mode": 1, "levels": 1,
              "cap_nu": 16, "cap_nv": 32, "n_psi": 32, "n_a": 16, "quad_nodes": 32}})");
  const fs::path out = kWork / "probe";
  CHECK(run("probe --config " + cfg.string() + " --out " + out.string()) == 0);
  CHECK(csv_rows(out / "probe.csv").size() == 2);
}
