// capxray: command-line driver for the cap X-ray library.
//
// Exit codes: 0 success, 1 a check failed, 2 usage or configuration error.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"

#include "capxray/cgo.hpp"
#include "capxray/config.hpp"
#include "capxray/dbar.hpp"
#include "capxray/fourier1.hpp"
#include "capxray/hodge.hpp"
#include "capxray/io.hpp"
#include "capxray/xray.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace capxray;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kUsage = 2;

struct Common {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
};

struct Context {
  ExperimentConfig cfg;
  fs::path out;
  std::uint64_t seed = 0;
  int jobs = 1;
};

Context make_context(const Common& c) {
  Context ctx{load_config(c.config), {}, 0, 1};
  ctx.out = c.out.empty() ? fs::path(ctx.cfg.output_dir) : fs::path(c.out);
  ctx.seed = c.seed.value_or(ctx.cfg.seed);
  ctx.jobs = c.jobs.value_or(ctx.cfg.jobs);
  if (ctx.jobs < 1) throw ConfigError("--jobs must be at least 1");
  std::error_code ec;
  fs::create_directories(ctx.out, ec);
  if (ec) throw IoError("cannot create output directory '" + ctx.out.string() + "': " + ec.message());
  spdlog::debug("config {} -> output {}", c.config, ctx.out.string());
  return ctx;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw IoError("cannot open '" + p.string() + "' for writing");
  out << text;
  if (!out) throw IoError("write to '" + p.string() + "' failed");
}

std::string num(double x) { return format_double(x); }

TransformOptions transform_options(const Context& ctx) {
  TransformOptions o;
  o.quad_nodes = ctx.cfg.domain.quad_nodes;
  o.jobs = ctx.jobs;
  return o;
}

// ---------------------------------------------------------------------------

int cmd_transform(const Common& common) {
  const Context ctx = make_context(common);
  const DomainConfig& d = ctx.cfg.domain;
  const RayGrid rays = d.rays();
  const double lambda = ctx.cfg.transform.lambda.value_or(ctx.cfg.lambdas.front());
  const PairSpec& spec = ctx.cfg.transform.pair;
  const TransformOptions opt = transform_options(ctx);

  Sinogram s;
  if (spec.kind == "file") {
    fs::path file = spec.file;
    if (file.is_relative()) file = fs::path(ctx.cfg.source).parent_path() / file;
    s = transform(rays, read_field_pair(file), lambda, opt);
  } else {
    PairFunction pair;
    if (spec.kind == "constant") {
      const cplx c = spec.value;
      pair.f = [c](const Vec3&) { return c; };
    } else if (spec.kind == "random") {
      pair = random_pair(spec.seed.value_or(ctx.seed), d.beta);
    }
    s = transform_above(rays, pair, lambda, spec.support_height.value_or(d.beta), opt);
  }
  const fs::path csv = ctx.out / "sinogram.csv";
  write_sinogram(csv, s, opt);
  spdlog::info("wrote {} and {}", csv.string(), sidecar_path(csv).string());
  std::printf("norm %s\n", num(s.norm()).c_str());
  return kOk;
}

int cmd_adjoint(const Common& common) {
  const Context ctx = make_context(common);
  fs::path in = ctx.cfg.adjoint.sinogram;
  if (in.empty()) {
    in = ctx.out / "sinogram.csv";
  } else if (in.is_relative()) {
    in = fs::path(ctx.cfg.source).parent_path() / in;
  }
  const Sinogram s = read_sinogram(in);
  const FieldPair p = adjoint(s, CapGrid(s.grid.cap.height, ctx.cfg.domain.cap_nu, ctx.cfg.domain.cap_nv),
                              transform_options(ctx));
  const fs::path csv = ctx.out / "adjoint_pair.csv";
  write_field_pair(csv, p);
  spdlog::info("wrote {}", csv.string());
  std::printf("norm %s\n", num(pair_norm(p)).c_str());
  return kOk;
}

int cmd_probe(const Common& common) {
  const Context ctx = make_context(common);
  ProbeOptions opt = ctx.cfg.probe.options;
  opt.jobs = ctx.jobs;
  const ProbeReport rep = injectivity_probe(ctx.cfg.domain.cap(), ctx.cfg.lambdas, opt);
  const auto ratio = rep.refinement_ratio();
  std::string csv = "lambda";
  for (const auto& lv : rep.levels) csv += ",sigma_min_level" + std::to_string(lv.level);
  csv += ",ratio\n";
  bool ok = true;
  for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
    csv += num(rep.lambdas[i]);
    for (const auto& lv : rep.levels) {
      csv += "," + num(lv.sigma_min[i]);
      if (!(lv.sigma_min[i] > ctx.cfg.probe.floor)) {
        ok = false;
        spdlog::error("sigma_min {} <= floor {} at lambda {} (level {})", lv.sigma_min[i],
                      ctx.cfg.probe.floor, rep.lambdas[i], lv.level);
      }
    }
    csv += "," + num(ratio[i]) + "\n";
  }
  write_text(ctx.out / "probe.csv", csv);
  std::fputs(csv.c_str(), stdout);
  if (!ok) std::printf("FLAGGED: sigma_min below floor %s (mode %s)\n", num(ctx.cfg.probe.floor).c_str(),
                       to_string(opt.mode).c_str());
  return ok ? kOk : kCheckFailed;
}

// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  double measured;
  double tolerance;
  bool pass;
};

int cmd_identity_suite(const Common& common) {
  const Context ctx = make_context(common);
  const ExperimentConfig& cfg = ctx.cfg;
  const DomainConfig& d = cfg.domain;
  const SphericalCap cap = d.cap();
  const TransformOptions opt = transform_options(ctx);
  std::vector<Check> checks;
  auto record = [&](const std::string& name, double measured, double fallback) {
    const double tol = cfg.tolerance(name, fallback);
    checks.push_back({name, measured, tol, measured <= tol});
    spdlog::info("{}: measured {} tolerance {}", name, measured, tol);
  };

  {
    const SantaloResult r = santalo_check(d.rays(), CapGrid(d.beta_prime, d.cap_nu, d.cap_nv),
                                          [](const Vec3&) { return 1.0; }, opt);
    record("santalo", r.relative_error(), 1e-3);
  }
  {
    const CapGrid grid = d.grid();
    TransformOptions kopt = opt;
    kopt.quad_nodes = std::max(kopt.quad_nodes, 768);
    double worst = 0.0;
    std::mt19937_64 rng(ctx.seed);
    for (double lambda : cfg.lambdas) {
      auto inner = std::make_shared<BumpSum>(random_cap_bumps(rng(), d.beta_prime, 2).bumps(),
                                             Polynomial::constant(0.5));
      auto s = std::make_shared<CapVanishingField>(d.beta, inner);
      const Sinogram t = transform(d.rays(), kernel_element(cap, s, lambda), lambda, kopt);
      worst = std::max(worst, t.norm() / std::sqrt(h1_norm_squared(*s, grid)));
    }
    record("kernel", worst, 1e-6);
  }
  {
    const ComplexField G = gaussian_bump({0.0, 0.0}, 1.0, 256);
    const ComplexField u = solve_dbar(G);
    record("dbar_residual", dbar_residual(u, G, 2), 1e-3);
    record("beurling_isometry", beurling_isometry(G).defect(), 1e-3);
  }
  {
    const VectorPotential A = cfg.potential.empty() ? sample_potential() : cfg.potential;
    EnergyOptions eo;
    eo.cap_height = d.beta;
    eo.box_cells = 64;
    eo.cap_nu = 96;
    eo.cap_nv = 192;
    record("energy_identity", energy_identity(A, eo).relative_gap(), 1e-2);
  }
  {
    const DiskMap dm(cap);
    std::mt19937_64 rng(ctx.seed + 1);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    double worst = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const auto ray = make_ray(cap, kTwoPi * U(rng), kPi * (U(rng) - 0.5));
      const double R = dm.radius(ray.y, ray.eta);
      worst = std::max({worst, R / dm.S_bound, 1.0 / (R * dm.S_bound)});
    }
    record("disk_map_bound", worst, 1.0);
  }

  json report = json::array();
  bool ok = true;
  for (const auto& c : checks) {
    report.push_back({{"check_name", c.name}, {"measured", c.measured}, {"tolerance", c.tolerance},
                      {"pass", c.pass}});
    ok = ok && c.pass;
  }
  const std::string text = report.dump(2) + "\n";
  write_text(ctx.out / "identity_suite.json", text);
  std::fputs(text.c_str(), stdout);
  return ok ? kOk : kCheckFailed;
}

int cmd_dbar_check(const Common& common) {
  const Context ctx = make_context(common);
  const DbarCheckConfig& c = ctx.cfg.dbar_check;
  const ComplexField G = gaussian_bump(c.center, c.radius, c.n);
  const ComplexField u = solve_dbar(G);
  write_complex_field(ctx.out / "cauchy_transform.cfield", u);

  // Indicator of the unit disk: CG = conj(z) inside and 1/z outside.
  ComplexField disk = ComplexField::square(c.n, {0.0, 0.0}, 1.25, 1.0);
  disk.fill([](cplx z) { return std::abs(z) < 1.0 ? cplx(1.0) : cplx(0.0); }, 8);
  const auto cg = cauchy_transform(disk, {cplx(0.5, 0.0), cplx(2.0, 0.0)});

  const double residual = dbar_residual(u, G, 2);
  const double defect = beurling_isometry(G, c.pad).defect();
  const double disk_err = std::max(std::abs(cg[0] - 0.5), std::abs(cg[1] - 0.5));
  const double tol_res = ctx.cfg.tolerance("dbar_residual", 1e-3);
  const double tol_iso = ctx.cfg.tolerance("beurling_isometry", 1e-3);
  const double tol_disk = ctx.cfg.tolerance("disk_closed_form", 1e-3);
  const bool ok = residual <= tol_res && defect <= tol_iso && disk_err <= tol_disk;
  json report = {
      {"dbar_residual", residual},
      {"beurling_isometry_defect", defect},
      {"disk_cauchy_at_0.5", {cg[0].real(), cg[0].imag()}},
      {"disk_cauchy_at_2", {cg[1].real(), cg[1].imag()}},
      {"disk_closed_form_error", disk_err},
      {"pass", ok},
  };
  const std::string text = report.dump(2) + "\n";
  write_text(ctx.out / "dbar_check.json", text);
  std::fputs(text.c_str(), stdout);
  return ok ? kOk : kCheckFailed;
}

// Synthetic family: c_k = 2^{-k} for k >= 0 and c_{-k} = eps k 2^{-k}.
CircleFunction synthetic_circle_function(double eps, int n, double m) {
  CoefficientTable t{n, std::vector<cplx>(n + 1)};
  for (int k = 0; k < n / 2; ++k) t.at(k) = std::ldexp(1.0, -k);
  for (int k = 1; k < n / 2; ++k) t.at(-k) = eps * k * std::ldexp(1.0, -k);
  return from_coefficients(t, m);
}

int cmd_fourier_split(const Common& common) {
  const Context ctx = make_context(common);
  const FourierSplitConfig& c = ctx.cfg.fourier_split;
  std::string csv = "epsilon,truncation_N,anti_norm_hbeta,holo_le_full_0,holo_le_full_half_m,holo_le_full_m\n";
  std::vector<double> lx, ly;
  bool inequality_ok = true;
  for (double eps : c.epsilons) {
    const CircleFunction F = synthetic_circle_function(eps, c.samples, c.smoothness);
    const SplitResult s = split(F, eps, c.beta);
    const CoefficientTable full = coefficients(F);
    const CoefficientTable holo = s.holo_table();
    csv += num(eps) + "," + std::to_string(s.truncation_N) + "," + num(s.anti_norm);
    for (double bt : {0.0, 0.5 * c.smoothness, c.smoothness}) {
      const bool le = holo.hs_norm(bt) <= full.hs_norm(bt) * (1.0 + 1e-12);
      inequality_ok = inequality_ok && le;
      csv += le ? ",1" : ",0";
    }
    csv += "\n";
    lx.push_back(std::log(eps));
    ly.push_back(std::log(s.anti_norm));
  }
  double slope = 0.0;
  if (lx.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
    mx /= lx.size();
    my /= ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    slope = sxy / sxx;
  }
  const double expected = split_decay_exponent(c.beta, c.smoothness);
  const double rel = std::abs(slope - expected) / expected;
  const bool exponent_ok = rel <= ctx.cfg.tolerance("split_exponent", 0.15);
  write_text(ctx.out / "fourier_split.csv", csv);
  std::fputs(csv.c_str(), stdout);
  std::printf("fitted_exponent %s expected %s relative_gap %s\n", num(slope).c_str(), num(expected).c_str(),
              num(rel).c_str());
  if (!exponent_ok) spdlog::warn("fitted exponent differs from {} by {}", expected, rel);
  if (!inequality_ok) spdlog::error("holomorphic part norm exceeds the full norm");
  return exponent_ok && inequality_ok ? kOk : kCheckFailed;
}

int cmd_modulus_plot(const Common& common, const std::string& kind_override) {
  const Context ctx = make_context(common);
  const ModulusPlotConfig& c = ctx.cfg.modulus_plot;
  const ModulusKind kind = parse_modulus_kind(kind_override.empty() ? c.kind : kind_override);
  // Rows are spaced evenly in log|log s| between |log s| = log_s_max and the
  // larger of -log(s_max) and the domain edge, so s increases down the file.
  const double lo = std::max(-std::log(c.s_max), -std::log(modulus_domain_limit(kind)) * (1.0 + 1e-9));
  const double hi = c.log_s_max;
  if (!(hi > lo)) throw ConfigError("modulus_plot: log_s_max must exceed the domain edge");
  std::string csv = "s,neg_log_s,modulus\n";
  for (int r = 0; r < c.rows; ++r) {
    const double x = std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * r / (c.rows - 1));
    const double s = std::exp(-x);
    // Evaluate through |log s| so rows with s below the double range stay finite.
    double y = x;
    if (kind != ModulusKind::single_log) y = std::abs(std::log(y));
    if (kind == ModulusKind::triple_log) y = std::abs(std::log(y));
    const double m = std::pow(y, -c.sigma / (3.0 * (c.sigma + 1.0)));
    csv += num(s) + "," + num(x) + "," + num(m) + "\n";
  }
  const fs::path file = ctx.out / ("modulus_" + to_string(kind) + ".csv");
  write_text(file, csv);
  spdlog::info("wrote {} ({} rows)", file.string(), c.rows);
  std::fputs(csv.c_str(), stdout);
  return kOk;
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("capxray");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("CAPXRAY_LOG")) {
    const std::string v = env;
    if (v == "error") spdlog::set_level(spdlog::level::err);
    else if (v == "warn") spdlog::set_level(spdlog::level::warn);
    else if (v == "info") spdlog::set_level(spdlog::level::info);
    else if (v == "debug") spdlog::set_level(spdlog::level::debug);
    else spdlog::warn("CAPXRAY_LOG='{}' not one of error, warn, info, debug; using warn", v);
  }
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Attenuated geodesic X-ray transform on spherical caps"};
  app.require_subcommand(1);
  Common common;
  std::string modulus_kind;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "experiment config (JSON)")->required();
    sub->add_option("--out", common.out, "output directory (overrides output_dir)");
    sub->add_option("--seed", common.seed, "seed for randomized sweeps (overrides seed)");
    sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
  };
  auto* transform_cmd = app.add_subcommand("transform", "transform a pair; writes sinogram.csv");
  auto* adjoint_cmd = app.add_subcommand("adjoint", "apply the adjoint to a sinogram");
  auto* probe_cmd = app.add_subcommand("probe", "injectivity probe; writes probe.csv");
  auto* suite_cmd = app.add_subcommand("identity-suite", "run the identity checks");
  auto* dbar_cmd = app.add_subcommand("dbar-check", "Cauchy/Beurling checks");
  auto* fourier_cmd = app.add_subcommand("fourier-split", "split of the synthetic circle family");
  auto* modulus_cmd = app.add_subcommand("modulus-plot", "sample a modulus of continuity");
  for (auto* s : {transform_cmd, adjoint_cmd, probe_cmd, suite_cmd, dbar_cmd, fourier_cmd, modulus_cmd}) {
    add_common(s);
  }
  modulus_cmd->add_option("--kind", modulus_kind, "single_log, double_log or triple_log")
      ->check(CLI::IsMember({"single_log", "double_log", "triple_log"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*transform_cmd) return cmd_transform(common);
    if (*adjoint_cmd) return cmd_adjoint(common);
    if (*probe_cmd) return cmd_probe(common);
    if (*suite_cmd) return cmd_identity_suite(common);
    if (*dbar_cmd) return cmd_dbar_check(common);
    if (*fourier_cmd) return cmd_fourier_split(common);
    if (*modulus_cmd) return cmd_modulus_plot(common, modulus_kind);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsage;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kCheckFailed;
  }
  return kUsage;
}
