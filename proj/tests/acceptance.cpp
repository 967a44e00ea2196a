// Acceptance checks. Usage: capxray_acceptance <criterion>|all
// Prints one PASS/FAIL line per criterion and exits non-zero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "capxray/capgeo.hpp"
#include "capxray/cgo.hpp"
#include "capxray/dbar.hpp"
#include "capxray/fields.hpp"
#include "capxray/fourier1.hpp"
#include "capxray/xray.hpp"

using namespace capxray;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const SphericalCap kCap(0.6, 0.5);

// ---------------------------------------------------------------------------

Outcome kernel() {
  const RayGrid rays(kCap, 64, 32);
  const CapGrid grid(kCap.height, 64, 128);
  TransformOptions opt;
  opt.quad_nodes = 768;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Polynomial background = Polynomial::affine(U(rng), CVec3(U(rng), U(rng), cplx(0.0, U(rng))));
    auto inner = std::make_shared<BumpSum>(random_cap_bumps(rng(), kCap.outer_height, 2).bumps(), background);
    auto s = std::make_shared<CapVanishingField>(kCap.height, inner);
    const double h1 = std::sqrt(h1_norm_squared(*s, grid));
    for (double lambda : {0.0, 0.1, 0.5, 1.0}) {
      const Sinogram t = transform(rays, kernel_element(kCap, s, lambda), lambda, opt);
      worst = std::max(worst, t.norm() / h1);
    }
  }
  return {worst < 1e-6, "max ||T(kernel)|| / ||s||_H1 = " + fmt("%.3e", worst) + " (< 1e-6)"};
}

Outcome santalo() {
  const BumpSum bump({Bump{Vec3(0.05, -0.03, 1.0).normalized(), 0.7, Polynomial::affine(1.0, CVec3(0.3, -0.2, 0.1))}});
  const std::vector<std::pair<std::string, std::function<double(const Vec3&)>>> fs = {
      {"1", [](const Vec3&) { return 1.0; }},
      {"x_n", [](const Vec3& x) { return x(2); }},
      {"bump", [&](const Vec3& x) { return bump.value(x).real(); }},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, F] : fs) {
    const RayGrid r0(kCap, 128, 64), r1(kCap, 256, 128);
    TransformOptions o0, o1;
    o1.quad_nodes = 2 * o0.quad_nodes;
    const double e0 = santalo_check(r0, CapGrid(kCap.outer_height, 128, 256), F, o0).relative_error();
    const double e1 = santalo_check(r1, CapGrid(kCap.outer_height, 256, 512), F, o1).relative_error();
    const double ratio = e0 / e1;
    ok = ok && e0 < 1e-3 && ratio >= 3.0;
    detail += "F=" + name + ": err " + fmt("%.2e", e0) + " ratio " + fmt("%.2f", ratio) + "; ";
  }
  return {ok, detail + "(err < 1e-3, ratio >= 3)"};
}

Outcome continuity() {
  const RayGrid rays(kCap, 64, 32);
  const CapGrid grid(kCap.height, 64, 128);
  TransformOptions opt;
  opt.quad_nodes = 64;
  bool ok = true;
  std::string detail;
  for (double lambda : {0.0, 0.5}) {
    const ContinuityReport r = continuity_constant(rays, grid, lambda, 100, 202, opt);
    ok = ok && r.max_ratio <= r.bound;
    detail += "lambda " + fmt("%g", lambda) + ": max ratio " + fmt("%.4f", r.max_ratio) + " <= " +
              fmt("%.4f", r.bound) + "; ";
  }
  return {ok, detail};
}

Outcome probe() {
  ProbeOptions opt;
  opt.mode = ProbeMode::solenoidal_pair;
  const std::vector<double> lambdas{0.0, 0.05, 0.1, 0.2};
  const ProbeReport rep = injectivity_probe(kCap, lambdas, opt);
  const auto ratio = rep.refinement_ratio();
  bool ok = true;
  std::string detail;
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double s0 = rep.levels.front().sigma_min[i];
    const double s1 = rep.levels.back().sigma_min[i];
    ok = ok && s0 > 0.0 && s1 > 0.0 && std::abs(ratio[i] - 1.0) < 0.1;
    detail += "lambda " + fmt("%g", lambdas[i]) + ": sigma_min " + fmt("%.3e", s1) + " ratio " +
              fmt("%.3f", ratio[i]) + "; ";
  }
  ProbeOptions planted = opt;
  planted.mode = ProbeMode::raw_pair;
  planted.plant_kernel = true;
  planted.levels = 1;
  const ProbeReport pk = injectivity_probe(kCap, {0.1}, planted);
  const double smin = pk.levels.front().sigma_min.front();
  ok = ok && smin < 1e-8;
  detail += "planted kernel sigma_min " + fmt("%.2e", smin) + " (< 1e-8)";
  return {ok, detail};
}

Outcome dbar() {
  double res = 0.0, iso = 0.0;
  for (cplx c : {cplx(0.0, 0.0), cplx(0.3, -0.7)}) {
    for (double R : {1.0, 2.5}) {
      const ComplexField G = gaussian_bump(c, R, 256);
      res = std::max(res, dbar_residual(solve_dbar(G), G, 2));
      iso = std::max(iso, beurling_isometry(G).defect());
    }
  }
  ComplexField disk = ComplexField::square(512, {0.0, 0.0}, 1.25, 1.0);
  disk.fill([](cplx z) { return std::abs(z) < 1.0 ? cplx(1.0) : cplx(0.0); }, 8);
  const auto cg = cauchy_transform(disk, {cplx(0.5, 0.0), cplx(2.0, 0.0)});
  const double derr = std::max(std::abs(cg[0] - 0.5), std::abs(cg[1] - 0.5));
  return {res < 1e-3 && derr < 1e-3 && iso < 1e-3,
          "residual " + fmt("%.2e", res) + ", disk |CG - 1/2| " + fmt("%.2e", derr) +
              ", isometry defect " + fmt("%.2e", iso) + " (all < 1e-3)"};
}

Outcome eikonal_transport() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double eik = 0.0, fd = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 y = make_ray(kCap, kTwoPi * U(rng), 0.0).y;
    const double u = std::acos(kCap.height) * std::sqrt(U(rng)), v = kTwoPi * U(rng);
    const Vec3 x = (0.5 + 1.5 * U(rng)) * sphere_point(u, v);
    const auto g = eikonal_gradients(y, x);
    eik = std::max({eik, std::abs(g.grad_phi.norm() - g.grad_psi.norm()) / g.grad_phi.norm(),
                    std::abs(g.grad_phi.dot(g.grad_psi)) / g.grad_phi.squaredNorm()});
    // Independent check of the closed forms by central differences.
    const double h = 1e-5;
    for (int c = 0; c < 3; ++c) {
      Vec3 e = Vec3::Zero();
      e(c) = h;
      auto phi = [](const Vec3& p) { return std::log(p.norm()); };
      auto psi = [&](const Vec3& p) { return std::acos(std::clamp(y.dot(p.normalized()), -1.0, 1.0)); };
      fd = std::max({fd, std::abs((phi(x + e) - phi(x - e)) / (2 * h) - g.grad_phi(c)),
                     std::abs((psi(x + e) - psi(x - e)) / (2 * h) - g.grad_psi(c))});
    }
  }
  const VectorPotential A = sample_potential();
  const GeodesicChart chart(kCap, 0.3, A.log_radius_extent() + 0.5);
  const Vec3 eta = chart.direction(0.15);
  HolomorphicFactor a0;
  a0.kind = HolomorphicFactor::Kind::exp_linear;
  a0.lambda = 0.5;
  std::vector<double> res;
  for (int n : {128, 256}) {
    const ChartRect rect = support_rect(A, chart, eta, n);
    const PulledBackPotential pb = pull_back(A, chart, eta, rect);
    res.push_back(transport_residual(pb, build_amplitude(pb, a0)));
  }
  const double ratio = res[0] / res[1];
  const bool ok = eik < 1e-8 && fd < 1e-6 && res[1] < 1e-3 && ratio >= 2.0;
  return {ok, "eikonal defect " + fmt("%.1e", eik) + " (< 1e-8), closed form vs FD " + fmt("%.1e", fd) +
                  ", transport residual " + fmt("%.2e", res[1]) + " (< 1e-3), refinement ratio " +
                  fmt("%.2f", ratio) + " (>= 2)"};
}

Outcome two_path() {
  const VectorPotential A = sample_potential();
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<Vec3> pts;
  for (int k = 0; k < 40; ++k) {
    pts.push_back(sphere_point(0.6 * U(rng) + 0.02, kTwoPi * U(rng)));
  }
  double worst = 0.0;
  std::string detail;
  for (double lambda : {0.0, 0.1, 0.3}) {
    const TwoPathReport r = two_path_check(A, lambda, pts, 1e-4, 128);
    worst = std::max(worst, r.relative());
    detail += "lambda " + fmt("%g", lambda) + ": " + fmt("%.2e", r.relative()) + "; ";
  }
  return {worst < 1e-4, detail + "(relative < 1e-4)"};
}

Outcome energy() {
  const EnergyResult full = energy_identity(sample_potential());
  const EnergyResult grad = energy_identity(sample_potential(true));
  const bool ok = full.relative_gap() < 1e-2 && std::abs(grad.cartesian) < 1e-8 && std::abs(grad.polar) < 1e-8;
  return {ok, "cartesian " + fmt("%.6f", full.cartesian) + " polar " + fmt("%.6f", full.polar) + " gap " +
                  fmt("%.2e", full.relative_gap()) + " (< 1e-2); gradient potential " +
                  fmt("%.1e", grad.cartesian) + ", " + fmt("%.1e", grad.polar) + " (< 1e-8)"};
}

Outcome disk_map() {
  const DiskMap dm(kCap);
  std::mt19937_64 rng(505);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  double rmin = 1e300, rmax = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const BoundaryRay r = make_ray(kCap, kTwoPi * U(rng), kPi * (U(rng) - 0.5));
    const double R = dm.radius(r.y, r.eta);
    rmin = std::min(rmin, R);
    rmax = std::max(rmax, R);
  }
  // eta = e_a is the tangent of the boundary circle: eta_3 = 0.
  const double psi = 1.1, rb = kCap.boundary_radius();
  const Vec3 y(rb * std::cos(psi), rb * std::sin(psi), kCap.outer_height);
  const Vec3 eta_flat(-std::sin(psi), std::cos(psi), 0.0);
  const double r0 = dm.radius(y, eta_flat);
  const double err = std::abs(r0 - std::sqrt(0.8125));
  const bool ok = std::abs(dm.S_bound - 36.25) < 1e-12 && rmin >= 1.0 / dm.S_bound && rmax <= dm.S_bound &&
                  err < 1e-10;
  return {ok, "S = " + fmt("%.4f", dm.S_bound) + ", R in [" + fmt("%.4f", rmin) + ", " + fmt("%.4f", rmax) +
                  "], |R(eta_3 = 0) - sqrt(0.8125)| = " + fmt("%.1e", err)};
}

Outcome fourier_split() {
  const int n = 1024;
  const double m = 3.0, beta = 0.5;
  std::vector<double> lx, ly;
  bool ineq = true;
  for (double eps : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6}) {
    CoefficientTable t{n, std::vector<cplx>(n + 1)};
    for (int k = 0; k < n / 2; ++k) t.at(k) = std::ldexp(1.0, -k);
    for (int k = 1; k < n / 2; ++k) t.at(-k) = eps * k * std::ldexp(1.0, -k);
    const CircleFunction F = from_coefficients(t, m);
    const SplitResult s = split(F, eps, beta);
    const CoefficientTable full = coefficients(F), holo = s.holo_table();
    for (double bt : {0.0, 0.5 * m, m}) ineq = ineq && holo.hs_norm(bt) <= full.hs_norm(bt) * (1 + 1e-12);
    lx.push_back(std::log(eps));
    ly.push_back(std::log(s.anti_norm));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i] / lx.size(), my += ly[i] / ly.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) sxy += (lx[i] - mx) * (ly[i] - my), sxx += (lx[i] - mx) * (lx[i] - mx);
  const double slope = sxy / sxx;
  const double expected = split_decay_exponent(beta, m);
  const double gap = std::abs(slope - expected) / expected;
  return {gap <= 0.15 && ineq, "fitted exponent " + fmt("%.4f", slope) + " vs " + fmt("%.4f", expected) +
                                   " (gap " + fmt("%.1f%%", 100 * gap) + ", need <= 15%); norm inequality " +
                                   (ineq ? "holds" : "violated")};
}

Outcome log_perturbation() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int violations = 0;
  for (int k = 0; k < 10000; ++k) {
    const cplx z = std::polar(0.5 * std::sqrt(U(rng)) * (1.0 - 1e-12), kTwoPi * U(rng));
    if (!log_perturbation_bound(z).holds) ++violations;
  }
  return {violations == 0, std::to_string(violations) + " violations in 10000 samples"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, Outcome (*)()>> all = {
      {"kernel", kernel},       {"santalo", santalo},
      {"continuity", continuity}, {"probe", probe},
      {"dbar", dbar},           {"eikonal_transport", eikonal_transport},
      {"two_path", two_path},   {"energy", energy},
      {"disk_map", disk_map},   {"fourier_split", fourier_split},
      {"log_perturbation", log_perturbation},
  };
  const std::string want = argc > 1 ? argv[1] : "all";
  int failures = 0, ran = 0;
  for (const auto& [name, fn] : all) {
    if (want != "all" && want != name) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %s: %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", want.c_str());
    return 2;
  }
  return failures == 0 ? 0 : 1;
}
