#include <cmath>
#include <random>

#include "doctest.h"

#include "capxray/xray.hpp"

using namespace capxray;

namespace {

const SphericalCap cap(0.6, 0.5);

Sinogram random_sinogram(const RayGrid& rays, double lambda, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> N;
  Sinogram s(rays, lambda);
  for (auto& v : s.values) v = {N(rng), N(rng)};
  return s;
}

}  // namespace

TEST_SUITE("xray") {

TEST_CASE("constant function over the whole chord") {
  const RayGrid rays(cap, 16, 8);
  PairFunction one{[](const Vec3&) { return cplx{1.0}; }, {}};
  for (double lambda : {0.0, 0.5}) {
    const Sinogram s = transform_above(rays, one, lambda, cap.outer_height);
    for (int r = 0; r < rays.size(); ++r) {
      const double tau = rays.ray(r).tau;
      const double expect = lambda == 0.0 ? tau : (1.0 - std::exp(-lambda * tau)) / lambda;
      CHECK(std::abs(s.values[r] - expect) < 1e-10);
    }
  }
  CHECK_THROWS_AS(transform_above(rays, one, 0.0, 0.7), ParameterError);
}

TEST_CASE("zero pair has zero transform") {
  const RayGrid rays(cap, 16, 8);
  const Sinogram s = transform(rays, PairFunction{}, 0.3);
  CHECK(s.norm() == 0.0);
}

TEST_CASE("gridded adjoint is the transpose") {
  const RayGrid rays(cap, 32, 16);
  const CapGrid grid(0.6, 32, 64);
  TransformOptions opt;
  opt.quad_nodes = 48;
  for (double lambda : {0.0, 0.7}) {
    const FieldPair h = FieldPair::sample(grid, random_pair(11, 0.6));
    const Sinogram g = random_sinogram(rays, lambda, 12);
    const cplx lhs = sinogram_inner(transform(rays, h, lambda, opt), g);
    const cplx rhs = pair_inner(h, adjoint(g, grid, opt));
    CHECK(std::abs(lhs - rhs) < 1e-11 * std::abs(lhs));
  }
}

TEST_CASE("analytic and gridded transforms agree") {
  const RayGrid rays(cap, 32, 16);
  const CapGrid grid(0.6, 128, 256);
  const PairFunction p = random_pair(5, 0.6);
  const Sinogram a = transform(rays, p, 0.2);
  const Sinogram b = transform(rays, FieldPair::sample(grid, p), 0.2);
  Sinogram d = a;
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b.values[k];
  CHECK(d.norm() < 1e-3 * a.norm());
}

TEST_CASE("kernel elements are annihilated") {
  const RayGrid rays(cap, 16, 8);
  TransformOptions opt;
  opt.quad_nodes = 512;
  auto inner = std::make_shared<BumpSum>(random_cap_bumps(9, 0.5, 2).bumps(), Polynomial::constant(0.5));
  auto s = std::make_shared<CapVanishingField>(0.6, inner);
  for (double lambda : {0.0, 0.4}) {
    const Sinogram t = transform(rays, kernel_element(cap, s, lambda), lambda, opt);
    CHECK(t.norm() < 1e-7);
  }
  auto wrong = std::make_shared<CapVanishingField>(0.55, inner);
  CHECK_THROWS_AS(kernel_element(cap, wrong, 0.1), PreconditionError);
}

TEST_CASE("santalo quadrature of the constant") {
  const RayGrid rays(cap, 128, 64);
  const SantaloResult r = santalo_check(rays, CapGrid(0.5, 128, 256), [](const Vec3&) { return 1.0; });
  CHECK(r.relative_error() < 1e-3);
}

TEST_CASE("continuity constant stays below the bound") {
  const RayGrid rays(cap, 32, 16);
  const ContinuityReport r = continuity_constant(rays, CapGrid(0.6, 32, 64), 0.5, 5, 77);
  CHECK(r.trials == 5);
  CHECK(r.max_ratio > 0.0);
  CHECK(r.max_ratio < r.bound);
  CHECK(r.bound == doctest::Approx(kPi * std::exp(kPi)));
}

TEST_CASE("probe basis and options") {
  ProbeOptions opt;
  CHECK(probe_scalar_count(opt) == 60);
  CHECK(probe_scalar(cap, opt, 0, Vec3(0.0, 0.0, 1.0)) == 0.0);
  CHECK(probe_scalar(cap, opt, 5, Vec3(std::sqrt(0.51), 0.0, 0.7)) == 0.0);
  CHECK(parse_probe_mode(to_string(ProbeMode::raw_pair)) == ProbeMode::raw_pair);
  CHECK_THROWS_AS(parse_probe_mode("bogus"), Error);
  CHECK_THROWS_AS(injectivity_probe(cap, {1.5}, opt), ValidationError);
  CHECK_THROWS_AS(injectivity_probe(cap, {}, opt), ValidationError);
}

TEST_CASE("small function probe is positive") {
  ProbeOptions opt;
  opt.mode = ProbeMode::function_only;
  opt.rings = 2;
  opt.max_mode = 1;
  opt.levels = 1;
  opt.cap_nu = 16;
  opt.cap_nv = 32;
  opt.n_psi = 32;
  opt.n_a = 16;
  opt.quad_nodes = 32;
  const ProbeReport r = injectivity_probe(cap, {0.0, 0.2}, opt);
  REQUIRE(r.levels.size() == 1);
  CHECK(r.levels[0].basis_size == 6);
  for (double s : r.levels[0].sigma_min) CHECK(s > 1e-3);
}

}  // TEST_SUITE
