#include <cmath>
#include <random>

#include "doctest.h"

#include "capxray/cgo.hpp"

using namespace capxray;

namespace {
const SphericalCap cap(0.6, 0.5);
}

TEST_SUITE("cgo") {

TEST_CASE("sample potential lies in the cone") {
  CHECK_NOTHROW(sample_potential().check_cone(0.6));
  CHECK(sample_potential().terms().size() == 3);
  CHECK(sample_potential(true).terms().size() == 1);
  PotentialTerm t;
  t.bump.center = Vec3(0.0, 0.0, 0.2);
  t.bump.radius = 0.5;
  t.direction = CVec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(VectorPotential({t}).check_cone(0.6), PreconditionError);
  CHECK_THROWS_AS(VectorPotential({t}, 0.7).validate(), ValidationError);
}

TEST_CASE("jacobian matches finite differences") {
  const VectorPotential A = sample_potential();
  const Vec3 x(0.15, 0.05, 1.45);
  const CMat3 J = A.jacobian(x);
  const double h = 1e-6;
  for (int k = 0; k < 3; ++k) {
    const Vec3 e = Vec3::Unit(k) * h;
    const CVec3 d = (A.value(x + e) - A.value(x - e)) / (2.0 * h);
    CHECK((J.col(k) - d).norm() < 1e-6 * (1.0 + J.norm()));
  }
}

TEST_CASE("holomorphic factor derivative") {
  HolomorphicFactor a;
  a.kind = HolomorphicFactor::Kind::coefficients;
  a.coeffs = {1.0, cplx(0.0, 2.0), -0.5};
  const cplx z(0.3, 0.8);
  CHECK(std::abs(a.value(z) - (1.0 + cplx(0.0, 2.0) * z - 0.5 * z * z)) < 1e-14);
  CHECK(std::abs(a.derivative(z) - (cplx(0.0, 2.0) - z)) < 1e-14);
  a.kind = HolomorphicFactor::Kind::exp_linear;
  a.lambda = 0.7;
  CHECK(std::abs(a.derivative(z) - kI * 0.7 * a.value(z)) < 1e-14);
}

TEST_CASE("amplitude solves the transport equation") {
  const VectorPotential A = sample_potential();
  const GeodesicChart chart(cap, 0.3, A.log_radius_extent() + 0.5);
  const Vec3 eta = chart.direction(0.15);
  const PulledBackPotential pb = pull_back(A, chart, eta, support_rect(A, chart, eta, 128));
  HolomorphicFactor a0;
  a0.kind = HolomorphicFactor::Kind::power;
  a0.power = 2;
  const Amplitude amp = build_amplitude(pb, a0);
  CHECK(transport_residual(pb, amp) < 5e-3);
  CHECK(amplitude_bound_ratio(amp) > 0.0);
}

TEST_CASE("moments of a gradient potential vanish") {
  const VectorPotential A = sample_potential(true);
  const Vec3 w = Vec3(0.05, -0.15, 1.0).normalized();
  const Moments m = moments_at(A, 0.0, w, 256);
  CHECK(std::abs(m.f) < 1e-10);
  const DlogAt d = dlog_at(A, 0.4, w, 256);
  CHECK(d.upsilon.norm() < 1e-10);
  CHECK(d.varrho.norm() < 1e-10);
}

TEST_CASE("two-path identity at a few points") {
  const VectorPotential A = sample_potential();
  std::vector<Vec3> pts{Vec3(0.1, 0.05, 1.0).normalized(), Vec3(-0.2, 0.1, 1.0).normalized()};
  CHECK(two_path_check(A, 0.2, pts, 1e-4, 128).relative() < 1e-4);
}

TEST_CASE("energy identity for gradients is zero") {
  EnergyOptions opt;
  opt.box_cells = 32;
  opt.cap_nu = 32;
  opt.cap_nv = 64;
  const EnergyResult r = energy_identity(sample_potential(true), opt);
  CHECK(std::abs(r.cartesian) < 1e-8);
  CHECK(std::abs(r.polar) < 1e-8);
}

TEST_CASE("disk map radius bounds") {
  const DiskMap dm(cap);
  CHECK(dm.S_bound == doctest::Approx(36.25));
  CHECK(disk_bound_S(0.5) == doctest::Approx(36.25));
  CHECK(dm.R0 == doctest::Approx(4.0));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const BoundaryRay r = make_ray(cap, kTwoPi * U(rng), 3.0 * (U(rng) - 0.5));
    const double R = dm.radius(r.y, r.eta);
    CHECK(R <= dm.S_bound);
    CHECK(R >= 1.0 / dm.S_bound);
    CHECK(std::abs(dm.apply(r.y, r.eta, std::log(dm.center(r.y, r.eta)))) < 1e-12);
  }
}

}  // TEST_SUITE
