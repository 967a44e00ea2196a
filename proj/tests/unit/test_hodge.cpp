#include <cmath>

#include "doctest.h"

#include "capxray/hodge.hpp"
#include "capxray/xray.hpp"

using namespace capxray;

namespace {

std::vector<cplx> sample(const CapGrid& g, double (*f)(const Vec3&)) {
  std::vector<cplx> out(g.size());
  for (int k = 0; k < g.size(); ++k) out[k] = f(g.point(k));
  return out;
}

double max_diff(const std::vector<cplx>& a, const std::vector<cplx>& b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
  return m;
}

// z - 0.6 vanishes on the boundary and has Laplace-Beltrami -2z.
double height(const Vec3& x) { return x(2) - 0.6; }
double minus_two_z(const Vec3& x) { return -2.0 * x(2); }

}  // namespace

TEST_SUITE("hodge") {

TEST_CASE("dirichlet solve of the height function converges at second order") {
  double prev = 0.0;
  for (int n : {32, 64}) {
    const CapGrid g(0.6, n, 2 * n);
    CapPoissonProblem p{g, sample(g, minus_two_z), {}, 0.0};
    dirichlet_solve(p);
    CHECK(p.relative_residual < 1e-10);
    const double err = max_diff(p.solution, sample(g, height));
    CHECK(err < 2e-3);
    if (prev > 0.0) CHECK(prev / err > 3.0);
    prev = err;
  }
}

TEST_CASE("manufactured solutions converge with ratio close to four") {
  const double b = 0.6;
  double prev[2] = {0.0, 0.0};
  for (int n : {32, 64, 128}) {
    const CapGrid g(b, n, 2 * n);
    std::vector<cplx> r1(g.size()), r2(g.size());
    for (int k = 0; k < g.size(); ++k) {
      const Vec3 x = g.point(k);
      const double z = x(2);
      r1[k] = 2.0 * (1.0 - z * z) - 4.0 * z * (z - b);
      r2[k] = -6.0 * x(0) * z + 2.0 * b * x(0);
    }
    const auto s1 = dirichlet_solve(g, r1);
    const auto s2 = dirichlet_solve(g, r2);
    double e[2] = {0.0, 0.0};
    for (int k = 0; k < g.size(); ++k) {
      const Vec3 x = g.point(k);
      e[0] = std::max(e[0], std::abs(s1[k] - (x(2) - b) * (x(2) - b)));
      e[1] = std::max(e[1], std::abs(s2[k] - (x(2) - b) * x(0)));
    }
    for (int c = 0; c < 2; ++c) {
      if (prev[c] > 0.0) {
        CHECK(prev[c] / e[c] > 3.5);
        CHECK(prev[c] / e[c] < 4.5);
      }
      prev[c] = e[c];
    }
  }
  CHECK(prev[0] < 1e-5);
}

TEST_CASE("divergence of the height gradient") {
  const CapGrid g(0.6, 64, 128);
  std::vector<CVec3> a(g.size());
  for (int k = 0; k < g.size(); ++k) a[k] = tangential(g.point(k), CVec3(0.0, 0.0, 1.0));
  const auto d = divergence(g, a);
  for (int k = 0; k < g.size(); ++k) CHECK(std::abs(d[k] + 2.0 * g.point(k)(2)) < 2e-3);
}

TEST_CASE("divergence vanishes on rotations and constants") {
  const CapGrid g(0.6, 32, 64);
  std::vector<CVec3> rot(g.size());
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 x = g.point(k);
    rot[k] = Vec3(-x(1), x(0), 0.0).cast<cplx>();
  }
  for (const cplx& d : divergence(g, rot)) CHECK(std::abs(d) < 1e-12);
}

TEST_CASE("projection output is divergence free and idempotent") {
  const CapGrid g(0.6, 32, 64);
  const FieldPair h = FieldPair::sample(g, random_pair(4, 0.6));
  const HodgeProjector proj(g);
  const HodgeSplit once = proj.project(h, 0.3);
  double scale = 0.0;
  for (const auto& a : h.alpha) scale = std::max(scale, a.norm());
  for (const cplx& d : weak_divergence(g, once.pair.alpha)) CHECK(std::abs(d) < 1e-9 * scale / g.du());
  const HodgeSplit twice = proj.project(once.pair, 0.3);
  CHECK(pair_norm(twice.pair - once.pair) < 1e-8 * pair_norm(once.pair));
}

TEST_CASE("solenoidal forms are left alone") {
  const CapGrid g(0.6, 32, 64);
  FieldPair h(g);
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 x = g.point(k);
    h.f[k] = x(0);
    h.alpha[k] = (x(2) * Vec3(-x(1), x(0), 0.0)).cast<cplx>();
  }
  const FieldPair out = solenoidal_project(h, 0.5);
  CHECK(pair_norm(out - h) < 1e-8 * pair_norm(h));
}

TEST_CASE("gradients of boundary-vanishing potentials are removed") {
  const CapGrid g(0.6, 64, 128);
  FieldPair h(g);
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 x = g.point(k);
    const double s = (x(2) - 0.6) * (1.0 + x(0));
    const Vec3 grad = Vec3(x(2) - 0.6, 0.0, 1.0 + x(0));
    h.alpha[k] = tangential(x, grad.cast<cplx>().eval());
  }
  const HodgeSplit split = HodgeProjector(g).project(h, 0.0);
  CHECK(l2_norm(g, split.pair.alpha) < 5e-3 * l2_norm(g, h.alpha));
}

TEST_CASE("projection preserves the transform up to quadrature") {
  const SphericalCap cap(0.6, 0.5);
  const RayGrid rays(cap, 32, 16);
  const CapGrid g(0.6, 64, 128);
  const FieldPair h = FieldPair::sample(g, random_pair(8, 0.6));
  const double lambda = 0.25;
  const Sinogram a = transform(rays, h, lambda);
  const Sinogram b = transform(rays, solenoidal_project(h, lambda), lambda);
  Sinogram d = a;
  for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b.values[k];
  CHECK(d.norm() < 1e-2 * a.norm());
}

TEST_CASE("grid mismatch is a shape error") {
  const HodgeProjector proj(CapGrid(0.6, 16, 32));
  CHECK_THROWS_AS((void)proj.project(FieldPair(CapGrid(0.6, 16, 64)), 0.0), ShapeError);
}

}  // TEST_SUITE
