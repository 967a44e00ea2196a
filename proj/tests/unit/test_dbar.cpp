#include <cmath>

#include "doctest.h"

#include "capxray/dbar.hpp"
#include "capxray/quadrature.hpp"

using namespace capxray;

namespace {

ComplexField unit_disk(int n, int supersample) {
  ComplexField G = ComplexField::square(n, {0.0, 0.0}, 1.2, 1.0);
  G.fill([](cplx z) { return std::abs(z) < 1.0 ? cplx{1.0} : cplx{}; }, supersample);
  return G;
}

}  // namespace

TEST_SUITE("dbar") {

TEST_CASE("rectangle integral of 1/w against quadrature") {
  const double a0 = 0.3, a1 = 1.1, b0 = -0.4, b1 = 0.9;
  const cplx q = integrate_gl(
      [&](double a) {
        return integrate_gl([&](double b) { return 1.0 / cplx(a, b); }, b0, b1, 40);
      },
      a0, a1, 40);
  CHECK(std::abs(rect_integral_inv(a0, a1, b0, b1) - q) < 1e-12);
}

TEST_CASE("principal value of 1/w^2 vanishes on a centred square") {
  CHECK(std::abs(rect_pv_integral_inv2(-1.0, 1.0, -1.0, 1.0)) < 1e-14);
  const cplx q = integrate_gl(
      [](double a) { return integrate_gl([&](double b) { return 1.0 / (cplx(a, b) * cplx(a, b)); }, -1.0, 1.0, 40); },
      1.0, 2.0, 40);
  const cplx pv = rect_pv_integral_inv2(-1.0, 2.0, -1.0, 1.0);
  CHECK(std::abs(pv - q) < 1e-12);
}

TEST_CASE("cauchy transform of the unit disk") {
  const ComplexField G = unit_disk(256, 8);
  const auto v = cauchy_transform(G, {cplx(2.0, 0.0), cplx(0.0, -1.5), cplx(0.3, 0.2)});
  CHECK(std::abs(v[0] - 0.5) < 1e-4);
  CHECK(std::abs(v[1] - 1.0 / cplx(0.0, -1.5)) < 1e-4);
  CHECK(std::abs(v[2] - cplx(0.3, -0.2)) < 1e-2);
}

TEST_CASE("solve_dbar residual shrinks at second order") {
  const double r128 = dbar_residual(solve_dbar(gaussian_bump({0.1, -0.2}, 1.0, 128)),
                                    gaussian_bump({0.1, -0.2}, 1.0, 128), 2);
  const ComplexField G = gaussian_bump({0.1, -0.2}, 1.0, 256);
  const double r256 = dbar_residual(solve_dbar(G), G, 2);
  CHECK(r256 < 1e-3);
  CHECK(r128 / r256 > 3.5);
}

TEST_CASE("beurling transform is the z-derivative of the cauchy transform") {
  const ComplexField G = gaussian_bump({0.0, 0.0}, 1.0, 128);
  CHECK(beurling_consistency(cauchy_transform(G), beurling_transform(G)) < 1e-2);
}

TEST_CASE("beurling transform is an L2 isometry") {
  const ComplexField G = gaussian_bump({0.2, 0.1}, 1.0, 128);
  const IsometryReport r = beurling_isometry(G);
  CHECK(r.defect() < 1e-3);
  CHECK(r.norm_G == doctest::Approx(G.l2_norm()));
}

TEST_CASE("holder check arguments") {
  const std::vector<ComplexField> fam{gaussian_bump({0.0, 0.0}, 1.0, 64), ComplexField::square(64, {}, 1.2, 1.0)};
  CHECK_THROWS_AS(holder_bound_check(fam, 2, 0.5), ParameterError);
  CHECK_THROWS_AS(holder_bound_check(fam, 0, 1.0), ParameterError);
  const HolderReport r = holder_bound_check(fam, 1, 0.5);
  REQUIRE(r.ratios.size() == 2);
  CHECK(r.ratios[1] == 0.0);
  CHECK(r.max_ratio > 0.0);
}

TEST_CASE("fields must vanish outside their support disk") {
  ComplexField G = ComplexField::square(32, {}, 1.0, 0.5);
  G.fill([](cplx) { return cplx{1.0}; });
  CHECK_THROWS_AS(G.validate(), PreconditionError);
  CHECK_THROWS_AS(ComplexField(0, 4, 0, 1, 0, 1, {}, 1.0).validate(), ValidationError);
}

TEST_CASE("finite differences are exact on quadratics in the interior") {
  ComplexField u = ComplexField::square(32, {}, 1.0, 2.0);
  u.fill([](cplx z) { return z * z + std::conj(z) * 3.0; });
  const ComplexField d = dbar_fd(u);
  for (int iy = 3; iy < 29; ++iy)
    for (int ix = 3; ix < 29; ++ix) CHECK(std::abs(d(ix, iy) - 3.0) < 1e-11);
}

}  // TEST_SUITE
