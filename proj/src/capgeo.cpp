#include "capxray/capgeo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "capxray/quadrature.hpp"

namespace capxray {

namespace {

constexpr double kUnitTol = 1e-10;

std::string fmt_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_orthonormal(const Vec3& y, const Vec3& eta, const char* who) {
  if (std::abs(y.norm() - 1.0) > kUnitTol || std::abs(eta.norm() - 1.0) > kUnitTol ||
      std::abs(y.dot(eta)) > kUnitTol) {
    throw ValidationError(std::string(who) + ": y and eta must be orthonormal");
  }
}

}  // namespace

SphericalCap::SphericalCap(double beta, double beta_prime, int n)
    : dim(n), height(beta), outer_height(beta_prime) {
  validate();
}

void SphericalCap::validate() const {
  if (dim < 3) throw ValidationError("SphericalCap: dimension must be at least 3");
  if (!(outer_height > 0.0 && outer_height < height && height < 1.0)) {
    throw ValidationError("SphericalCap: need 0 < beta' < beta < 1, got beta=" +
                          fmt_double(height) + ", beta'=" + fmt_double(outer_height));
  }
}

double SphericalCap::boundary_radius() const {
  return std::sqrt(1.0 - outer_height * outer_height);
}
double SphericalCap::inner_colatitude() const { return std::acos(height); }
double SphericalCap::outer_colatitude() const { return std::acos(outer_height); }
double SphericalCap::max_exit_time() const { return 2.0 * std::acos(outer_height); }

Vec3 sphere_point(double u, double v) {
  const double s = std::sin(u);
  return {s * std::cos(v), s * std::sin(v), std::cos(u)};
}

Vec3 colatitude_tangent(double u, double v) {
  const double c = std::cos(u);
  return {c * std::cos(v), c * std::sin(v), -std::sin(u)};
}

Vec3 azimuth_tangent(double v) { return {-std::sin(v), std::cos(v), 0.0}; }

Vec3 boundary_normal(const SphericalCap& cap, const Vec3& y) {
  const double psi = std::atan2(y(1), y(0));
  const double b = cap.outer_height;
  return {b * std::cos(psi), b * std::sin(psi), -cap.boundary_radius()};
}

BoundaryRay make_ray(const SphericalCap& cap, double psi, double a) {
  if (!(std::abs(a) < 0.5 * kPi)) throw ValidationError("make_ray: inward angle outside (-pi/2, pi/2)");
  const double b = cap.outer_height;
  const double r = cap.boundary_radius();
  const double c = std::cos(psi), s = std::sin(psi);
  BoundaryRay ray;
  ray.y = Vec3(r * c, r * s, b);
  const Vec3 ea(-s, c, 0.0);
  const Vec3 eb(-b * c, -b * s, r);
  ray.eta = std::sin(a) * ea + std::cos(a) * eb;
  ray.tau = 2.0 * std::atan2(ray.eta(2), b);
  ray.weight = std::cos(a);
  return ray;
}

BoundaryRay make_ray(const SphericalCap& cap, const Vec3& y, const Vec3& eta) {
  require_orthonormal(y, eta, "make_ray");
  if (std::abs(y(2) - cap.outer_height) > kUnitTol) {
    throw ValidationError("make_ray: foot point is not on the boundary circle");
  }
  BoundaryRay ray{y, eta, exit_time(cap, y, eta), 0.0};
  ray.weight = std::abs(eta.dot(boundary_normal(cap, y)));
  return ray;
}

Vec3 geodesic(const Vec3& y, const Vec3& eta, double theta) {
  require_orthonormal(y, eta, "geodesic");
  return std::cos(theta) * y + std::sin(theta) * eta;
}

Vec3 geodesic_velocity(const Vec3& y, const Vec3& eta, double theta) {
  require_orthonormal(y, eta, "geodesic_velocity");
  return -std::sin(theta) * y + std::cos(theta) * eta;
}

double exit_time(const SphericalCap& cap, const Vec3& y, const Vec3& eta) {
  require_orthonormal(y, eta, "exit_time");
  if (!(eta(2) > 0.0)) throw PreconditionError("exit_time: direction is not inward-pointing");
  return 2.0 * std::atan2(eta(2), cap.outer_height);
}

// gamma_n(theta) = beta' cos(theta) + eta_n sin(theta) = A cos(theta - theta*)
Chord chord_above(const SphericalCap& cap, const BoundaryRay& ray, double level) {
  if (level <= cap.outer_height) return {0.0, ray.tau};
  const double A = std::hypot(ray.y(2), ray.eta(2));
  const double center = std::atan2(ray.eta(2), ray.y(2));
  if (level >= A) return {};
  const double half = std::acos(level / A);
  return {std::max(0.0, center - half), std::min(ray.tau, center + half)};
}

CapGrid::CapGrid(double cap_height, int n_u, int n_v) : height(cap_height), nu(n_u), nv(n_v) {
  validate();
}

void CapGrid::validate() const {
  if (!(height > -1.0 && height < 1.0)) throw ValidationError("CapGrid: height must lie in (-1, 1)");
  if (nu < 4) throw ValidationError("CapGrid: need at least 4 colatitude cells");
  if (nv < 8 || nv % 2 != 0) throw ValidationError("CapGrid: azimuth count must be even and >= 8");
}

double CapGrid::max_colatitude() const { return std::acos(height); }
double CapGrid::du() const { return max_colatitude() / nu; }
double CapGrid::dv() const { return kTwoPi / nv; }
double CapGrid::area_weight(int i) const { return std::sin(u(i)) * du() * dv(); }

RayGrid::RayGrid(const SphericalCap& c, int npsi, int na) : cap(c), n_psi(npsi), n_a(na) {
  validate();
}

void RayGrid::validate() const {
  cap.validate();
  if (n_psi < 4 || n_a < 2) throw ValidationError("RayGrid: need n_psi >= 4 and n_a >= 2");
}

double RayGrid::psi(int p) const { return kTwoPi * p / n_psi; }
double RayGrid::a(int k) const { return 0.5 * kPi * gauss_legendre(n_a).nodes[k]; }

BoundaryRay RayGrid::ray(int p, int k) const { return make_ray(cap, psi(p), a(k)); }

double RayGrid::measure(int r) const {
  const int k = r % n_a;
  const double wa = 0.5 * kPi * gauss_legendre(n_a).weights[k];
  return (kTwoPi / n_psi) * cap.boundary_radius() * wa * std::cos(a(k));
}

bool RayGrid::operator==(const RayGrid& o) const {
  return cap.dim == o.cap.dim && cap.height == o.cap.height &&
         cap.outer_height == o.cap.outer_height && n_psi == o.n_psi && n_a == o.n_a;
}

GeodesicChart::GeodesicChart(const SphericalCap& cap, const Vec3& foot, double log_radius_bound,
                             double theta_margin)
    : y(foot), inner_height(cap.height), T(log_radius_bound), eps(theta_margin) {
  cap.validate();
  if (std::abs(y.norm() - 1.0) > kUnitTol || std::abs(y(2) - cap.outer_height) > kUnitTol) {
    throw ValidationError("GeodesicChart: foot point must lie on the outer boundary circle");
  }
  if (!(T > 0.0)) throw ValidationError("GeodesicChart: log-radius bound must be positive");
  if (!(eps > 0.0 && eps < 0.5 * kPi)) throw ValidationError("GeodesicChart: bad theta margin");
}

GeodesicChart::GeodesicChart(const SphericalCap& cap, double psi, double log_radius_bound,
                             double theta_margin)
    : GeodesicChart(cap, make_ray(cap, psi, 0.0).y, log_radius_bound, theta_margin) {}

ChartPoint GeodesicChart::forward(const Vec3& x) const {
  const double r = x.norm();
  if (!(r > 0.0)) throw DomainError("psi_forward: x must be nonzero");
  const Vec3 xh = x / r;
  if (!(xh(2) > inner_height)) throw DomainError("psi_forward: x/|x| lies outside the cap");
  ChartPoint p;
  p.t = std::log(r);
  if (std::abs(p.t) >= T) throw DomainError("psi_forward: |log|x|| exceeds the chart range T");
  p.theta = std::acos(std::clamp(y.dot(xh), -1.0, 1.0));
  if (p.theta < eps || p.theta > kPi - eps) {
    throw DomainError("psi_forward: chart singularity (theta within eps of 0 or pi)");
  }
  p.eta = (xh - std::cos(p.theta) * y) / std::sin(p.theta);
  p.eta.normalize();
  return p;
}

Vec3 GeodesicChart::inverse(const ChartPoint& p) const { return inverse(p.t, p.theta, p.eta); }

Vec3 GeodesicChart::inverse(double t, double theta, const Vec3& eta) const {
  return std::exp(t) * geodesic(y, eta, theta);
}

Vec3 GeodesicChart::direction(double a) const {
  const double psi = std::atan2(y(1), y(0));
  const double b = y(2);
  const double r = std::sqrt(std::max(0.0, 1.0 - b * b));
  const Vec3 ea(-std::sin(psi), std::cos(psi), 0.0);
  const Vec3 eb(-b * std::cos(psi), -b * std::sin(psi), r);
  return std::sin(a) * ea + std::cos(a) * eb;
}

double metric_det(double t, double theta, int n, double sphere_det) {
  return std::exp(2.0 * n * t) * std::pow(std::sin(theta), 2.0 * (n - 2)) * sphere_det;
}

EikonalGradients eikonal_gradients(const Vec3& y, const Vec3& x) {
  const double r = x.norm();
  const Vec3 xh = x / r;
  const double c = std::clamp(y.dot(xh), -1.0, 1.0);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  if (!(s > 0.0)) throw DomainError("eikonal_gradients: x/|x| is at +-y");
  return {x / (r * r), (c * xh - y) / (s * r)};
}

DbarIdentityReport dbar_identity_check(const GeodesicChart& chart,
                                       const std::function<cplx(const Vec3&)>& f,
                                       const std::vector<Vec3>& points, double step) {
  DbarIdentityReport rep;
  const double h = step;
  for (const Vec3& x : points) {
    const ChartPoint p = chart.forward(x);
    const auto grads = eikonal_gradients(chart.y, x);
    CVec3 gf;
    for (int k = 0; k < 3; ++k) {
      Vec3 e = Vec3::Zero();
      e(k) = h;
      gf(k) = (f(x + e) - f(x - e)) / (2.0 * h);
    }
    const cplx lhs = (grads.grad_phi.cast<cplx>().transpose() * gf)(0) +
                     kI * (grads.grad_psi.cast<cplx>().transpose() * gf)(0);
    const cplx ft = (f(chart.inverse(p.t + h, p.theta, p.eta)) -
                     f(chart.inverse(p.t - h, p.theta, p.eta))) / (2.0 * h);
    const cplx fth = (f(chart.inverse(p.t, p.theta + h, p.eta)) -
                      f(chart.inverse(p.t, p.theta - h, p.eta))) / (2.0 * h);
    const cplx rhs = 2.0 * std::exp(-2.0 * p.t) * 0.5 * (ft + kI * fth);
    rep.max_abs_residual = std::max(rep.max_abs_residual, std::abs(lhs - rhs));
    rep.max_lhs = std::max(rep.max_lhs, std::abs(lhs));
    ++rep.points;
  }
  rep.max_residual = rep.max_lhs > 0.0 ? rep.max_abs_residual / rep.max_lhs : rep.max_abs_residual;
  return rep;
}

}  // namespace capxray
