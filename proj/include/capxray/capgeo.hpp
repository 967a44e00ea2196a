#pragma once

/// \file
/// Geometry of spherical caps S^{n-1}_{>h} = {x in S^{n-1} : x_n > h},
/// great-circle geodesics, exit times and the geodesic coordinates
/// x -> (log|x|, d(y, x/|x|), eta) attached to a boundary point y.
///
/// Numerics are specialised to n = 3. The ambient dimension is kept in the
/// types so that formulas valid for general n (metric_det) can be evaluated.

#include <functional>
#include <vector>

#include "capxray/types.hpp"

namespace capxray {

/// The pair of nested caps S_{>beta} (inner, where data live) and
/// S_{>beta'} (outer, the transform domain), 0 < beta' < beta < 1.
struct SphericalCap {
  int dim = 3;
  double height = 0.6;        // beta
  double outer_height = 0.5;  // beta'

  SphericalCap() = default;
  SphericalCap(double beta, double beta_prime, int n = 3);

  /// Throws ValidationError unless 0 < beta' < beta < 1 and dim >= 3.
  void validate() const;

  /// Radius of the boundary circle {x_n = beta'} in the plane x_n = beta'.
  [[nodiscard]] double boundary_radius() const;
  /// Colatitude of the inner boundary, arccos(beta).
  [[nodiscard]] double inner_colatitude() const;
  /// Colatitude of the outer boundary, arccos(beta').
  [[nodiscard]] double outer_colatitude() const;
  /// Longest chord through the outer cap, 2 arccos(beta').
  [[nodiscard]] double max_exit_time() const;
};

/// Point on the unit sphere with given colatitude u (from e_3) and azimuth v.
Vec3 sphere_point(double u, double v);
/// d/du and (1/sin u) d/dv unit tangent vectors at (u, v).
Vec3 colatitude_tangent(double u, double v);
Vec3 azimuth_tangent(double v);

/// Inward boundary ray (y, eta) in the unit sphere bundle of S_{>beta'}.
struct BoundaryRay {
  Vec3 y;
  Vec3 eta;
  double tau = 0.0;     // exit time
  double weight = 0.0;  // |<eta, nu(y)>|
};

/// Outward unit conormal of the boundary circle {x_n = beta'} at y.
Vec3 boundary_normal(const SphericalCap& cap, const Vec3& y);

/// Builds the ray with foot point at azimuth psi and inward angle
/// a in (-pi/2, pi/2): eta = sin(a) e_tangent + cos(a) e_inward.
BoundaryRay make_ray(const SphericalCap& cap, double psi, double a);

/// Validates (y, eta) as an inward boundary ray and fills tau and weight.
BoundaryRay make_ray(const SphericalCap& cap, const Vec3& y, const Vec3& eta);

/// gamma_{y,eta}(theta) = cos(theta) y + sin(theta) eta. Throws
/// ValidationError unless y, eta are orthonormal to 1e-10.
Vec3 geodesic(const Vec3& y, const Vec3& eta, double theta);
/// d/dtheta of geodesic().
Vec3 geodesic_velocity(const Vec3& y, const Vec3& eta, double theta);

/// First theta > 0 at which the geodesic leaves S_{>beta'}; closed form
/// 2 atan(eta_n / beta') for n = 3. Throws PreconditionError if eta_n <= 0.
double exit_time(const SphericalCap& cap, const Vec3& y, const Vec3& eta);

/// Sub-interval [enter, leave] of [0, tau] on which the geodesic lies in
/// {x_n > level}. Empty (enter >= leave) when the ray misses that cap.
struct Chord {
  double enter = 0.0;
  double leave = 0.0;
  [[nodiscard]] double length() const { return leave > enter ? leave - enter : 0.0; }
  [[nodiscard]] bool empty() const { return leave <= enter; }
};
Chord chord_above(const SphericalCap& cap, const BoundaryRay& ray, double level);

/// Colatitude-azimuth tensor grid on the cap {x_n > height}: cell centres
/// u_i = (i + 1/2) h_u for i < nu, so the pole u = 0 is never a node, and
/// v_j = j h_v periodic. nv must be even (pole reflection pairs j with
/// j + nv/2).
struct CapGrid {
  double height = 0.6;
  int nu = 128;
  int nv = 256;

  CapGrid() = default;
  CapGrid(double cap_height, int n_u, int n_v);

  void validate() const;

  [[nodiscard]] double max_colatitude() const;
  [[nodiscard]] double du() const;
  [[nodiscard]] double dv() const;
  [[nodiscard]] double u(int i) const { return (i + 0.5) * du(); }
  [[nodiscard]] double v(int j) const { return j * dv(); }
  [[nodiscard]] int size() const { return nu * nv; }
  [[nodiscard]] int index(int i, int j) const { return i * nv + j; }
  [[nodiscard]] Vec3 point(int i, int j) const { return sphere_point(u(i), v(j)); }
  [[nodiscard]] Vec3 point(int k) const { return point(k / nv, k % nv); }
  /// Midpoint-rule area weight sin(u_i) h_u h_v.
  [[nodiscard]] double area_weight(int i) const;
  [[nodiscard]] bool operator==(const CapGrid& other) const = default;
};

/// Boundary-ray grid: foot azimuth psi uniform (n_psi) times inward angle a
/// at Gauss-Legendre nodes on (-pi/2, pi/2) (n_a).
struct RayGrid {
  SphericalCap cap;
  int n_psi = 128;
  int n_a = 64;

  RayGrid() = default;
  RayGrid(const SphericalCap& c, int npsi, int na);

  void validate() const;

  [[nodiscard]] int size() const { return n_psi * n_a; }
  [[nodiscard]] int index(int p, int k) const { return p * n_a + k; }
  [[nodiscard]] double psi(int p) const;
  [[nodiscard]] double a(int k) const;
  [[nodiscard]] BoundaryRay ray(int p, int k) const;
  [[nodiscard]] BoundaryRay ray(int r) const { return ray(r / n_a, r % n_a); }
  /// Quadrature weight of ray r for d mu = |<eta, nu>| dy d eta.
  [[nodiscard]] double measure(int r) const;
  [[nodiscard]] bool operator==(const RayGrid& other) const;
};

/// Geodesic coordinates (t, theta, eta) of a point x in B.
struct ChartPoint {
  double t = 0.0;
  double theta = 0.0;
  Vec3 eta;
};

/// Chart Psi_y for a fixed boundary foot point y. Points must project into
/// the inner cap S_{>beta}; theta must stay in (eps, pi - eps) and t in
/// (-T, T).
struct GeodesicChart {
  Vec3 y;
  double inner_height = 0.6;
  double T = 1.0;
  double eps = 1e-6;

  GeodesicChart() = default;
  GeodesicChart(const SphericalCap& cap, const Vec3& foot, double log_radius_bound,
                double theta_margin = 1e-6);
  /// Foot point at azimuth psi on the outer boundary circle.
  GeodesicChart(const SphericalCap& cap, double psi, double log_radius_bound,
                double theta_margin = 1e-6);

  /// Throws DomainError if x/|x| is outside S_{>beta} or |t| >= T, and
  /// DomainError (chart singularity) if theta is within eps of 0 or pi.
  [[nodiscard]] ChartPoint forward(const Vec3& x) const;
  [[nodiscard]] Vec3 inverse(const ChartPoint& p) const;
  [[nodiscard]] Vec3 inverse(double t, double theta, const Vec3& eta) const;

  /// Unit vector in y^perp with positive last component at inward angle a,
  /// using the same frame as make_ray.
  [[nodiscard]] Vec3 direction(double a) const;
};

/// det g of the Euclidean metric in geodesic coordinates:
/// e^{2nt} (sin theta)^{2(n-2)} det g_{S^{n-2}}.
double metric_det(double t, double theta, int n = 3, double sphere_det = 1.0);

/// Gradients of the eikonal pair phi = log|x|, psi = d_{S^{n-1}}(y, x/|x|).
struct EikonalGradients {
  Vec3 grad_phi;
  Vec3 grad_psi;
};
EikonalGradients eikonal_gradients(const Vec3& y, const Vec3& x);

/// Result of comparing (grad rho . grad f)(x) with 2 e^{-2t} d_zbar (f o Psi^{-1}).
struct DbarIdentityReport {
  double max_residual = 0.0;  // max |lhs - rhs| / max(|lhs|) over points
  double max_abs_residual = 0.0;
  double max_lhs = 0.0;
  int points = 0;
};

/// Evaluates both sides of the identity at every point by central finite
/// differences with the given step: Cartesian gradient on the left,
/// (t, theta) derivatives of f along the chart on the right.
DbarIdentityReport dbar_identity_check(const GeodesicChart& chart,
                                       const std::function<cplx(const Vec3&)>& f,
                                       const std::vector<Vec3>& points, double step = 1e-3);

}  // namespace capxray
