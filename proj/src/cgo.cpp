#include "capxray/cgo.hpp"

#include <algorithm>
#include <cmath>

#include "capxray/quadrature.hpp"

namespace capxray {

VectorPotential::VectorPotential(std::vector<PotentialTerm> terms, double sigma)
    : terms_(std::move(terms)), sigma_(sigma) {
  validate();
}

void VectorPotential::validate() const {
  if (!(sigma_ > 0.0 && sigma_ < 0.5)) {
    throw ValidationError("VectorPotential: smoothness sigma must lie in (0, 1/2)");
  }
  for (const auto& t : terms_) {
    if (!(t.bump.radius > 0.0)) throw ValidationError("VectorPotential: bump radius must be positive");
  }
}

CVec3 VectorPotential::value(const Vec3& x) const {
  CVec3 a = CVec3::Zero();
  for (const auto& t : terms_) {
    if (!t.bump.contains(x)) continue;
    if (t.kind == PotentialTerm::Kind::directed) {
      a += t.bump.value(x) * t.direction;
    } else {
      a += t.bump.gradient(x);
    }
  }
  return a;
}

CMat3 VectorPotential::jacobian(const Vec3& x) const {
  CMat3 J = CMat3::Zero();
  for (const auto& t : terms_) {
    if (!t.bump.contains(x)) continue;
    if (t.kind == PotentialTerm::Kind::directed) {
      J += t.direction * t.bump.gradient(x).transpose();
    } else {
      J += t.bump.hessian(x);
    }
  }
  return J;
}

VectorPotential VectorPotential::scaled(cplx s) const {
  VectorPotential out = *this;
  for (auto& t : out.terms_) {
    if (t.kind == PotentialTerm::Kind::directed) {
      t.direction *= s;
    } else {
      for (auto& m : t.bump.poly.terms) m.coef *= s;
    }
  }
  return out;
}

void VectorPotential::check_cone(double height) const {
  const double U = std::acos(height);
  for (const auto& t : terms_) {
    const double c = t.bump.center.norm();
    const double r = t.bump.radius;
    if (!(c > r)) throw PreconditionError("VectorPotential: a support ball contains the origin");
    const double angle = std::acos(std::clamp(t.bump.center(2) / c, -1.0, 1.0)) + std::asin(r / c);
    if (!(angle < U)) {
      throw PreconditionError("VectorPotential: a support ball leaves the cone over the cap");
    }
  }
}

double VectorPotential::log_radius_extent() const {
  double m = 0.0;
  for (const auto& t : terms_) {
    const double c = t.bump.center.norm();
    m = std::max({m, std::abs(std::log(std::max(c - t.bump.radius, 1e-300))),
                  std::abs(std::log(c + t.bump.radius))});
  }
  return m;
}

VectorPotential sample_potential(bool gradient_only) {
  PotentialTerm a;
  a.bump = {Vec3(0.2, 0.1, 1.5), 0.4, Polynomial::constant(1.0)};
  a.direction = CVec3(1.0, cplx(0.0, 0.5), 0.2);
  PotentialTerm b;
  b.bump = {Vec3(-0.3, 0.2, 1.2), 0.35, Polynomial::affine(1.0, CVec3(0.5, -0.25, cplx(0.0, 0.3)))};
  b.direction = CVec3(0.3, -1.0, cplx(0.5, 0.2));
  PotentialTerm c;
  c.kind = PotentialTerm::Kind::gradient;
  c.bump = {Vec3(0.1, -0.3, 1.8), 0.5, Polynomial::affine(cplx(0.5, -0.2), CVec3(0.2, 0.1, -0.3))};
  if (gradient_only) return VectorPotential({c});
  return VectorPotential({a, b, c});
}

// ---------------------------------------------------------------------------

namespace {

Vec3 chart_point(const GeodesicChart& chart, const Vec3& eta, double t, double theta) {
  return std::exp(t) * (std::cos(theta) * chart.y + std::sin(theta) * eta);
}

void require_direction(const GeodesicChart& chart, const Vec3& eta) {
  if (std::abs(eta.norm() - 1.0) > 1e-10 || std::abs(eta.dot(chart.y)) > 1e-10) {
    throw ValidationError("pull_back: eta must be a unit vector orthogonal to y");
  }
}

}  // namespace

ChartRect support_rect(const VectorPotential& A, const GeodesicChart& chart, const Vec3& eta,
                       int n, double pad_fraction) {
  require_direction(chart, eta);
  const int scan = 256;
  const double ta = -chart.T, tb = chart.T;
  const double qa = chart.eps, qb = kPi - chart.eps;
  double t0 = tb, t1 = ta, q0 = qb, q1 = qa;
  for (int i = 0; i <= scan; ++i) {
    const double t = ta + (tb - ta) * i / scan;
    for (int j = 0; j <= scan; ++j) {
      const double q = qa + (qb - qa) * j / scan;
      if (A.value(chart_point(chart, eta, t, q)).norm() > 0.0) {
        t0 = std::min(t0, t);
        t1 = std::max(t1, t);
        q0 = std::min(q0, q);
        q1 = std::max(q1, q);
      }
    }
  }
  if (t1 < t0) throw PreconditionError("support_rect: the potential does not meet this plane");
  const double dt = (tb - ta) / scan, dq = (qb - qa) / scan;
  const double pt = pad_fraction * (t1 - t0 + 2 * dt) + dt;
  const double pq = pad_fraction * (q1 - q0 + 2 * dq) + dq;
  ChartRect r;
  r.n = n;
  r.t0 = std::max(t0 - pt, 0.999 * ta);
  r.t1 = std::min(t1 + pt, 0.999 * tb);
  r.theta0 = std::max(q0 - pq, qa + 1e-9);
  r.theta1 = std::min(q1 + pq, qb - 1e-9);
  return r;
}

PulledBackPotential pull_back(const VectorPotential& A, const GeodesicChart& chart,
                              const Vec3& eta, const ChartRect& rect) {
  require_direction(chart, eta);
  if (!(rect.t0 > -chart.T && rect.t1 < chart.T && rect.theta0 > chart.eps &&
        rect.theta1 < kPi - chart.eps && rect.t1 > rect.t0 && rect.theta1 > rect.theta0)) {
    throw PreconditionError("pull_back: rectangle leaves the chart range");
  }
  const cplx c(0.5 * (rect.t0 + rect.t1), 0.5 * (rect.theta0 + rect.theta1));
  const double rad = 0.5 * std::hypot(rect.t1 - rect.t0, rect.theta1 - rect.theta0);
  PulledBackPotential pb{eta,
                         ComplexField(rect.n, rect.n, rect.t0, rect.t1, rect.theta0, rect.theta1, c, rad),
                         ComplexField(rect.n, rect.n, rect.t0, rect.t1, rect.theta0, rect.theta1, c, rad)};
  for (int iy = 0; iy < rect.n; ++iy) {
    for (int ix = 0; ix < rect.n; ++ix) {
      const cplx z = pb.W_t.point(ix, iy);
      const double t = z.real(), q = z.imag();
      const Vec3 g = std::cos(q) * chart.y + std::sin(q) * eta;
      const Vec3 gd = -std::sin(q) * chart.y + std::cos(q) * eta;
      const double et = std::exp(t);
      const CVec3 a = A.value(et * g);
      pb.W_t(ix, iy) = et * (a.transpose() * g.cast<cplx>())(0);
      pb.W_theta(ix, iy) = et * (a.transpose() * gd.cast<cplx>())(0);
    }
  }
  double top = 0.0, border = 0.0;
  for (int iy = 0; iy < rect.n; ++iy) {
    for (int ix = 0; ix < rect.n; ++ix) {
      const double m = std::max(std::abs(pb.W_t(ix, iy)), std::abs(pb.W_theta(ix, iy)));
      top = std::max(top, m);
      if (ix == 0 || iy == 0 || ix == rect.n - 1 || iy == rect.n - 1) border = std::max(border, m);
    }
  }
  if (border > 1e-12 * std::max(1.0, top)) {
    throw PreconditionError("pull_back: potential support leaks outside the chart rectangle");
  }
  return pb;
}

cplx HolomorphicFactor::value(cplx z) const {
  switch (kind) {
    case Kind::constant: return 1.0;
    case Kind::exp_linear: return std::exp(kI * lambda * z);
    case Kind::power: return std::pow(z, power);
    case Kind::coefficients: {
      cplx s{};
      for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) s = s * z + *it;
      return s;
    }
  }
  return 0.0;
}

cplx HolomorphicFactor::derivative(cplx z) const {
  switch (kind) {
    case Kind::constant: return 0.0;
    case Kind::exp_linear: return kI * lambda * std::exp(kI * lambda * z);
    case Kind::power: return power == 0 ? cplx{} : double(power) * std::pow(z, power - 1);
    case Kind::coefficients: {
      cplx s{};
      for (int k = static_cast<int>(coeffs.size()) - 1; k >= 1; --k) s = s * z + double(k) * coeffs[k];
      return s;
    }
  }
  return 0.0;
}

Amplitude build_amplitude(const PulledBackPotential& pb, const HolomorphicFactor& a0) {
  if (!pb.W_t.same_grid(pb.W_theta)) throw ShapeError("build_amplitude: W_t and W_theta grids differ");
  ComplexField G = pb.W_t;
  for (std::size_t k = 0; k < G.values.size(); ++k) {
    G.values[k] = -0.5 * kI * (pb.W_t.values[k] + kI * pb.W_theta.values[k]);
  }
  Amplitude amp{a0, solve_dbar(G), G};
  for (int iy = 0; iy < G.ny; ++iy) {
    for (int ix = 0; ix < G.nx; ++ix) {
      const cplx z = G.point(ix, iy);
      amp.values(ix, iy) = std::exp(-0.5 * z.real()) / std::sqrt(std::sin(z.imag())) *
                           std::exp(amp.phi(ix, iy)) * a0.value(z);
    }
  }
  return amp;
}

double transport_residual(const PulledBackPotential& pb, const Amplitude& amp, int margin) {
  const ComplexField& a = amp.values;
  const ComplexField da = dbar_fd(a);
  const int m = std::max(1, margin);
  double num = 0.0, den = 0.0;
  for (int iy = m; iy < a.ny - m; ++iy) {
    for (int ix = m; ix < a.nx - m; ++ix) {
      const cplx z = a.point(ix, iy);
      const double cot = 1.0 / std::tan(z.imag());
      const cplx W = pb.W_t(ix, iy) + kI * pb.W_theta(ix, iy);
      const cplx r = da(ix, iy) + 0.25 * (1.0 + kI * cot) * a(ix, iy) + 0.5 * kI * W * a(ix, iy);
      num += std::norm(r);
      den += std::norm(a(ix, iy));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double amplitude_bound_ratio(const Amplitude& amp) {
  ComplexField a0 = amp.values;
  a0.fill([&](cplx z) { return amp.a0.value(z); });
  const double denom = std::exp(amp.phi.max_abs()) * wk_inf_norm(a0, 1);
  return denom > 0.0 ? wk_inf_norm(amp.values, 1) / denom : 0.0;
}

// ---------------------------------------------------------------------------
// Moments along rays t -> e^t w

namespace {

struct Interval {
  double a, b;
};

// t-interval on which e^t w lies in the ball of the term.
bool term_interval(const PotentialTerm& t, const Vec3& w, Interval& out) {
  const double wc = w.dot(t.bump.center);
  const double disc = wc * wc - t.bump.center.squaredNorm() + t.bump.radius * t.bump.radius;
  if (disc <= 0.0) return false;
  const double sq = std::sqrt(disc);
  const double s0 = wc - sq, s1 = wc + sq;
  if (!(s0 > 0.0)) throw PreconditionError("moments: a support ball contains the origin");
  out = {std::log(s0), std::log(s1)};
  return true;
}

// Sorted break points of all term intervals met by the ray.
std::vector<double> breakpoints(const VectorPotential& A, const Vec3& w) {
  std::vector<double> p;
  for (const auto& t : A.terms()) {
    Interval iv;
    if (term_interval(t, w, iv)) {
      p.push_back(iv.a);
      p.push_back(iv.b);
    }
  }
  std::sort(p.begin(), p.end());
  p.erase(std::unique(p.begin(), p.end()), p.end());
  return p;
}

}  // namespace

Moments moments_at(const VectorPotential& A, double lambda, const Vec3& w, int nodes) {
  Moments m;
  const auto& gl = gauss_legendre(nodes);
  for (const auto& term : A.terms()) {
    Interval iv;
    if (!term_interval(term, w, iv)) continue;
    const VectorPotential single({term}, A.smoothness_sigma());
    const double half = 0.5 * (iv.b - iv.a), mid = 0.5 * (iv.a + iv.b);
    for (int q = 0; q < gl.size(); ++q) {
      const double t = mid + half * gl.nodes[q];
      const double et = std::exp(t);
      const CVec3 a = single.value(et * w);
      const cplx c = half * gl.weights[q] * std::exp(kI * lambda * t) * et;
      m.f += c * (w.cast<cplx>().transpose() * a)(0);
      m.alpha += kI * c * a;
    }
  }
  return m;
}

MomentFields moment_transform(const VectorPotential& A, double lambda, const CapGrid& grid,
                              int nodes) {
  MomentFields out{grid, std::vector<cplx>(grid.size()), std::vector<CVec3>(grid.size())};
  for (int k = 0; k < grid.size(); ++k) {
    const Vec3 w = grid.point(k);
    const Moments m = moments_at(A, lambda, w, nodes);
    out.f[k] = m.f;
    out.alpha[k] = tangential(w, m.alpha);
  }
  return out;
}

DlogAt dlog_at(const VectorPotential& A, double lambda, const Vec3& w, int nodes) {
  DlogAt d;
  const auto& gl = gauss_legendre(nodes);
  const CVec3 wc = w.cast<cplx>();
  for (const auto& term : A.terms()) {
    Interval iv;
    if (!term_interval(term, w, iv)) continue;
    const VectorPotential single({term}, A.smoothness_sigma());
    const double half = 0.5 * (iv.b - iv.a), mid = 0.5 * (iv.a + iv.b);
    for (int q = 0; q < gl.size(); ++q) {
      const double t = mid + half * gl.nodes[q];
      const double et = std::exp(t);
      const CMat3 J = single.jacobian(et * w);
      const cplx c = half * gl.weights[q] * std::exp(kI * lambda * t) * et * et;
      d.upsilon += c * (J.transpose() * wc - J * wc);
      d.varrho += c * (J - J.transpose());
    }
  }
  return d;
}

DlogFields dlog_fields(const VectorPotential& A, double lambda, const CapGrid& grid, int nodes) {
  DlogFields out{grid, std::vector<CVec3>(grid.size()), std::vector<CMat3>(grid.size())};
  for (int k = 0; k < grid.size(); ++k) {
    const DlogAt d = dlog_at(A, lambda, grid.point(k), nodes);
    out.upsilon[k] = d.upsilon;
    out.varrho[k] = d.varrho;
  }
  return out;
}

TwoPathReport two_path_check(const VectorPotential& A, double lambda,
                             const std::vector<Vec3>& points, double step, int nodes) {
  TwoPathReport rep;
  for (const Vec3& w0 : points) {
    const Vec3 w = w0.normalized();
    const double u = std::acos(std::clamp(w(2), -1.0, 1.0));
    const double v = std::atan2(w(1), w(0));
    const Moments m = moments_at(A, lambda, w, nodes);
    const DlogAt d = dlog_at(A, lambda, w, nodes);
    for (const Vec3& e : {colatitude_tangent(u, v), azimuth_tangent(v)}) {
      const Vec3 wp = std::cos(step) * w + std::sin(step) * e;
      const Vec3 wm = std::cos(step) * w - std::sin(step) * e;
      const cplx df = (moments_at(A, lambda, wp, nodes).f - moments_at(A, lambda, wm, nodes).f) /
                      (2.0 * step);
      const cplx path1 = df + lambda * (m.alpha.transpose() * e.cast<cplx>())(0);
      const cplx path2 = (d.upsilon.transpose() * e.cast<cplx>())(0);
      rep.max_abs_diff = std::max(rep.max_abs_diff, std::abs(path1 - path2));
      rep.max_ref = std::max(rep.max_ref, std::abs(path2));
    }
  }
  return rep;
}

double EnergyResult::relative_gap() const {
  if (cartesian == 0.0) return std::abs(polar);
  return std::abs(cartesian - polar) / std::abs(cartesian);
}

EnergyResult energy_identity(const VectorPotential& A, const EnergyOptions& opt) {
  EnergyResult res;
  if (A.empty()) return res;
  A.check_cone(opt.cap_height);
  auto density = [&](const Vec3& x) {
    const CMat3 J = A.jacobian(x);
    return (J - J.transpose()).squaredNorm();
  };

  Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
  for (const auto& t : A.terms()) {
    lo = lo.cwiseMin(t.bump.center - Vec3::Constant(t.bump.radius));
    hi = hi.cwiseMax(t.bump.center + Vec3::Constant(t.bump.radius));
  }
  const int n = opt.box_cells;
  const Vec3 h = (hi - lo) / n;
  double cart = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        cart += density(lo + Vec3((i + 0.5) * h(0), (j + 0.5) * h(1), (k + 0.5) * h(2)));
      }
    }
  }
  res.cartesian = cart * h.prod();

  const CapGrid grid(opt.cap_height, opt.cap_nu, opt.cap_nv);
  const auto& gl = gauss_legendre(opt.t_nodes);
  double pol = 0.0;
  for (int i = 0; i < grid.nu; ++i) {
    const double wa = grid.area_weight(i);
    for (int j = 0; j < grid.nv; ++j) {
      const Vec3 w = grid.point(i, j);
      const auto bp = breakpoints(A, w);
      double line = 0.0;
      for (std::size_t s = 0; s + 1 < bp.size(); ++s) {
        const double half = 0.5 * (bp[s + 1] - bp[s]), mid = 0.5 * (bp[s] + bp[s + 1]);
        for (int q = 0; q < gl.size(); ++q) {
          const double t = mid + half * gl.nodes[q];
          line += half * gl.weights[q] * std::exp(3.0 * t) * density(std::exp(t) * w);
        }
      }
      pol += wa * line;
    }
  }
  res.polar = pol;
  return res;
}

// ---------------------------------------------------------------------------

double disk_bound_S(double bp) {
  return std::max(1.0 / (bp * bp * (bp * bp + 3.0)), 8.0 / (bp * bp) + 4.0 + bp * bp);
}

DiskMap::DiskMap(const SphericalCap& cap)
    : beta_prime(cap.outer_height), R0(2.0 / cap.outer_height),
      y0(0.0, 0.0, 2.0 / cap.outer_height + cap.outer_height),
      S_bound(disk_bound_S(cap.outer_height)) {
  cap.validate();
}

cplx DiskMap::center(const Vec3& y, const Vec3& eta) const { return {y.dot(y0), eta.dot(y0)}; }

double DiskMap::radius(const Vec3& y, const Vec3& eta) const {
  if (std::abs(y.norm() - 1.0) > 1e-10 || std::abs(eta.norm() - 1.0) > 1e-10 ||
      std::abs(y.dot(eta)) > 1e-10) {
    throw ValidationError("DiskMap: y and eta must be orthonormal");
  }
  if (std::abs(y(2) - beta_prime) > 1e-10) throw ValidationError("DiskMap: y must satisfy y_n = beta'");
  const double a = y.dot(y0), b = eta.dot(y0);
  const double r2 = a * a + b * b + R0 * R0 - y0.squaredNorm();
  if (!(r2 > 0.0)) throw DomainError("DiskMap: the plane of (y, eta) misses B_{R0}(y0)");
  return std::sqrt(r2);
}

cplx DiskMap::apply(const Vec3& y, const Vec3& eta, cplx z) const {
  return (std::exp(z) - center(y, eta)) / radius(y, eta);
}

}  // namespace capxray
