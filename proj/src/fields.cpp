#include "capxray/fields.hpp"

#include <cmath>
#include <utility>

namespace capxray {

namespace {

// x^p and its first two derivatives, with 0^0 = 1.
struct PowerDerivs {
  double v, d1, d2;
};

PowerDerivs power_derivs(double x, int p) {
  if (p == 0) return {1.0, 0.0, 0.0};
  if (p == 1) return {x, 1.0, 0.0};
  return {std::pow(x, p), p * std::pow(x, p - 1), p * (p - 1) * std::pow(x, p - 2)};
}

}  // namespace

Polynomial Polynomial::constant(cplx c) {
  Polynomial p;
  p.terms.push_back({c, {0, 0, 0}});
  return p;
}

Polynomial Polynomial::affine(cplx c0, const CVec3& g) {
  Polynomial p;
  p.terms.push_back({c0, {0, 0, 0}});
  p.terms.push_back({g(0), {1, 0, 0}});
  p.terms.push_back({g(1), {0, 1, 0}});
  p.terms.push_back({g(2), {0, 0, 1}});
  return p;
}

cplx Polynomial::value(const Vec3& x) const {
  cplx sum{};
  for (const auto& m : terms) {
    sum += m.coef * power_derivs(x(0), m.powers[0]).v * power_derivs(x(1), m.powers[1]).v *
           power_derivs(x(2), m.powers[2]).v;
  }
  return sum;
}

CVec3 Polynomial::gradient(const Vec3& x) const {
  CVec3 g = CVec3::Zero();
  for (const auto& m : terms) {
    const auto a = power_derivs(x(0), m.powers[0]);
    const auto b = power_derivs(x(1), m.powers[1]);
    const auto c = power_derivs(x(2), m.powers[2]);
    g(0) += m.coef * a.d1 * b.v * c.v;
    g(1) += m.coef * a.v * b.d1 * c.v;
    g(2) += m.coef * a.v * b.v * c.d1;
  }
  return g;
}

CMat3 Polynomial::hessian(const Vec3& x) const {
  CMat3 h = CMat3::Zero();
  for (const auto& m : terms) {
    const auto a = power_derivs(x(0), m.powers[0]);
    const auto b = power_derivs(x(1), m.powers[1]);
    const auto c = power_derivs(x(2), m.powers[2]);
    h(0, 0) += m.coef * a.d2 * b.v * c.v;
    h(1, 1) += m.coef * a.v * b.d2 * c.v;
    h(2, 2) += m.coef * a.v * b.v * c.d2;
    h(0, 1) += m.coef * a.d1 * b.d1 * c.v;
    h(0, 2) += m.coef * a.d1 * b.v * c.d1;
    h(1, 2) += m.coef * a.v * b.d1 * c.d1;
  }
  h(1, 0) = h(0, 1);
  h(2, 0) = h(0, 2);
  h(2, 1) = h(1, 2);
  return h;
}

bool Bump::contains(const Vec3& x) const { return (x - center).squaredNorm() < radius * radius; }

// Profile g(q) = exp(-1/(1-q)) of q = |x-c|^2/r^2 with g' and g''.
namespace {
struct Profile {
  double g, g1, g2;
};
Profile profile(double q) {
  if (q >= 1.0) return {0.0, 0.0, 0.0};
  const double s = 1.0 / (1.0 - q);
  const double g = std::exp(-s);
  return {g, -g * s * s, g * (s * s * s * s - 2.0 * s * s * s)};
}
}  // namespace

cplx Bump::value(const Vec3& x) const {
  const double q = (x - center).squaredNorm() / (radius * radius);
  if (q >= 1.0) return 0.0;
  return poly.value(x) * profile(q).g;
}

CVec3 Bump::gradient(const Vec3& x) const {
  const double q = (x - center).squaredNorm() / (radius * radius);
  if (q >= 1.0) return CVec3::Zero();
  const Profile pr = profile(q);
  const Vec3 dq = 2.0 * (x - center) / (radius * radius);
  return poly.value(x) * (pr.g1 * dq).cast<cplx>() + pr.g * poly.gradient(x);
}

CMat3 Bump::hessian(const Vec3& x) const {
  const double q = (x - center).squaredNorm() / (radius * radius);
  if (q >= 1.0) return CMat3::Zero();
  const Profile pr = profile(q);
  const Vec3 dq = 2.0 * (x - center) / (radius * radius);
  const Eigen::Matrix3d he =
      pr.g2 * dq * dq.transpose() + pr.g1 * (2.0 / (radius * radius)) * Eigen::Matrix3d::Identity();
  const CVec3 ge = (pr.g1 * dq).cast<cplx>();
  const CVec3 gp = poly.gradient(x);
  return poly.value(x) * he.cast<cplx>() + gp * ge.transpose() + ge * gp.transpose() +
         pr.g * poly.hessian(x);
}

BumpSum::BumpSum(std::vector<Bump> bumps, Polynomial background)
    : bumps_(std::move(bumps)), background_(std::move(background)) {}

cplx BumpSum::value(const Vec3& x) const {
  cplx s = background_.value(x);
  for (const auto& b : bumps_) s += b.value(x);
  return s;
}

CVec3 BumpSum::gradient(const Vec3& x) const {
  CVec3 g = background_.gradient(x);
  for (const auto& b : bumps_) g += b.gradient(x);
  return g;
}

CMat3 BumpSum::hessian(const Vec3& x) const {
  CMat3 h = background_.hessian(x);
  for (const auto& b : bumps_) h += b.hessian(x);
  return h;
}

CapVanishingField::CapVanishingField(double level, std::shared_ptr<const ScalarField> inner)
    : level_(level), inner_(std::move(inner)) {}

cplx CapVanishingField::value(const Vec3& x) const { return (x(2) - level_) * inner_->value(x); }

CVec3 CapVanishingField::gradient(const Vec3& x) const {
  CVec3 g = (x(2) - level_) * inner_->gradient(x);
  g(2) += inner_->value(x);
  return g;
}

CMat3 CapVanishingField::hessian(const Vec3& x) const {
  CMat3 h = (x(2) - level_) * inner_->hessian(x);
  const CVec3 gi = inner_->gradient(x);
  h.row(2) += gi.transpose();
  h.col(2) += gi;
  return h;
}

FieldPair::FieldPair(const CapGrid& g)
    : grid(g), f(g.size(), cplx{}), alpha(g.size(), CVec3::Zero()) {}

FieldPair FieldPair::sample(const CapGrid& g, const PairFunction& pair) {
  g.validate();
  FieldPair out(g);
  for (int k = 0; k < g.size(); ++k) {
    const Vec3 x = g.point(k);
    out.f[k] = pair.eval_f(x);
    out.alpha[k] = pair.eval_alpha(x);
  }
  return out;
}

void FieldPair::validate() const {
  grid.validate();
  if (static_cast<int>(f.size()) != grid.size() || static_cast<int>(alpha.size()) != grid.size()) {
    throw ShapeError("FieldPair: sample arrays do not match the grid shape");
  }
  double scale = 1.0;
  for (const auto& a : alpha) scale = std::max(scale, a.norm());
  for (int k = 0; k < grid.size(); ++k) {
    const Vec3 x = grid.point(k);
    if (std::abs((x.cast<cplx>().transpose() * alpha[k])(0)) > 1e-10 * scale) {
      throw ValidationError("FieldPair: alpha is not tangent at node " + std::to_string(k));
    }
  }
}

FieldPair& FieldPair::operator+=(const FieldPair& other) {
  if (!(grid == other.grid)) throw ShapeError("FieldPair: grids differ");
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] += other.f[k];
    alpha[k] += other.alpha[k];
  }
  return *this;
}

FieldPair& FieldPair::operator*=(cplx s) {
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] *= s;
    alpha[k] *= s;
  }
  return *this;
}

FieldPair FieldPair::operator-(const FieldPair& other) const {
  FieldPair out = other;
  out *= -1.0;
  out += *this;
  return out;
}

cplx pair_inner(const FieldPair& a, const FieldPair& b) {
  if (!(a.grid == b.grid)) throw ShapeError("pair_inner: grids differ");
  cplx sum{};
  for (int i = 0; i < a.grid.nu; ++i) {
    const double w = a.grid.area_weight(i);
    for (int j = 0; j < a.grid.nv; ++j) {
      const int k = a.grid.index(i, j);
      sum += w * (kTwoPi * a.f[k] * std::conj(b.f[k]) + kPi * b.alpha[k].dot(a.alpha[k]));
    }
  }
  return sum;
}

double pair_norm(const FieldPair& a) { return std::sqrt(std::max(0.0, pair_inner(a, a).real())); }

double pair_norm(const PairFunction& pair, const CapGrid& grid) {
  double sum = 0.0;
  for (int i = 0; i < grid.nu; ++i) {
    const double w = grid.area_weight(i);
    for (int j = 0; j < grid.nv; ++j) {
      const Vec3 x = grid.point(i, j);
      sum += w * (kTwoPi * std::norm(pair.eval_f(x)) + kPi * pair.eval_alpha(x).squaredNorm());
    }
  }
  return std::sqrt(sum);
}

double h1_norm_squared(const ScalarField& s, const CapGrid& grid) {
  double sum = 0.0;
  for (int i = 0; i < grid.nu; ++i) {
    const double w = grid.area_weight(i);
    for (int j = 0; j < grid.nv; ++j) {
      const Vec3 x = grid.point(i, j);
      sum += w * (std::norm(s.value(x)) + tangential(x, s.gradient(x)).squaredNorm());
    }
  }
  return sum;
}

}  // namespace capxray
