#pragma once

/// \file
/// Analytic fields (closed-form bump combinations with exact derivatives)
/// and gridded field pairs (f, alpha) on a cap grid.

#include <array>
#include <functional>
#include <memory>
#include <vector>

#include "capxray/capgeo.hpp"
#include "capxray/types.hpp"

namespace capxray {

/// Complex polynomial in the three Cartesian coordinates, stored as a list
/// of monomials coef * x^a y^b z^c.
struct Polynomial {
  struct Monomial {
    cplx coef{1.0, 0.0};
    std::array<int, 3> powers{0, 0, 0};
  };
  std::vector<Monomial> terms;

  static Polynomial constant(cplx c);
  /// The affine polynomial c0 + g . x.
  static Polynomial affine(cplx c0, const CVec3& g);

  [[nodiscard]] cplx value(const Vec3& x) const;
  [[nodiscard]] CVec3 gradient(const Vec3& x) const;
  [[nodiscard]] CMat3 hessian(const Vec3& x) const;
};

/// p(x) exp(-1/(1 - |x - c|^2 / r^2)) for |x - c| < r and 0 outside.
struct Bump {
  Vec3 center = Vec3::Zero();
  double radius = 1.0;
  Polynomial poly = Polynomial::constant(1.0);

  [[nodiscard]] bool contains(const Vec3& x) const;
  [[nodiscard]] cplx value(const Vec3& x) const;
  [[nodiscard]] CVec3 gradient(const Vec3& x) const;
  [[nodiscard]] CMat3 hessian(const Vec3& x) const;
};

/// Scalar field on R^3 with analytic first and second derivatives.
class ScalarField {
 public:
  virtual ~ScalarField() = default;
  [[nodiscard]] virtual cplx value(const Vec3& x) const = 0;
  [[nodiscard]] virtual CVec3 gradient(const Vec3& x) const = 0;
  [[nodiscard]] virtual CMat3 hessian(const Vec3& x) const = 0;
};

/// Sum of bumps plus a global polynomial.
class BumpSum final : public ScalarField {
 public:
  BumpSum() = default;
  explicit BumpSum(std::vector<Bump> bumps, Polynomial background = {});

  [[nodiscard]] cplx value(const Vec3& x) const override;
  [[nodiscard]] CVec3 gradient(const Vec3& x) const override;
  [[nodiscard]] CMat3 hessian(const Vec3& x) const override;

  [[nodiscard]] const std::vector<Bump>& bumps() const { return bumps_; }

 private:
  std::vector<Bump> bumps_;
  Polynomial background_;
};

/// (x_n - level) * inner(x). Vanishes on the plane x_n = level, so on the
/// sphere it vanishes on the boundary circle of the cap of that height.
class CapVanishingField final : public ScalarField {
 public:
  CapVanishingField(double level, std::shared_ptr<const ScalarField> inner);

  [[nodiscard]] cplx value(const Vec3& x) const override;
  [[nodiscard]] CVec3 gradient(const Vec3& x) const override;
  [[nodiscard]] CMat3 hessian(const Vec3& x) const override;

  [[nodiscard]] double level() const { return level_; }

 private:
  double level_;
  std::shared_ptr<const ScalarField> inner_;
};

/// Pair (f, alpha) given by callables. alpha returns an ambient covector;
/// only its tangential part at x is used.
struct PairFunction {
  std::function<cplx(const Vec3&)> f;
  std::function<CVec3(const Vec3&)> alpha;

  [[nodiscard]] cplx eval_f(const Vec3& x) const { return f ? f(x) : cplx{}; }
  [[nodiscard]] CVec3 eval_alpha(const Vec3& x) const {
    return alpha ? tangential(x, alpha(x)) : CVec3::Zero().eval();
  }
};

/// Scalar f and tangent 1-form alpha sampled on a cap grid. alpha is stored
/// as Cartesian tangent vectors, one per node.
struct FieldPair {
  CapGrid grid;
  std::vector<cplx> f;
  std::vector<CVec3> alpha;

  FieldPair() = default;
  explicit FieldPair(const CapGrid& g);

  static FieldPair sample(const CapGrid& g, const PairFunction& pair);

  /// Throws ShapeError on size mismatch and ValidationError when some alpha
  /// sample is not tangent to 1e-10 (relative to the largest |alpha|).
  void validate() const;

  FieldPair& operator+=(const FieldPair& other);
  FieldPair& operator*=(cplx s);
  [[nodiscard]] FieldPair operator-(const FieldPair& other) const;
};

/// L^2 inner product on the unit tangent bundle of the cap:
/// int (2 pi f conj(g) + pi alpha . conj(beta)) dx, by the grid's area weights.
cplx pair_inner(const FieldPair& a, const FieldPair& b);
double pair_norm(const FieldPair& a);

/// The same norm for an analytic pair, integrated on the given grid.
double pair_norm(const PairFunction& pair, const CapGrid& grid);

/// Integral of |s|^2 + |d_S s|^2 over the grid's cap (squared H^1 norm).
double h1_norm_squared(const ScalarField& s, const CapGrid& grid);

}  // namespace capxray
