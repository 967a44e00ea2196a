#pragma once

/// \file
/// Cauchy transform CG(z) = (1/pi) int G(xi) / (z - xi) dA(xi), so that
/// d_zbar CG = G, and Beurling transform
/// SG(z) = -(1/pi) p.v. int G(xi) / (z - xi)^2 dA(xi) = d_z CG.
///
/// Fields live on cell-centred rectangular grids. Both transforms subtract
/// G(z) times the kernel integrated exactly over the grid rectangle, so
/// the remaining discrete sum has a bounded integrand.

#include <functional>
#include <vector>

#include "capxray/types.hpp"

namespace capxray {

struct ComplexField {
  int nx = 0;
  int ny = 0;
  double x0 = 0.0, x1 = 1.0;  // real extent [t0, t1]
  double y0 = 0.0, y1 = 1.0;  // imaginary extent [theta0, theta1]
  cplx support_center{};
  double support_radius = 0.0;
  std::vector<cplx> values;  // values[iy * nx + ix]

  ComplexField() = default;
  ComplexField(int nx_, int ny_, double x0_, double x1_, double y0_, double y1_,
               cplx center, double radius);

  /// Square grid of n x n cells over the box centred at `center` with half
  /// side `half_side`.
  static ComplexField square(int n, cplx center, double half_side, double support_radius);

  [[nodiscard]] double hx() const { return (x1 - x0) / nx; }
  [[nodiscard]] double hy() const { return (y1 - y0) / ny; }
  [[nodiscard]] int index(int ix, int iy) const { return iy * nx + ix; }
  [[nodiscard]] cplx point(int ix, int iy) const {
    return {x0 + (ix + 0.5) * hx(), y0 + (iy + 0.5) * hy()};
  }
  [[nodiscard]] cplx& operator()(int ix, int iy) { return values[index(ix, iy)]; }
  [[nodiscard]] const cplx& operator()(int ix, int iy) const { return values[index(ix, iy)]; }
  [[nodiscard]] bool same_grid(const ComplexField& o) const;
  [[nodiscard]] bool contains(cplx z) const;

  /// Bilinear interpolation of the cell-centred samples (zero outside).
  [[nodiscard]] cplx interpolate(cplx z) const;

  /// Throws ValidationError for bad sizes/extent and PreconditionError when
  /// a sample outside the support disk exceeds 1e-12 max(1, max|G|).
  void validate() const;

  /// Fills values with g at cell centres, or with the average over
  /// supersample^2 sub-cell midpoints.
  void fill(const std::function<cplx(cplx)>& g, int supersample = 1);

  /// sqrt(sum |v|^2 hx hy).
  [[nodiscard]] double l2_norm() const;
  [[nodiscard]] double max_abs() const;
};

/// Exact integral of 1/w over the rectangle [a0, a1] x [b0, b1] (w = a + ib).
cplx rect_integral_inv(double a0, double a1, double b0, double b1);
/// Principal value of the integral of 1/w^2 over the rectangle, with the
/// symmetric square around w = 0 removed in the limit.
cplx rect_pv_integral_inv2(double a0, double a1, double b0, double b1);

/// CG at arbitrary points. Points inside the grid use the subtracted form
/// with G(z) interpolated; points outside use the plain sum.
std::vector<cplx> cauchy_transform(const ComplexField& G, const std::vector<cplx>& points);

/// CG at every cell centre (FFT convolution).
ComplexField cauchy_transform(const ComplexField& G);

/// SG at every cell centre (FFT convolution).
ComplexField beurling_transform(const ComplexField& G);

/// Returns CG on the grid of G; solves d_zbar u = G.
ComplexField solve_dbar(const ComplexField& G);

/// Finite-difference d_zbar and d_z: fourth-order central differences,
/// second order on the ring next to the border, border cells 0.
ComplexField dbar_fd(const ComplexField& u);
ComplexField dz_fd(const ComplexField& u);

/// ||d_zbar u - G|| / ||G|| over interior cells (at least `margin` cells
/// from the border).
double dbar_residual(const ComplexField& u, const ComplexField& G, int margin = 1);

/// max over interior cells of |d_z CG - SG| / max |SG|.
double beurling_consistency(const ComplexField& CG, const ComplexField& SG, int margin = 2);

struct IsometryReport {
  double norm_G = 0.0;
  double norm_SG = 0.0;
  double tail = 0.0;  // analytic contribution outside the padded box
  [[nodiscard]] double defect() const;
};

/// ||SG||_2 versus ||G||_2: SG is computed on the grid zero-padded to
/// `pad` times its size; outside that square the monopole term
/// -M0 / (pi (z - c)^2) is integrated in closed form.
IsometryReport beurling_isometry(const ComplexField& G, int pad = 3);

struct HolderReport {
  int k = 0;
  double gamma = 0.5;
  std::vector<double> ratios;  // ||CG||_{W^{k,inf}} / ||G||_{W^{k,inf}} per field
  std::vector<double> holder_ratios;  // [d^k CG]_gamma / [d^k G]_gamma per field
  double max_ratio = 0.0;
};

/// W^{k,inf} norm (k = 0 or 1) of cell samples, derivatives by central
/// differences on interior cells.
double wk_inf_norm(const ComplexField& u, int k);

/// Empirical constant of the Cauchy transform over a family of fields.
/// A zero field contributes ratio 0. Throws ParameterError unless k is 0 or
/// 1 and gamma lies in (0, 1).
HolderReport holder_bound_check(const std::vector<ComplexField>& family, int k, double gamma);

/// Radial Gaussian exp(-|z - c|^2 / (2 s^2)) cut to zero at |z - c| >= R,
/// with s = R / 8, on the default square grid 1.2 R.
ComplexField gaussian_bump(cplx center, double R, int n = 256);

}  // namespace capxray
