#pragma once

/// \file
/// Magnetic potentials as closed-form bump sums, their pullbacks to the
/// geodesic coordinates (t, theta) of a boundary point, the transport
/// amplitude built from the Cauchy transform, the moment transforms
/// f_lambda, alpha_lambda and their dlog fields, the energy identity for
/// ||dA||^2 and the normalising disk map of a ray's plane.

#include <vector>

#include "capxray/capgeo.hpp"
#include "capxray/dbar.hpp"
#include "capxray/fields.hpp"

namespace capxray {

struct PotentialTerm {
  enum class Kind { directed, gradient };
  Kind kind = Kind::directed;
  Bump bump;
  CVec3 direction = CVec3::Zero();  // directed terms only
};

/// A(x) = sum of direction * bump(x) (directed) and grad bump(x) (gradient).
class VectorPotential {
 public:
  VectorPotential() = default;
  explicit VectorPotential(std::vector<PotentialTerm> terms, double sigma = 0.25);

  [[nodiscard]] CVec3 value(const Vec3& x) const;
  /// J(j, k) = d_k A_j.
  [[nodiscard]] CMat3 jacobian(const Vec3& x) const;

  [[nodiscard]] const std::vector<PotentialTerm>& terms() const { return terms_; }
  [[nodiscard]] double smoothness_sigma() const { return sigma_; }
  [[nodiscard]] bool empty() const { return terms_.empty(); }
  [[nodiscard]] VectorPotential scaled(cplx s) const;

  /// Throws ValidationError unless sigma lies in (0, 1/2) and radii are positive.
  void validate() const;
  /// Throws PreconditionError unless every support ball avoids the origin
  /// and lies in the cone over S_{>height}.
  void check_cone(double height) const;
  /// max |log|x|| over the support balls.
  [[nodiscard]] double log_radius_extent() const;

 private:
  std::vector<PotentialTerm> terms_;
  double sigma_ = 0.25;
};

/// Fixed three-term family (two directed terms, one gradient term) whose
/// supports lie in the cone over S_{>0.6}; gradient_only keeps the last term.
VectorPotential sample_potential(bool gradient_only = false);

/// Rectangle [t0,t1] x [theta0,theta1] of the z = t + i theta plane.
struct ChartRect {
  int n = 256;
  double t0 = -0.5, t1 = 0.5;
  double theta0 = 0.5, theta1 = 1.5;
};

/// Smallest rectangle containing the support of theta, t -> A(e^t gamma(theta)),
/// widened by pad_fraction of its size on every side and clipped to the
/// chart ranges.
ChartRect support_rect(const VectorPotential& A, const GeodesicChart& chart, const Vec3& eta,
                       int n, double pad_fraction = 0.15);

struct PulledBackPotential {
  Vec3 eta;
  ComplexField W_t;
  ComplexField W_theta;
};

/// Samples W_t = e^t A(e^t gamma) . gamma and W_theta = e^t A(e^t gamma) . gamma'
/// at the cell centres of rect. Throws PreconditionError if the samples on
/// the border cells do not vanish or the rectangle leaves the chart range.
PulledBackPotential pull_back(const VectorPotential& A, const GeodesicChart& chart,
                              const Vec3& eta, const ChartRect& rect);

/// Holomorphic factor a0(z).
struct HolomorphicFactor {
  enum class Kind { constant, exp_linear, power, coefficients };
  Kind kind = Kind::constant;
  double lambda = 0.0;       // exp_linear: e^{i lambda z}
  int power = 0;             // power: z^k
  std::vector<cplx> coeffs;  // coefficients: sum c_k z^k

  [[nodiscard]] cplx value(cplx z) const;
  [[nodiscard]] cplx derivative(cplx z) const;
};

struct Amplitude {
  HolomorphicFactor a0;
  ComplexField phi;     // Phi = -(i/2) C(W_t + i W_theta)
  ComplexField values;  // e^{-t/2} (sin theta)^{-1/2} e^Phi a0
};

Amplitude build_amplitude(const PulledBackPotential& pb, const HolomorphicFactor& a0);

/// ||[d_zbar + (1 + i cot theta)/4 + (i/2)(W_t + i W_theta)] a|| / ||a|| on
/// interior cells, derivatives by central differences.
double transport_residual(const PulledBackPotential& pb, const Amplitude& amp, int margin = 2);

/// ||a||_{W^{1,inf}} / (exp(||Phi||_inf) ||a0||_{W^{1,inf}}) on the grid.
double amplitude_bound_ratio(const Amplitude& amp);

struct Moments {
  cplx f{};
  CVec3 alpha = CVec3::Zero();
};

/// f_lambda(w) = int e^{i lambda t} e^t w . A(e^t w) dt and
/// alpha_lambda(w) = i int e^{i lambda t} e^t A(e^t w) dt (ambient components).
Moments moments_at(const VectorPotential& A, double lambda, const Vec3& w, int nodes = 96);

struct MomentFields {
  CapGrid grid;
  std::vector<cplx> f;
  std::vector<CVec3> alpha;  // tangential parts
};
MomentFields moment_transform(const VectorPotential& A, double lambda, const CapGrid& grid,
                              int nodes = 96);

struct DlogAt {
  CVec3 upsilon = CVec3::Zero();  // int e^{i lambda t} e^{2t} (J^T w - J w) dt
  CMat3 varrho = CMat3::Zero();   // int e^{i lambda t} e^{2t} (J - J^T) dt
};
DlogAt dlog_at(const VectorPotential& A, double lambda, const Vec3& w, int nodes = 96);

struct DlogFields {
  CapGrid grid;
  std::vector<CVec3> upsilon;
  std::vector<CMat3> varrho;
};
DlogFields dlog_fields(const VectorPotential& A, double lambda, const CapGrid& grid,
                       int nodes = 96);

struct TwoPathReport {
  double max_abs_diff = 0.0;
  double max_ref = 0.0;
  [[nodiscard]] double relative() const { return max_ref > 0.0 ? max_abs_diff / max_ref : max_abs_diff; }
};

/// Compares d f_lambda(e) + lambda alpha_lambda(e), with the derivative by a
/// central great-circle difference of the given step, against upsilon(e),
/// for the two coordinate tangents e at each point.
TwoPathReport two_path_check(const VectorPotential& A, double lambda,
                             const std::vector<Vec3>& points, double step = 1e-3,
                             int nodes = 96);

struct EnergyOptions {
  int box_cells = 96;
  int cap_nu = 128;
  int cap_nv = 256;
  int t_nodes = 48;
  double cap_height = 0.6;
};

struct EnergyResult {
  double cartesian = 0.0;
  double polar = 0.0;
  [[nodiscard]] double relative_gap() const;
};

/// sum_{j,k} int |d_j A_k - d_k A_j|^2 dx by a midpoint box rule and by the
/// polar form int int |.|^2(e^t w) e^{3t} dt dw over the cap.
EnergyResult energy_identity(const VectorPotential& A, const EnergyOptions& opt = {});

/// y0 = (R0 + beta') e_n with R0 = 2/beta', and the bound S.
struct DiskMap {
  double beta_prime = 0.5;
  double R0 = 4.0;
  Vec3 y0{0.0, 0.0, 4.5};
  double S_bound = 36.25;

  explicit DiskMap(const SphericalCap& cap);

  /// R_{y,eta}; (y, eta) orthonormal with y_n = beta'. Throws DomainError if
  /// the plane misses the ball B_{R0}(y0).
  [[nodiscard]] double radius(const Vec3& y, const Vec3& eta) const;
  [[nodiscard]] cplx center(const Vec3& y, const Vec3& eta) const;
  /// (e^z - center) / R.
  [[nodiscard]] cplx apply(const Vec3& y, const Vec3& eta, cplx z) const;
};

double disk_bound_S(double beta_prime);

}  // namespace capxray
