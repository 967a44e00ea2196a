#pragma once

/// \file
/// The attenuated geodesic ray transform on the cap S_{>beta'} with data
/// supported in S_{>beta}, its discrete adjoint, the Santalo quadrature
/// check and the continuity and injectivity probes.

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "capxray/capgeo.hpp"
#include "capxray/fields.hpp"

namespace capxray {

struct TransformOptions {
  int quad_nodes = 96;  // nodes on a chord of length 2 arccos(beta')
  int min_nodes = 32;
  int jobs = 1;
};

/// Gauss-Legendre node count for a chord of the given length.
int nodes_for_length(const SphericalCap& cap, double length, const TransformOptions& opt);

/// T_lambda H sampled on a boundary-ray grid.
struct Sinogram {
  RayGrid grid;
  double lambda = 0.0;
  std::vector<cplx> values;

  Sinogram() = default;
  Sinogram(const RayGrid& g, double lam);

  /// Weighted L^2 norm sqrt(sum_r mu_r |v_r|^2).
  [[nodiscard]] double norm() const;
};

/// <a, b>_mu = sum_r mu_r a_r conj(b_r).
cplx sinogram_inner(const Sinogram& a, const Sinogram& b);

/// Transform of an analytic pair. Integrals run over the part of each
/// geodesic inside S_{>beta}, which is the transform of the pair extended
/// by zero outside that cap.
Sinogram transform(const RayGrid& rays, const PairFunction& pair, double lambda,
                   const TransformOptions& opt = {});

/// Same, with the integrals over the part of each geodesic above x_n = level,
/// beta' <= level <= beta. level = beta' integrates over the whole chord.
Sinogram transform_above(const RayGrid& rays, const PairFunction& pair, double lambda,
                         double level, const TransformOptions& opt = {});

/// Transform of gridded data, interpolated by cubic convolution in
/// (colatitude, azimuth). Throws PreconditionError when samples outside
/// S_{>beta} do not vanish.
Sinogram transform(const RayGrid& rays, const FieldPair& pair, double lambda,
                   const TransformOptions& opt = {});

/// Exact transpose of the gridded transform with respect to <.,.>_mu and
/// pair_inner. Throws ShapeError if grid does not cover S_{>beta}.
FieldPair adjoint(const Sinogram& sino, const CapGrid& grid, const TransformOptions& opt = {});

/// (-lambda s, d_S s) for s vanishing on {x_n = beta}. Throws
/// PreconditionError when the boundary trace of s exceeds 1e-10.
PairFunction kernel_element(const SphericalCap& cap, std::shared_ptr<const ScalarField> s,
                            double lambda);

struct SantaloResult {
  double lhs = 0.0;
  double rhs = 0.0;
  [[nodiscard]] double relative_error() const;
};

/// lhs: midpoint quadrature of F over S_{>beta'} on outer_grid (which must
/// have height beta'). rhs: (1/2pi) sum_r mu_r int_0^tau F(gamma) dtheta.
SantaloResult santalo_check(const RayGrid& rays, const CapGrid& outer_grid,
                            const std::function<double(const Vec3&)>& F,
                            const TransformOptions& opt = {});

struct ContinuityReport {
  double max_ratio = 0.0;  // max ||T H||^2 / ||H||^2
  double bound = 0.0;      // pi exp(2 |lambda| pi)
  int trials = 0;
};

/// Random smooth pairs supported in S_{>beta} (seeded), integrated on grid.
ContinuityReport continuity_constant(const RayGrid& rays, const CapGrid& grid, double lambda,
                                     int trials, std::uint64_t seed,
                                     const TransformOptions& opt = {});

/// Random bump sum with `count` terms centred on the cap {x_n > height}
/// whose supports stay inside that cap.
BumpSum random_cap_bumps(std::uint64_t seed, double height, int count);

/// Random pair supported in S_{>beta}: f and alpha built from random bumps.
PairFunction random_pair(std::uint64_t seed, double height);

// ---------------------------------------------------------------------------
// Injectivity probe

enum class ProbeMode { function_only, solenoidal_pair, raw_pair };

ProbeMode parse_probe_mode(const std::string& s);
std::string to_string(ProbeMode m);

struct ProbeOptions {
  ProbeMode mode = ProbeMode::solenoidal_pair;
  int rings = 4;
  int max_mode = 7;
  /// Level-0 grids; level l doubles every count.
  int cap_nu = 64;
  int cap_nv = 128;
  int n_psi = 128;
  int n_a = 64;
  int quad_nodes = 96;
  int levels = 2;
  /// raw_pair only: append the kernel pair (-lambda s, ds) to the basis.
  bool plant_kernel = false;
  int jobs = 1;
  /// solenoidal_pair: Gram eigenvalues below gram_cutoff * largest are
  /// discarded before the basis is orthonormalised. Other modes only drop
  /// eigenvalues below 1e-12 * largest.
  double gram_cutoff = 1e-2;
  int report_count = 5;
};

struct ProbeLevel {
  int level = 0;
  std::vector<double> sigma_min;                 // per lambda
  std::vector<std::vector<double>> smallest;     // per lambda, ascending
  int basis_size = 0;
  int retained_rank = 0;
};

struct ProbeReport {
  ProbeMode mode = ProbeMode::solenoidal_pair;
  std::vector<double> lambdas;
  std::vector<ProbeLevel> levels;

  /// sigma_min(last level) / sigma_min(level 0) per lambda.
  [[nodiscard]] std::vector<double> refinement_ratio() const;
};

/// Number of scalar basis functions rings * (2 max_mode + 1).
int probe_scalar_count(const ProbeOptions& opt);

/// Scalar basis function `index` at x: cos^2 ring profile in colatitude
/// (ring k centred at (k + 1) U / (rings + 1), half width U / (rings + 1),
/// U the inner colatitude) times 1, Re or Im of ((x_1 + i x_2) / sin c)^m.
double probe_scalar(const SphericalCap& cap, const ProbeOptions& opt, int index, const Vec3& x);

/// Assembles the transform on the basis and reports the smallest singular
/// values of T restricted to span(basis), measured against the pair norm.
/// Throws ValidationError for an empty lambda list or lambda outside [0, 1].
ProbeReport injectivity_probe(const SphericalCap& cap, const std::vector<double>& lambdas,
                              const ProbeOptions& opt);

}  // namespace capxray
