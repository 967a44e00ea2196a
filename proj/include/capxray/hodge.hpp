#pragma once

/// \file
/// Finite-difference divergence, gradient and Laplace-Beltrami operators on
/// a cell-centred colatitude-azimuth cap grid, the Dirichlet Poisson solve
/// and the solenoidal projection (f, alpha) -> (f + lambda s, alpha - ds).
///
/// Pole handling: the rows i = -1, -2 are the rows 0, 1 at azimuth v + pi.
/// Outer boundary: s is odd about u = arccos(height), so s = 0 there.

#include <memory>
#include <vector>

#include <Eigen/Sparse>

#include "capxray/capgeo.hpp"
#include "capxray/fields.hpp"

namespace capxray {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// Centred divergence of a tangent field given by Cartesian samples.
/// Exact (zero) on constants; outer ghosts by quadratic extrapolation.
std::vector<cplx> divergence(const CapGrid& grid, const std::vector<CVec3>& alpha);

/// Centred surface gradient of s with the Dirichlet ghost, as Cartesian
/// tangent vectors.
std::vector<CVec3> gradient(const CapGrid& grid, const std::vector<cplx>& s);

/// Compact five-point Laplace-Beltrami operator with s = 0 on the boundary.
std::vector<cplx> laplacian(const CapGrid& grid, const std::vector<cplx>& s);

/// Sparse matrices of the three operators. The divergence acts on the
/// stacked Cartesian components (3 per node, node-major).
SparseMatrix divergence_matrix(const CapGrid& grid);
SparseMatrix gradient_matrix(const CapGrid& grid);
SparseMatrix laplacian_matrix(const CapGrid& grid);

struct CapPoissonProblem {
  CapGrid grid;
  std::vector<cplx> rhs;
  std::vector<cplx> solution;
  double relative_residual = 0.0;  // ||L s - rhs|| / ||rhs||
};

/// Solves laplacian(s) = rhs with s = 0 on the boundary circle by a sparse
/// direct factorisation; fills solution and relative_residual.
/// Throws SolverError if the factorisation fails.
void dirichlet_solve(CapPoissonProblem& problem);

/// Convenience wrapper returning the solution.
std::vector<cplx> dirichlet_solve(const CapGrid& grid, const std::vector<cplx>& rhs);

struct HodgeSplit {
  FieldPair pair;              // (f + lambda s, alpha - grad s)
  std::vector<cplx> potential; // s
};

/// Weighted least-squares split alpha = grad(s) + alpha^s with s = 0 on the
/// boundary: alpha^s is orthogonal, in the area-weighted inner product, to
/// every discrete gradient, so weak_divergence(alpha^s) = 0 up to the
/// direct-solver rounding and projecting twice changes nothing. The
/// factorised normal equations are reused across pairs.
class HodgeProjector {
 public:
  explicit HodgeProjector(const CapGrid& grid);
  ~HodgeProjector();
  HodgeProjector(HodgeProjector&&) noexcept;
  HodgeProjector& operator=(HodgeProjector&&) noexcept;

  [[nodiscard]] const CapGrid& grid() const { return grid_; }
  [[nodiscard]] std::vector<cplx> potential(const std::vector<CVec3>& alpha) const;
  [[nodiscard]] HodgeSplit project(const FieldPair& pair, double lambda) const;

 private:
  struct Impl;
  CapGrid grid_;
  std::unique_ptr<Impl> impl_;
};

/// Divergence in weak form, -W^{-1} G^T W alpha, with G the gradient above
/// and W the area weights. Centred in the interior, it is the divergence
/// whose kernel the projection maps onto.
std::vector<cplx> weak_divergence(const CapGrid& grid, const std::vector<CVec3>& alpha);

/// One-shot projection on pair.grid.
FieldPair solenoidal_project(const FieldPair& pair, double lambda);

/// max_k |z_k|, and sqrt(sum w_k |z_k|^2) with the grid area weights.
double max_abs(const std::vector<cplx>& z);
double l2_norm(const CapGrid& grid, const std::vector<cplx>& z);
double l2_norm(const CapGrid& grid, const std::vector<CVec3>& z);

}  // namespace capxray
