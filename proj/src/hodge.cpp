#include "capxray/hodge.hpp"

#include <cmath>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

namespace capxray {

namespace {

using Triplet = Eigen::Triplet<double>;

int wrap(int j, int nv) { return ((j % nv) + nv) % nv; }

// Node carrying the value of row i (possibly -1 or -2) at azimuth column j.
int pole_node(const CapGrid& g, int i, int j) {
  if (i >= 0) return g.index(i, wrap(j, g.nv));
  return g.index(-i - 1, wrap(j + g.nv / 2, g.nv));
}

Eigen::VectorXd real_part(const std::vector<cplx>& z) {
  Eigen::VectorXd r(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) r(k) = z[k].real();
  return r;
}

Eigen::VectorXd imag_part(const std::vector<cplx>& z) {
  Eigen::VectorXd r(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) r(k) = z[k].imag();
  return r;
}

std::vector<cplx> combine(const Eigen::VectorXd& re, const Eigen::VectorXd& im) {
  std::vector<cplx> z(re.size());
  for (Eigen::Index k = 0; k < re.size(); ++k) z[k] = {re(k), im(k)};
  return z;
}

std::vector<cplx> apply_op(const SparseMatrix& m, const std::vector<cplx>& z) {
  return combine(m * real_part(z), m * imag_part(z));
}

std::vector<cplx> stack(const std::vector<CVec3>& a) {
  std::vector<cplx> z(3 * a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (int c = 0; c < 3; ++c) z[3 * k + c] = a[k](c);
  }
  return z;
}

std::vector<CVec3> unstack(const std::vector<cplx>& z) {
  std::vector<CVec3> a(z.size() / 3);
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = CVec3(z[3 * k], z[3 * k + 1], z[3 * k + 2]);
  return a;
}

template <class Solver>
std::vector<cplx> solve_split(const Solver& lu, const std::vector<cplx>& rhs) {
  const Eigen::VectorXd re = lu.solve(real_part(rhs));
  const Eigen::VectorXd im = lu.solve(imag_part(rhs));
  return combine(re, im);
}

}  // namespace

SparseMatrix gradient_matrix(const CapGrid& g) {
  g.validate();
  const double hu = g.du(), hv = g.dv();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.size()) * 12);
  for (int i = 0; i < g.nu; ++i) {
    const double u = g.u(i);
    for (int j = 0; j < g.nv; ++j) {
      const double v = g.v(j);
      const int row = 3 * g.index(i, j);
      const Vec3 eu = colatitude_tangent(u, v);
      const Vec3 ev = azimuth_tangent(v);
      auto add = [&](int node, const Vec3& dir, double c) {
        for (int k = 0; k < 3; ++k) t.emplace_back(row + k, node, c * dir(k));
      };
      // d/du
      if (i + 1 < g.nu) {
        add(g.index(i + 1, j), eu, 1.0 / (2.0 * hu));
      } else {
        add(g.index(g.nu - 1, j), eu, -1.0 / (2.0 * hu));
      }
      add(pole_node(g, i - 1, j), eu, -1.0 / (2.0 * hu));
      // (1/sin u) d/dv
      const double cv = 1.0 / (2.0 * hv * std::sin(u));
      add(g.index(i, wrap(j + 1, g.nv)), ev, cv);
      add(g.index(i, wrap(j - 1, g.nv)), ev, -cv);
    }
  }
  SparseMatrix m(3 * g.size(), g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix divergence_matrix(const CapGrid& g) {
  g.validate();
  const double hu = g.du(), hv = g.dv();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.size()) * 30);
  for (int i = 0; i < g.nu; ++i) {
    const double u = g.u(i);
    const double su = std::sin(u);
    for (int j = 0; j < g.nv; ++j) {
      const double v = g.v(j);
      const int row = g.index(i, j);
      // q_m = sin(u_m) alpha(node of row m) . e_u(u_m, v_j), with signed u_m
      // for the reflected pole rows.
      auto add_q = [&](int m, double c) {
        const double um = (m + 0.5) * hu;
        const Vec3 eu = colatitude_tangent(um, v);
        const int node = pole_node(g, m, j);
        for (int k = 0; k < 3; ++k) t.emplace_back(row, 3 * node + k, c * std::sin(um) * eu(k));
      };
      const double cu = 1.0 / (2.0 * hu * su);
      if (i + 1 < g.nu) {
        add_q(i + 1, cu);
      } else {
        add_q(g.nu - 1, 3.0 * cu);
        add_q(g.nu - 2, -3.0 * cu);
        add_q(g.nu - 3, cu);
      }
      add_q(i - 1, -cu);
      const double cv = 1.0 / (2.0 * hv * su);
      for (int s : {+1, -1}) {
        const int jj = wrap(j + s, g.nv);
        const Vec3 ev = azimuth_tangent(g.v(jj));
        for (int k = 0; k < 3; ++k) t.emplace_back(row, 3 * g.index(i, jj) + k, s * cv * ev(k));
      }
    }
  }
  SparseMatrix m(g.size(), 3 * g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

SparseMatrix laplacian_matrix(const CapGrid& g) {
  g.validate();
  const double hu = g.du(), hv = g.dv();
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(g.size()) * 5);
  for (int i = 0; i < g.nu; ++i) {
    const double u = g.u(i);
    const double su = std::sin(u);
    const double up = std::sin(u + 0.5 * hu) / (su * hu * hu);
    const double dn = std::sin(u - 0.5 * hu) / (su * hu * hu);
    const double cv = 1.0 / (hv * hv * su * su);
    for (int j = 0; j < g.nv; ++j) {
      const int row = g.index(i, j);
      double diag = -up - dn - 2.0 * cv;
      if (i + 1 < g.nu) {
        t.emplace_back(row, g.index(i + 1, j), up);
      } else {
        diag -= up;  // ghost value -s
      }
      if (i > 0) t.emplace_back(row, g.index(i - 1, j), dn);
      t.emplace_back(row, g.index(i, wrap(j + 1, g.nv)), cv);
      t.emplace_back(row, g.index(i, wrap(j - 1, g.nv)), cv);
      t.emplace_back(row, row, diag);
    }
  }
  SparseMatrix m(g.size(), g.size());
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::vector<cplx> divergence(const CapGrid& grid, const std::vector<CVec3>& alpha) {
  if (static_cast<int>(alpha.size()) != grid.size()) throw ShapeError("divergence: size mismatch");
  return apply_op(divergence_matrix(grid), stack(alpha));
}

std::vector<CVec3> gradient(const CapGrid& grid, const std::vector<cplx>& s) {
  if (static_cast<int>(s.size()) != grid.size()) throw ShapeError("gradient: size mismatch");
  return unstack(apply_op(gradient_matrix(grid), s));
}

std::vector<cplx> laplacian(const CapGrid& grid, const std::vector<cplx>& s) {
  if (static_cast<int>(s.size()) != grid.size()) throw ShapeError("laplacian: size mismatch");
  return apply_op(laplacian_matrix(grid), s);
}

void dirichlet_solve(CapPoissonProblem& p) {
  if (static_cast<int>(p.rhs.size()) != p.grid.size()) {
    throw ShapeError("dirichlet_solve: rhs does not match the grid");
  }
  const SparseMatrix L = laplacian_matrix(p.grid);
  Eigen::SparseLU<SparseMatrix> lu;
  lu.compute(L);
  if (lu.info() != Eigen::Success) throw SolverError("dirichlet_solve: factorisation failed");
  p.solution = solve_split(lu, p.rhs);
  const auto r = apply_op(L, p.solution);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < r.size(); ++k) {
    num += std::norm(r[k] - p.rhs[k]);
    den += std::norm(p.rhs[k]);
  }
  p.relative_residual = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

std::vector<cplx> dirichlet_solve(const CapGrid& grid, const std::vector<cplx>& rhs) {
  CapPoissonProblem p{grid, rhs, {}, 0.0};
  dirichlet_solve(p);
  return p.solution;
}

struct HodgeProjector::Impl {
  SparseMatrix G;
  SparseMatrix GtW;  // G^T W with W the area weight of each alpha node
  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

HodgeProjector::HodgeProjector(const CapGrid& grid) : grid_(grid), impl_(std::make_unique<Impl>()) {
  impl_->G = gradient_matrix(grid);
  Eigen::VectorXd w(3 * grid.size());
  for (int k = 0; k < grid.size(); ++k) w.segment<3>(3 * k).setConstant(grid.area_weight(k / grid.nv));
  impl_->GtW = SparseMatrix(impl_->G.transpose()) * w.asDiagonal();
  const SparseMatrix N = impl_->GtW * impl_->G;
  impl_->ldlt.compute(N);
  if (impl_->ldlt.info() != Eigen::Success) {
    throw SolverError("HodgeProjector: factorisation of the gradient normal equations failed");
  }
}

HodgeProjector::~HodgeProjector() = default;
HodgeProjector::HodgeProjector(HodgeProjector&&) noexcept = default;
HodgeProjector& HodgeProjector::operator=(HodgeProjector&&) noexcept = default;

std::vector<cplx> HodgeProjector::potential(const std::vector<CVec3>& alpha) const {
  if (static_cast<int>(alpha.size()) != grid_.size()) throw ShapeError("HodgeProjector: size mismatch");
  return solve_split(impl_->ldlt, apply_op(impl_->GtW, stack(alpha)));
}

HodgeSplit HodgeProjector::project(const FieldPair& pair, double lambda) const {
  if (!(pair.grid == grid_)) throw ShapeError("HodgeProjector: pair lives on another grid");
  HodgeSplit out{pair, potential(pair.alpha)};
  const auto grad = unstack(apply_op(impl_->G, out.potential));
  for (int k = 0; k < grid_.size(); ++k) {
    out.pair.f[k] += lambda * out.potential[k];
    out.pair.alpha[k] -= grad[k];
  }
  return out;
}

std::vector<cplx> weak_divergence(const CapGrid& grid, const std::vector<CVec3>& alpha) {
  if (static_cast<int>(alpha.size()) != grid.size()) throw ShapeError("weak_divergence: size mismatch");
  const SparseMatrix G = gradient_matrix(grid);
  std::vector<cplx> a = stack(alpha);
  for (int k = 0; k < grid.size(); ++k) {
    const double w = grid.area_weight(k / grid.nv);
    for (int c = 0; c < 3; ++c) a[3 * k + c] *= w;
  }
  auto d = apply_op(SparseMatrix(G.transpose()), a);
  for (int k = 0; k < grid.size(); ++k) d[k] /= -grid.area_weight(k / grid.nv);
  return d;
}

FieldPair solenoidal_project(const FieldPair& pair, double lambda) {
  return HodgeProjector(pair.grid).project(pair, lambda).pair;
}

double max_abs(const std::vector<cplx>& z) {
  double m = 0.0;
  for (const auto& v : z) m = std::max(m, std::abs(v));
  return m;
}

double l2_norm(const CapGrid& grid, const std::vector<cplx>& z) {
  double s = 0.0;
  for (int k = 0; k < grid.size(); ++k) s += grid.area_weight(k / grid.nv) * std::norm(z[k]);
  return std::sqrt(s);
}

double l2_norm(const CapGrid& grid, const std::vector<CVec3>& z) {
  double s = 0.0;
  for (int k = 0; k < grid.size(); ++k) s += grid.area_weight(k / grid.nv) * z[k].squaredNorm();
  return std::sqrt(s);
}

}  // namespace capxray
