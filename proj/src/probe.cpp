#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "capxray/hodge.hpp"
#include "capxray/parallel.hpp"
#include "capxray/xray.hpp"
#include "ray_sampling.hpp"

namespace capxray {

ProbeMode parse_probe_mode(const std::string& s) {
  if (s == "function_only") return ProbeMode::function_only;
  if (s == "solenoidal_pair") return ProbeMode::solenoidal_pair;
  if (s == "raw_pair") return ProbeMode::raw_pair;
  throw ValidationError("unknown probe mode '" + s + "'");
}

std::string to_string(ProbeMode m) {
  switch (m) {
    case ProbeMode::function_only: return "function_only";
    case ProbeMode::solenoidal_pair: return "solenoidal_pair";
    case ProbeMode::raw_pair: return "raw_pair";
  }
  return "unknown";
}

std::vector<double> ProbeReport::refinement_ratio() const {
  std::vector<double> r;
  if (levels.empty()) return r;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    r.push_back(levels.back().sigma_min[l] / levels.front().sigma_min[l]);
  }
  return r;
}

int probe_scalar_count(const ProbeOptions& opt) { return opt.rings * (2 * opt.max_mode + 1); }

double probe_scalar(const SphericalCap& cap, const ProbeOptions& opt, int index, const Vec3& x) {
  const int per_ring = 2 * opt.max_mode + 1;
  const int ring = index / per_ring;
  const int slot = index % per_ring;
  const double U = cap.inner_colatitude();
  const double d = U / (opt.rings + 1);
  const double c = (ring + 1) * d;
  const double u = std::acos(std::clamp(x(2), -1.0, 1.0));
  if (std::abs(u - c) >= d) return 0.0;
  const double p = std::cos(0.5 * kPi * (u - c) / d);
  // Re/Im (x + iy)^m / sin(c)^m: smooth at the pole, unlike cos(m v).
  const int m = (slot + 1) / 2;
  const std::complex<double> w = std::pow(std::complex<double>(x(0), x(1)) / std::sin(c), m);
  const double az = (slot == 0) ? 1.0 : (slot % 2 == 1 ? w.real() : w.imag());
  return p * p * az;
}

namespace {

// Basis element E(lambda) = P0 + lambda P1, stored node-major on a grid.
struct ElementData {
  int nb = 0;
  CapGrid grid;
  std::vector<cplx> f0, f1;
  std::vector<CVec3> a0, a1;

  void resize(const CapGrid& g, int n) {
    grid = g;
    nb = n;
    f0.assign(static_cast<std::size_t>(g.size()) * n, cplx{});
    f1 = f0;
    a0.assign(f0.size(), CVec3::Zero());
    a1 = a0;
  }
  [[nodiscard]] std::size_t at(int node, int n) const {
    return static_cast<std::size_t>(node) * nb + n;
  }
};

// Per-node samples (s0, s1) of f + alpha(xdot) for each element.
using Sampler = std::function<void(const Vec3& x, const Vec3& xdot, std::vector<cplx>& s0,
                                   std::vector<cplx>& s1)>;

Eigen::MatrixXcd weighted_stack(const ElementData& e, bool second) {
  const CapGrid& g = e.grid;
  Eigen::MatrixXcd X(4 * g.size(), e.nb);
  for (int k = 0; k < g.size(); ++k) {
    const double A = g.area_weight(k / g.nv);
    const double wf = std::sqrt(kTwoPi * A), wa = std::sqrt(kPi * A);
    for (int n = 0; n < e.nb; ++n) {
      const auto i = e.at(k, n);
      X(4 * k, n) = wf * (second ? e.f1[i] : e.f0[i]);
      const CVec3& a = second ? e.a1[i] : e.a0[i];
      for (int c = 0; c < 3; ++c) X(4 * k + 1 + c, n) = wa * a(c);
    }
  }
  return X;
}

std::shared_ptr<const ScalarField> planted_potential(const SphericalCap& cap) {
  Polynomial p = Polynomial::affine(1.0, CVec3(0.5, -0.25, 0.0));
  return std::make_shared<CapVanishingField>(cap.height,
                                             std::make_shared<BumpSum>(std::vector<Bump>{}, p));
}

ProbeLevel run_level(const SphericalCap& cap, const std::vector<double>& lambdas,
                     const ProbeOptions& opt, int level) {
  const int scale = 1 << level;
  const CapGrid grid(cap.height, opt.cap_nu * scale, opt.cap_nv * scale);
  const RayGrid rays(cap, opt.n_psi * scale, opt.n_a * scale);
  TransformOptions topt;
  topt.quad_nodes = opt.quad_nodes * scale;
  topt.min_nodes = std::min(topt.min_nodes, topt.quad_nodes);
  topt.jobs = opt.jobs;

  const int S = probe_scalar_count(opt);
  const bool forms = opt.mode != ProbeMode::function_only;
  const bool plant = opt.mode == ProbeMode::raw_pair && opt.plant_kernel;
  const int nb = forms ? 3 * S + (plant ? 1 : 0) : S;
  const Vec3 ex(1, 0, 0), ey(0, 1, 0);

  ElementData data;
  data.resize(grid, nb);
  const auto kernel_s = planted_potential(cap);

  // Samples on the grid (Gram matrix, and the data that gets interpolated in
  // solenoidal mode).
  for (int k = 0; k < grid.size(); ++k) {
    const Vec3 x = grid.point(k);
    for (int s = 0; s < S; ++s) {
      const double b = probe_scalar(cap, opt, s, x);
      data.f0[data.at(k, s)] = b;
      if (forms) {
        data.a0[data.at(k, S + s)] = (b * tangential(x, ex)).cast<cplx>();
        data.a0[data.at(k, 2 * S + s)] = (b * tangential(x, ey)).cast<cplx>();
      }
    }
    if (plant) {
      data.a0[data.at(k, 3 * S)] = tangential(x, kernel_s->gradient(x));
      data.f1[data.at(k, 3 * S)] = -kernel_s->value(x);
    }
  }

  Sampler sampler;
  if (opt.mode == ProbeMode::solenoidal_pair) {
    const HodgeProjector proj(grid);
    FieldPair tmp(grid);
    for (int n = S; n < nb; ++n) {
      for (int k = 0; k < grid.size(); ++k) {
        tmp.f[k] = 0.0;
        tmp.alpha[k] = data.a0[data.at(k, n)];
      }
      const auto split = proj.project(tmp, 1.0);
      for (int k = 0; k < grid.size(); ++k) {
        data.a0[data.at(k, n)] = split.pair.alpha[k];
        data.f1[data.at(k, n)] = split.potential[k];
      }
    }
    sampler = [&data](const Vec3& x, const Vec3& xdot, std::vector<cplx>& s0,
                      std::vector<cplx>& s1) {
      detail::Stencil st;
      detail::cubic_stencil(data.grid, x, st);
      std::fill(s0.begin(), s0.end(), cplx{});
      std::fill(s1.begin(), s1.end(), cplx{});
      for (int e = 0; e < st.n; ++e) {
        const double w = st.e[e].w;
        const std::size_t base = data.at(st.e[e].node, 0);
        for (int n = 0; n < data.nb; ++n) {
          const CVec3& a = data.a0[base + n];
          s0[n] += w * (data.f0[base + n] + a(0) * xdot(0) + a(1) * xdot(1) + a(2) * xdot(2));
          s1[n] += w * data.f1[base + n];
        }
      }
    };
  } else {
    sampler = [&, S, forms, plant](const Vec3& x, const Vec3& xdot, std::vector<cplx>& s0,
                                    std::vector<cplx>& s1) {
      std::fill(s1.begin(), s1.end(), cplx{});
      const double px = tangential(x, ex).dot(xdot);
      const double py = tangential(x, ey).dot(xdot);
      for (int s = 0; s < S; ++s) {
        const double b = probe_scalar(cap, opt, s, x);
        s0[s] = b;
        if (forms) {
          s0[S + s] = b * px;
          s0[2 * S + s] = b * py;
        }
      }
      if (plant) {
        s0[3 * S] = (kernel_s->gradient(x).transpose() * xdot.cast<cplx>())(0);
        s1[3 * S] = -kernel_s->value(x);
      }
    };
  }

  // Columns of the discrete transform for every lambda.
  const int L = static_cast<int>(lambdas.size());
  std::vector<Eigen::MatrixXcd> A(L, Eigen::MatrixXcd::Zero(rays.size(), nb));
  const auto rn = detail::ray_nodes(rays, cap.height, topt);
  parallel_for(rays.size(), opt.jobs, [&](std::size_t r) {
    std::vector<cplx> s0(nb), s1(nb);
    for (int q = rn.offset[r]; q < rn.offset[r + 1]; ++q) {
      const auto& nd = rn.nodes[q];
      sampler(nd.x, nd.xdot, s0, s1);
      for (int l = 0; l < L; ++l) {
        const double lam = lambdas[l];
        const double w = nd.weight * std::exp(-lam * nd.theta);
        for (int n = 0; n < nb; ++n) A[l](r, n) += w * (s0[n] + lam * s1[n]);
      }
    }
    const double sq = std::sqrt(rays.measure(static_cast<int>(r)));
    for (int l = 0; l < L; ++l) A[l].row(r) *= sq;
  });

  const Eigen::MatrixXcd X0 = weighted_stack(data, false);
  const Eigen::MatrixXcd X1 = weighted_stack(data, true);
  const Eigen::MatrixXcd G00 = X0.adjoint() * X0;
  const Eigen::MatrixXcd G01 = X0.adjoint() * X1;
  const Eigen::MatrixXcd G11 = X1.adjoint() * X1;

  const double cutoff = opt.mode == ProbeMode::solenoidal_pair ? opt.gram_cutoff : 1e-12;
  ProbeLevel out;
  out.level = level;
  out.basis_size = nb;
  for (int l = 0; l < L; ++l) {
    const double lam = lambdas[l];
    Eigen::MatrixXcd G = G00 + lam * (G01 + G01.adjoint()) + lam * lam * G11;
    G = 0.5 * (G + G.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(G);
    const auto& ev = eig.eigenvalues();
    const double top = ev.maxCoeff();
    std::vector<int> keep;
    for (int i = 0; i < ev.size(); ++i) {
      if (ev(i) > cutoff * top) keep.push_back(i);
    }
    Eigen::MatrixXcd Q(nb, keep.size());
    for (std::size_t c = 0; c < keep.size(); ++c) {
      Q.col(c) = eig.eigenvectors().col(keep[c]) / std::sqrt(ev(keep[c]));
    }
    const Eigen::MatrixXcd B = A[l] * Q;
    Eigen::BDCSVD<Eigen::MatrixXcd> svd(B);
    Eigen::VectorXd sv = svd.singularValues();
    std::vector<double> s(sv.data(), sv.data() + sv.size());
    std::sort(s.begin(), s.end());
    s.resize(std::min<std::size_t>(s.size(), opt.report_count));
    out.smallest.push_back(s);
    out.sigma_min.push_back(s.empty() ? 0.0 : s.front());
    out.retained_rank = static_cast<int>(keep.size());
  }
  return out;
}

}  // namespace

ProbeReport injectivity_probe(const SphericalCap& cap, const std::vector<double>& lambdas,
                              const ProbeOptions& opt) {
  cap.validate();
  if (lambdas.empty()) throw ValidationError("injectivity_probe: empty lambda list");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw ValidationError("injectivity_probe: lambda outside [0, 1]");
  }
  if (opt.plant_kernel && opt.mode != ProbeMode::raw_pair) {
    throw ValidationError("injectivity_probe: a kernel pair can only be planted in raw_pair mode");
  }
  if (opt.levels < 1 || opt.rings < 1 || opt.max_mode < 0) {
    throw ValidationError("injectivity_probe: bad basis or level counts");
  }
  ProbeReport rep;
  rep.mode = opt.mode;
  rep.lambdas = lambdas;
  for (int l = 0; l < opt.levels; ++l) rep.levels.push_back(run_level(cap, lambdas, opt, l));
  return rep;
}

}  // namespace capxray
