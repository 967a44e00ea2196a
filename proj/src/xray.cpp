#include "capxray/xray.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "capxray/parallel.hpp"
#include "capxray/quadrature.hpp"
#include "ray_sampling.hpp"

namespace capxray {

namespace detail {

RayNodes ray_nodes(const RayGrid& rays, double level, const TransformOptions& opt) {
  RayNodes out;
  out.offset.reserve(rays.size() + 1);
  out.offset.push_back(0);
  for (int r = 0; r < rays.size(); ++r) {
    const BoundaryRay ray = rays.ray(r);
    const Chord c = chord_above(rays.cap, ray, level);
    if (!c.empty()) {
      const int n = nodes_for_length(rays.cap, c.length(), opt);
      const auto& gl = gauss_legendre(n);
      const double half = 0.5 * c.length(), mid = 0.5 * (c.enter + c.leave);
      for (int q = 0; q < n; ++q) {
        const double th = mid + half * gl.nodes[q];
        out.nodes.push_back({th, half * gl.weights[q],
                             std::cos(th) * ray.y + std::sin(th) * ray.eta,
                             -std::sin(th) * ray.y + std::cos(th) * ray.eta});
      }
    }
    out.offset.push_back(static_cast<int>(out.nodes.size()));
  }
  return out;
}

namespace {
// Keys cubic convolution weights (a = -1/2) for offsets -1, 0, 1, 2.
std::array<double, 4> keys(double t) {
  const double t2 = t * t, t3 = t2 * t;
  return {0.5 * (-t3 + 2.0 * t2 - t), 0.5 * (3.0 * t3 - 5.0 * t2 + 2.0),
          0.5 * (-3.0 * t3 + 4.0 * t2 + t), 0.5 * (t3 - t2)};
}
}  // namespace

void cubic_stencil(const CapGrid& g, const Vec3& x, Stencil& out) {
  out.n = 0;
  const double U = g.max_colatitude();
  const double u = std::min(std::acos(std::clamp(x(2), -1.0, 1.0)), U);
  double v = std::atan2(x(1), x(0));
  if (v < 0.0) v += kTwoPi;
  const double su = u / g.du() - 0.5;
  const int i0 = static_cast<int>(std::floor(su));
  const auto wu = keys(su - i0);
  const double sv = v / g.dv();
  const int j0 = static_cast<int>(std::floor(sv));
  const auto wv = keys(sv - j0);
  const int N = g.nu;
  auto push = [&](int i, int j, double w) {
    if (w == 0.0) return;
    out.e[out.n++] = {g.index(i, ((j % g.nv) + g.nv) % g.nv), w};
  };
  for (int a = 0; a < 4; ++a) {
    const int row = i0 - 1 + a;
    for (int b = 0; b < 4; ++b) {
      const int col = j0 - 1 + b;
      const double w = wu[a] * wv[b];
      if (row < 0) {
        push(-row - 1, col + g.nv / 2, w);
      } else if (row < N) {
        push(row, col, w);
      } else if (row == N) {
        push(N - 1, col, 3.0 * w);
        push(N - 2, col, -3.0 * w);
        push(N - 3, col, w);
      } else {
        push(N - 1, col, 6.0 * w);
        push(N - 2, col, -8.0 * w);
        push(N - 3, col, 3.0 * w);
      }
    }
  }
}

}  // namespace detail

int nodes_for_length(const SphericalCap& cap, double length, const TransformOptions& opt) {
  const int scaled = static_cast<int>(std::ceil(opt.quad_nodes * length / cap.max_exit_time()));
  return std::max(opt.min_nodes, scaled);
}

Sinogram::Sinogram(const RayGrid& g, double lam) : grid(g), lambda(lam), values(g.size(), cplx{}) {}

double Sinogram::norm() const { return std::sqrt(std::max(0.0, sinogram_inner(*this, *this).real())); }

cplx sinogram_inner(const Sinogram& a, const Sinogram& b) {
  if (!(a.grid == b.grid)) throw ShapeError("sinogram_inner: ray grids differ");
  cplx s{};
  for (int r = 0; r < a.grid.size(); ++r) s += a.grid.measure(r) * a.values[r] * std::conj(b.values[r]);
  return s;
}

Sinogram transform(const RayGrid& rays, const PairFunction& pair, double lambda,
                   const TransformOptions& opt) {
  return transform_above(rays, pair, lambda, rays.cap.height, opt);
}

Sinogram transform_above(const RayGrid& rays, const PairFunction& pair, double lambda,
                         double level, const TransformOptions& opt) {
  rays.validate();
  if (!(level >= rays.cap.outer_height && level <= rays.cap.height)) {
    throw ParameterError("transform_above: level must lie in [beta', beta]");
  }
  Sinogram out(rays, lambda);
  const auto rn = detail::ray_nodes(rays, level, opt);
  parallel_for(rays.size(), opt.jobs, [&](std::size_t r) {
    cplx s{};
    for (int q = rn.offset[r]; q < rn.offset[r + 1]; ++q) {
      const auto& nd = rn.nodes[q];
      const cplx integrand =
          pair.eval_f(nd.x) + (pair.eval_alpha(nd.x).transpose() * nd.xdot.cast<cplx>())(0);
      s += nd.weight * std::exp(-lambda * nd.theta) * integrand;
    }
    out.values[r] = s;
  });
  return out;
}

namespace {

void check_support(const SphericalCap& cap, const FieldPair& pair) {
  if (pair.grid.height > cap.height + 1e-14) {
    throw ShapeError("transform: the cap grid does not cover S_{>beta}");
  }
  double scale = 0.0;
  for (int k = 0; k < pair.grid.size(); ++k) {
    scale = std::max({scale, std::abs(pair.f[k]), pair.alpha[k].norm()});
  }
  for (int k = 0; k < pair.grid.size(); ++k) {
    if (pair.grid.point(k)(2) > cap.height) continue;
    if (std::abs(pair.f[k]) > 1e-12 * std::max(1.0, scale) ||
        pair.alpha[k].norm() > 1e-12 * std::max(1.0, scale)) {
      throw PreconditionError("transform: pair does not vanish outside S_{>beta}");
    }
  }
}

}  // namespace

Sinogram transform(const RayGrid& rays, const FieldPair& pair, double lambda,
                   const TransformOptions& opt) {
  rays.validate();
  if (static_cast<int>(pair.f.size()) != pair.grid.size() ||
      static_cast<int>(pair.alpha.size()) != pair.grid.size()) {
    throw ShapeError("transform: FieldPair arrays do not match its grid");
  }
  check_support(rays.cap, pair);
  Sinogram out(rays, lambda);
  const auto rn = detail::ray_nodes(rays, rays.cap.height, opt);
  parallel_for(rays.size(), opt.jobs, [&](std::size_t r) {
    detail::Stencil st;
    cplx s{};
    for (int q = rn.offset[r]; q < rn.offset[r + 1]; ++q) {
      const auto& nd = rn.nodes[q];
      detail::cubic_stencil(pair.grid, nd.x, st);
      cplx v{};
      for (int e = 0; e < st.n; ++e) {
        const int k = st.e[e].node;
        v += st.e[e].w * (pair.f[k] + pair.alpha[k](0) * nd.xdot(0) +
                          pair.alpha[k](1) * nd.xdot(1) + pair.alpha[k](2) * nd.xdot(2));
      }
      s += nd.weight * std::exp(-lambda * nd.theta) * v;
    }
    out.values[r] = s;
  });
  return out;
}

FieldPair adjoint(const Sinogram& sino, const CapGrid& grid, const TransformOptions& opt) {
  const RayGrid& rays = sino.grid;
  if (static_cast<int>(sino.values.size()) != rays.size()) {
    throw ShapeError("adjoint: sinogram does not match its ray grid");
  }
  if (grid.height > rays.cap.height + 1e-14) {
    throw ShapeError("adjoint: the cap grid does not cover S_{>beta}");
  }
  grid.validate();
  FieldPair out(grid);
  const auto rn = detail::ray_nodes(rays, rays.cap.height, opt);
  detail::Stencil st;
  for (int r = 0; r < rays.size(); ++r) {
    const cplx g = rays.measure(r) * sino.values[r];
    if (g == cplx{}) continue;
    for (int q = rn.offset[r]; q < rn.offset[r + 1]; ++q) {
      const auto& nd = rn.nodes[q];
      const cplx c = g * nd.weight * std::exp(-sino.lambda * nd.theta);
      detail::cubic_stencil(grid, nd.x, st);
      for (int e = 0; e < st.n; ++e) {
        const int k = st.e[e].node;
        const cplx cw = c * st.e[e].w;
        out.f[k] += cw;
        out.alpha[k] += cw * nd.xdot.cast<cplx>();
      }
    }
  }
  for (int i = 0; i < grid.nu; ++i) {
    const double A = grid.area_weight(i);
    for (int j = 0; j < grid.nv; ++j) {
      const int k = grid.index(i, j);
      out.f[k] /= kTwoPi * A;
      out.alpha[k] = tangential(grid.point(k), out.alpha[k]) / (kPi * A);
    }
  }
  return out;
}

PairFunction kernel_element(const SphericalCap& cap, std::shared_ptr<const ScalarField> s,
                            double lambda) {
  cap.validate();
  const double r = std::sqrt(1.0 - cap.height * cap.height);
  for (int k = 0; k < 64; ++k) {
    const double v = kTwoPi * k / 64.0;
    const Vec3 x(r * std::cos(v), r * std::sin(v), cap.height);
    if (std::abs(s->value(x)) > 1e-10) {
      throw PreconditionError("kernel_element: scalar does not vanish on the boundary circle");
    }
  }
  PairFunction p;
  p.f = [s, lambda](const Vec3& x) { return -lambda * s->value(x); };
  p.alpha = [s](const Vec3& x) -> CVec3 { return s->gradient(x); };
  return p;
}

double SantaloResult::relative_error() const {
  if (lhs == 0.0) return std::abs(rhs);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

SantaloResult santalo_check(const RayGrid& rays, const CapGrid& outer_grid,
                            const std::function<double(const Vec3&)>& F,
                            const TransformOptions& opt) {
  if (std::abs(outer_grid.height - rays.cap.outer_height) > 1e-14) {
    throw ShapeError("santalo_check: the cap grid must cover S_{>beta'}");
  }
  SantaloResult res;
  for (int i = 0; i < outer_grid.nu; ++i) {
    const double w = outer_grid.area_weight(i);
    for (int j = 0; j < outer_grid.nv; ++j) res.lhs += w * F(outer_grid.point(i, j));
  }
  const auto rn = detail::ray_nodes(rays, rays.cap.outer_height, opt);
  std::vector<double> per_ray(rays.size(), 0.0);
  parallel_for(rays.size(), opt.jobs, [&](std::size_t r) {
    double s = 0.0;
    for (int q = rn.offset[r]; q < rn.offset[r + 1]; ++q) s += rn.nodes[q].weight * F(rn.nodes[q].x);
    per_ray[r] = s * rays.measure(static_cast<int>(r));
  });
  for (double v : per_ray) res.rhs += v;
  res.rhs /= kTwoPi;
  return res;
}

BumpSum random_cap_bumps(std::uint64_t seed, double height, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  const double U = std::acos(height);
  std::vector<Bump> bumps;
  for (int m = 0; m < count; ++m) {
    const double uc = 0.6 * U * uni(rng);
    const double vc = kTwoPi * uni(rng);
    const double reach = (U - uc) * (0.5 + 0.4 * uni(rng));
    Bump b;
    b.center = sphere_point(uc, vc);
    b.radius = 2.0 * std::sin(0.5 * reach);
    const cplx c0(2.0 * uni(rng) - 1.0, 2.0 * uni(rng) - 1.0);
    const CVec3 g(cplx(uni(rng) - 0.5, uni(rng) - 0.5), cplx(uni(rng) - 0.5, uni(rng) - 0.5),
                  cplx(uni(rng) - 0.5, uni(rng) - 0.5));
    b.poly = Polynomial::affine(c0, g);
    bumps.push_back(b);
  }
  return BumpSum(std::move(bumps));
}

PairFunction random_pair(std::uint64_t seed, double height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto f = std::make_shared<BumpSum>(random_cap_bumps(rng(), height, 3));
  std::vector<std::pair<CVec3, std::shared_ptr<BumpSum>>> terms;
  for (int m = 0; m < 3; ++m) {
    const CVec3 d(cplx(uni(rng), uni(rng)), cplx(uni(rng), uni(rng)), cplx(uni(rng), uni(rng)));
    terms.emplace_back(d, std::make_shared<BumpSum>(random_cap_bumps(rng(), height, 1)));
  }
  PairFunction p;
  p.f = [f](const Vec3& x) { return f->value(x); };
  p.alpha = [terms](const Vec3& x) {
    CVec3 a = CVec3::Zero();
    for (const auto& [d, b] : terms) a += b->value(x) * d;
    return a;
  };
  return p;
}

ContinuityReport continuity_constant(const RayGrid& rays, const CapGrid& grid, double lambda,
                                     int trials, std::uint64_t seed, const TransformOptions& opt) {
  if (trials < 1) throw ValidationError("continuity_constant: trials must be >= 1");
  ContinuityReport rep;
  rep.bound = kPi * std::exp(2.0 * std::abs(lambda) * kPi);
  std::mt19937_64 rng(seed);
  for (int t = 0; t < trials; ++t) {
    const PairFunction H = random_pair(rng(), rays.cap.height);
    const double h2 = std::pow(pair_norm(H, grid), 2);
    if (h2 <= 0.0) continue;
    const double th2 = std::pow(transform(rays, H, lambda, opt).norm(), 2);
    rep.max_ratio = std::max(rep.max_ratio, th2 / h2);
    ++rep.trials;
  }
  return rep;
}

}  // namespace capxray
