#include "capxray/dbar.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "fftw_lock.hpp"

#include <fftw3.h>

namespace capxray {

ComplexField::ComplexField(int nx_, int ny_, double x0_, double x1_, double y0_, double y1_,
                           cplx center, double radius)
    : nx(nx_), ny(ny_), x0(x0_), x1(x1_), y0(y0_), y1(y1_), support_center(center),
      support_radius(radius), values(static_cast<std::size_t>(nx_) * ny_, cplx{}) {
  if (nx < 4 || ny < 4) throw ValidationError("ComplexField: need at least 4 cells per side");
  if (!(x1 > x0 && y1 > y0)) throw ValidationError("ComplexField: empty extent");
}

ComplexField ComplexField::square(int n, cplx center, double half_side, double support_radius) {
  return ComplexField(n, n, center.real() - half_side, center.real() + half_side,
                      center.imag() - half_side, center.imag() + half_side, center,
                      support_radius);
}

bool ComplexField::same_grid(const ComplexField& o) const {
  return nx == o.nx && ny == o.ny && x0 == o.x0 && x1 == o.x1 && y0 == o.y0 && y1 == o.y1;
}

bool ComplexField::contains(cplx z) const {
  return z.real() >= x0 && z.real() <= x1 && z.imag() >= y0 && z.imag() <= y1;
}

cplx ComplexField::interpolate(cplx z) const {
  const double sx = (z.real() - x0) / hx() - 0.5;
  const double sy = (z.imag() - y0) / hy() - 0.5;
  const int ix = static_cast<int>(std::floor(sx));
  const int iy = static_cast<int>(std::floor(sy));
  const double fx = sx - ix, fy = sy - iy;
  auto at = [&](int i, int j) -> cplx {
    if (i < 0 || j < 0 || i >= nx || j >= ny) return 0.0;
    return (*this)(i, j);
  };
  return (1 - fx) * (1 - fy) * at(ix, iy) + fx * (1 - fy) * at(ix + 1, iy) +
         (1 - fx) * fy * at(ix, iy + 1) + fx * fy * at(ix + 1, iy + 1);
}

void ComplexField::validate() const {
  if (nx < 4 || ny < 4 || !(x1 > x0 && y1 > y0)) throw ValidationError("ComplexField: bad grid");
  if (values.size() != static_cast<std::size_t>(nx) * ny) {
    throw ShapeError("ComplexField: sample count does not match the grid");
  }
  if (!(support_radius > 0.0)) throw ValidationError("ComplexField: support radius must be positive");
  const double tol = 1e-12 * std::max(1.0, max_abs());
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      if (std::abs(point(ix, iy) - support_center) > support_radius &&
          std::abs((*this)(ix, iy)) > tol) {
        throw PreconditionError("ComplexField: samples do not vanish outside the support disk");
      }
    }
  }
}

void ComplexField::fill(const std::function<cplx(cplx)>& g, int supersample) {
  const int s = std::max(1, supersample);
  for (int iy = 0; iy < ny; ++iy) {
    for (int ix = 0; ix < nx; ++ix) {
      cplx acc{};
      for (int a = 0; a < s; ++a) {
        for (int b = 0; b < s; ++b) {
          acc += g({x0 + (ix + (a + 0.5) / s) * hx(), y0 + (iy + (b + 0.5) / s) * hy()});
        }
      }
      (*this)(ix, iy) = acc / double(s * s);
    }
  }
}

double ComplexField::l2_norm() const {
  double s = 0.0;
  for (const auto& v : values) s += std::norm(v);
  return std::sqrt(s * hx() * hy());
}

double ComplexField::max_abs() const {
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

// ---------------------------------------------------------------------------
// Exact rectangle integrals

namespace {

// Branch of log analytic away from the ray -d, d a unit complex number.
cplx log_dir(cplx w, cplx d) { return std::log(w * std::conj(d)) + cplx(0.0, std::arg(d)); }

// Integral of d_a d_b F over [a0,a1]x[b0,b1] after splitting along the axes,
// each piece handled with the log branch centred on its quadrant.
template <class F>
cplx quadrant_integral(double a0, double a1, double b0, double b1, F&& anti) {
  const double as[3] = {a0, std::clamp(0.0, a0, a1), a1};
  const double bs[3] = {b0, std::clamp(0.0, b0, b1), b1};
  cplx total{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double p0 = as[i], p1 = as[i + 1], q0 = bs[j], q1 = bs[j + 1];
      if (!(p1 > p0 && q1 > q0)) continue;
      const double ma = 0.5 * (p0 + p1), mb = 0.5 * (q0 + q1);
      const cplx d = std::polar(1.0, std::atan2(mb >= 0 ? 1.0 : -1.0, ma >= 0 ? 1.0 : -1.0));
      total += anti(cplx(p1, q1), d) - anti(cplx(p0, q1), d) - anti(cplx(p1, q0), d) +
               anti(cplx(p0, q0), d);
    }
  }
  return total;
}

cplx anti_inv(cplx w, cplx d) {
  if (w == cplx{}) return 0.0;
  return cplx(0.0, -1.0) * (w * log_dir(w, d) - w);
}

cplx anti_inv2(cplx w, cplx d) {
  if (w == cplx{}) throw DomainError("rect_pv_integral_inv2: singular point on a piece corner");
  return kI * log_dir(w, d);
}

}  // namespace

cplx rect_integral_inv(double a0, double a1, double b0, double b1) {
  return quadrant_integral(a0, a1, b0, b1, anti_inv);
}

cplx rect_pv_integral_inv2(double a0, double a1, double b0, double b1) {
  const bool inside = a0 < 0.0 && a1 > 0.0 && b0 < 0.0 && b1 > 0.0;
  if (!inside) {
    if (a0 <= 0.0 && a1 >= 0.0 && b0 <= 0.0 && b1 >= 0.0) {
      throw DomainError("rect_pv_integral_inv2: singular point on the rectangle boundary");
    }
    return quadrant_integral(a0, a1, b0, b1, anti_inv2);
  }
  // The centred square contributes zero (the integrand is odd under w -> iw).
  const double s = std::min({-a0, a1, -b0, b1});
  cplx total{};
  if (a1 > s) total += quadrant_integral(s, a1, b0, b1, anti_inv2);
  if (-a0 > s) total += quadrant_integral(a0, -s, b0, b1, anti_inv2);
  if (b1 > s) total += quadrant_integral(-s, s, s, b1, anti_inv2);
  if (-b0 > s) total += quadrant_integral(-s, s, b0, -s, anti_inv2);
  return total;
}

// ---------------------------------------------------------------------------
// Convolutions

namespace detail {

std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace detail

namespace {

using detail::fftw_mutex;

class Fft2 {
 public:
  Fft2(int rows, int cols) : rows_(rows), cols_(cols) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * rows * cols));
    std::lock_guard lock(fftw_mutex());
    fwd_ = fftw_plan_dft_2d(rows, cols, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_2d(rows, cols, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  ~Fft2() {
    std::lock_guard lock(fftw_mutex());
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft2(const Fft2&) = delete;
  Fft2& operator=(const Fft2&) = delete;

  std::vector<cplx> forward(const std::vector<cplx>& in) { return run(in, fwd_); }
  std::vector<cplx> backward(const std::vector<cplx>& in) { return run(in, bwd_); }

 private:
  std::vector<cplx> run(const std::vector<cplx>& in, fftw_plan p) {
    auto* b = reinterpret_cast<cplx*>(buf_);
    std::copy(in.begin(), in.end(), b);
    fftw_execute(p);
    return {b, b + static_cast<std::size_t>(rows_) * cols_};
  }
  int rows_, cols_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

struct ConvResult {
  std::vector<cplx> field;  // sum_{k != m} K(z_m - xi_k) G_k hx hy
  std::vector<cplx> ones;   // the same with G = 1 on the grid
};

template <class Kernel>
ConvResult convolve(const ComplexField& G, Kernel&& K) {
  const int P = 2 * G.nx, Q = 2 * G.ny;
  const double hx = G.hx(), hy = G.hy();
  std::vector<cplx> kern(static_cast<std::size_t>(P) * Q, cplx{});
  for (int dy = -(G.ny - 1); dy <= G.ny - 1; ++dy) {
    for (int dx = -(G.nx - 1); dx <= G.nx - 1; ++dx) {
      if (dx == 0 && dy == 0) continue;
      kern[static_cast<std::size_t>((dy + Q) % Q) * P + (dx + P) % P] =
          K(cplx(dx * hx, dy * hy)) * hx * hy;
    }
  }
  std::vector<cplx> g(kern.size(), cplx{}), one(kern.size(), cplx{});
  for (int iy = 0; iy < G.ny; ++iy) {
    for (int ix = 0; ix < G.nx; ++ix) {
      g[static_cast<std::size_t>(iy) * P + ix] = G(ix, iy);
      one[static_cast<std::size_t>(iy) * P + ix] = 1.0;
    }
  }
  Fft2 fft(Q, P);
  const auto kh = fft.forward(kern);
  auto gh = fft.forward(g);
  auto oh = fft.forward(one);
  for (std::size_t k = 0; k < kh.size(); ++k) {
    gh[k] *= kh[k];
    oh[k] *= kh[k];
  }
  const auto gc = fft.backward(gh);
  const auto oc = fft.backward(oh);
  const double scale = 1.0 / (static_cast<double>(P) * Q);
  ConvResult out;
  out.field.resize(G.values.size());
  out.ones.resize(G.values.size());
  for (int iy = 0; iy < G.ny; ++iy) {
    for (int ix = 0; ix < G.nx; ++ix) {
      out.field[G.index(ix, iy)] = gc[static_cast<std::size_t>(iy) * P + ix] * scale;
      out.ones[G.index(ix, iy)] = oc[static_cast<std::size_t>(iy) * P + ix] * scale;
    }
  }
  return out;
}

ComplexField like(const ComplexField& G) {
  ComplexField out = G;
  std::fill(out.values.begin(), out.values.end(), cplx{});
  return out;
}

}  // namespace

ComplexField cauchy_transform(const ComplexField& G) {
  if (G.values.size() != static_cast<std::size_t>(G.nx) * G.ny) {
    throw ShapeError("cauchy_transform: sample count does not match the grid");
  }
  const auto conv = convolve(G, [](cplx w) { return 1.0 / w; });
  ComplexField out = like(G);
  for (int iy = 0; iy < G.ny; ++iy) {
    for (int ix = 0; ix < G.nx; ++ix) {
      const int k = G.index(ix, iy);
      const cplx z = G.point(ix, iy);
      const cplx I = rect_integral_inv(z.real() - G.x1, z.real() - G.x0, z.imag() - G.y1,
                                       z.imag() - G.y0);
      out.values[k] = (conv.field[k] - G.values[k] * conv.ones[k] + G.values[k] * I) / kPi;
    }
  }
  return out;
}

ComplexField beurling_transform(const ComplexField& G) {
  if (G.values.size() != static_cast<std::size_t>(G.nx) * G.ny) {
    throw ShapeError("beurling_transform: sample count does not match the grid");
  }
  const auto conv = convolve(G, [](cplx w) { return 1.0 / (w * w); });
  ComplexField out = like(G);
  for (int iy = 0; iy < G.ny; ++iy) {
    for (int ix = 0; ix < G.nx; ++ix) {
      const int k = G.index(ix, iy);
      const cplx z = G.point(ix, iy);
      const cplx I = rect_pv_integral_inv2(z.real() - G.x1, z.real() - G.x0, z.imag() - G.y1,
                                           z.imag() - G.y0);
      out.values[k] = -(conv.field[k] - G.values[k] * conv.ones[k] + G.values[k] * I) / kPi;
    }
  }
  return out;
}

std::vector<cplx> cauchy_transform(const ComplexField& G, const std::vector<cplx>& points) {
  const double area = G.hx() * G.hy();
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const cplx z : points) {
    const bool inside = G.contains(z);
    const cplx gz = inside ? G.interpolate(z) : cplx{};
    cplx sum{};
    for (int iy = 0; iy < G.ny; ++iy) {
      for (int ix = 0; ix < G.nx; ++ix) {
        const cplx w = z - G.point(ix, iy);
        if (w == cplx{}) continue;
        sum += (G(ix, iy) - gz) / w;
      }
    }
    sum *= area;
    if (inside) {
      sum += gz * rect_integral_inv(z.real() - G.x1, z.real() - G.x0, z.imag() - G.y1,
                                    z.imag() - G.y0);
    }
    out.push_back(sum / kPi);
  }
  return out;
}

ComplexField solve_dbar(const ComplexField& G) { return cauchy_transform(G); }

namespace {
// Fourth-order central differences, second order on the ring next to the border.
cplx diff(const ComplexField& u, int ix, int iy, int dx, int dy, double h, bool wide) {
  auto at = [&](int k) { return u(ix + k * dx, iy + k * dy); };
  if (!wide) return (at(1) - at(-1)) / (2.0 * h);
  return (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * h);
}

template <int Sign>
ComplexField wirtinger(const ComplexField& u) {
  ComplexField out = like(u);
  const double hx = u.hx(), hy = u.hy();
  for (int iy = 1; iy < u.ny - 1; ++iy) {
    for (int ix = 1; ix < u.nx - 1; ++ix) {
      const bool wide = ix >= 2 && iy >= 2 && ix < u.nx - 2 && iy < u.ny - 2;
      const cplx ux = diff(u, ix, iy, 1, 0, hx, wide);
      const cplx uy = diff(u, ix, iy, 0, 1, hy, wide);
      out(ix, iy) = 0.5 * (ux + double(Sign) * kI * uy);
    }
  }
  return out;
}
}  // namespace

ComplexField dbar_fd(const ComplexField& u) { return wirtinger<+1>(u); }
ComplexField dz_fd(const ComplexField& u) { return wirtinger<-1>(u); }

double dbar_residual(const ComplexField& u, const ComplexField& G, int margin) {
  if (!u.same_grid(G)) throw ShapeError("dbar_residual: grids differ");
  const ComplexField d = dbar_fd(u);
  const int m = std::max(1, margin);
  double num = 0.0, den = 0.0;
  for (int iy = m; iy < u.ny - m; ++iy) {
    for (int ix = m; ix < u.nx - m; ++ix) {
      num += std::norm(d(ix, iy) - G(ix, iy));
      den += std::norm(G(ix, iy));
    }
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

double beurling_consistency(const ComplexField& CG, const ComplexField& SG, int margin) {
  if (!CG.same_grid(SG)) throw ShapeError("beurling_consistency: grids differ");
  const ComplexField d = dz_fd(CG);
  const int m = std::max(1, margin);
  double num = 0.0, den = 0.0;
  for (int iy = m; iy < CG.ny - m; ++iy) {
    for (int ix = m; ix < CG.nx - m; ++ix) {
      num = std::max(num, std::abs(d(ix, iy) - SG(ix, iy)));
      den = std::max(den, std::abs(SG(ix, iy)));
    }
  }
  return den > 0.0 ? num / den : num;
}

double IsometryReport::defect() const {
  if (norm_G == 0.0) return norm_SG;
  return std::abs(norm_SG - norm_G) / norm_G;
}

IsometryReport beurling_isometry(const ComplexField& G, int pad) {
  if (pad < 1 || pad % 2 == 0) throw ValidationError("beurling_isometry: pad must be odd");
  if (G.nx != G.ny || std::abs(G.hx() - G.hy()) > 1e-12 * G.hx()) {
    throw PreconditionError("beurling_isometry: needs a square grid with square cells");
  }
  const cplx box_center(0.5 * (G.x0 + G.x1), 0.5 * (G.y0 + G.y1));
  if (std::abs(box_center - G.support_center) > 1e-9 * (G.x1 - G.x0)) {
    throw PreconditionError("beurling_isometry: support must be centred in the grid box");
  }
  const double half = 0.5 * pad * (G.x1 - G.x0);
  ComplexField P = ComplexField::square(pad * G.nx, box_center, half, G.support_radius);
  const int off = (pad - 1) / 2 * G.nx;
  for (int iy = 0; iy < G.ny; ++iy) {
    for (int ix = 0; ix < G.nx; ++ix) P(ix + off, iy + off) = G(ix, iy);
  }
  const ComplexField S = beurling_transform(P);
  IsometryReport rep;
  rep.norm_G = G.l2_norm();
  cplx M0{};
  for (const auto& v : G.values) M0 += v;
  M0 *= G.hx() * G.hy();
  rep.tail = std::norm(M0) / (kPi * kPi) * (kPi + 2.0) / (2.0 * half * half);
  rep.norm_SG = std::sqrt(std::pow(S.l2_norm(), 2) + rep.tail);
  return rep;
}

double wk_inf_norm(const ComplexField& u, int k) {
  double n = u.max_abs();
  if (k == 0) return n;
  double g = 0.0;
  for (int iy = 1; iy < u.ny - 1; ++iy) {
    for (int ix = 1; ix < u.nx - 1; ++ix) {
      const cplx ux = (u(ix + 1, iy) - u(ix - 1, iy)) / (2.0 * u.hx());
      const cplx uy = (u(ix, iy + 1) - u(ix, iy - 1)) / (2.0 * u.hy());
      g = std::max(g, std::sqrt(std::norm(ux) + std::norm(uy)));
    }
  }
  return n + g;
}

namespace {
// Holder-gamma seminorm of u (k = 0) or grad u (k = 1) from differences at
// dyadic offsets along both axes.
double holder_seminorm(const ComplexField& u, int k, double gamma) {
  auto sample = [&](int ix, int iy, int c) -> cplx {
    if (k == 0) return u(ix, iy);
    if (c == 0) return (u(ix + 1, iy) - u(ix - 1, iy)) / (2.0 * u.hx());
    return (u(ix, iy + 1) - u(ix, iy - 1)) / (2.0 * u.hy());
  };
  double best = 0.0;
  const int comps = k == 0 ? 1 : 2;
  for (int step = 1; step <= 16; step *= 2) {
    for (int iy = 1; iy + step < u.ny - 1; ++iy) {
      for (int ix = 1; ix + step < u.nx - 1; ++ix) {
        double dxn = 0.0, dyn = 0.0;
        for (int c = 0; c < comps; ++c) {
          dxn += std::norm(sample(ix + step, iy, c) - sample(ix, iy, c));
          dyn += std::norm(sample(ix, iy + step, c) - sample(ix, iy, c));
        }
        best = std::max(best, std::sqrt(dxn) / std::pow(step * u.hx(), gamma));
        best = std::max(best, std::sqrt(dyn) / std::pow(step * u.hy(), gamma));
      }
    }
  }
  return best;
}
}  // namespace

HolderReport holder_bound_check(const std::vector<ComplexField>& family, int k, double gamma) {
  if (k != 0 && k != 1) throw ParameterError("holder_bound_check: k must be 0 or 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ParameterError("holder_bound_check: gamma outside (0,1)");
  HolderReport rep;
  rep.k = k;
  rep.gamma = gamma;
  for (const auto& G : family) {
    const double ng = wk_inf_norm(G, k);
    if (ng == 0.0) {
      rep.ratios.push_back(0.0);
      rep.holder_ratios.push_back(0.0);
      continue;
    }
    const ComplexField C = cauchy_transform(G);
    rep.ratios.push_back(wk_inf_norm(C, k) / ng);
    const double hg = holder_seminorm(G, k, gamma);
    rep.holder_ratios.push_back(hg > 0.0 ? holder_seminorm(C, k, gamma) / hg : 0.0);
    rep.max_ratio = std::max(rep.max_ratio, rep.ratios.back());
  }
  return rep;
}

ComplexField gaussian_bump(cplx center, double R, int n) {
  ComplexField G = ComplexField::square(n, center, 1.2 * R, R);
  const double s = R / 8.0;
  G.fill([&](cplx z) -> cplx {
    const double r2 = std::norm(z - center);
    if (r2 >= R * R) return 0.0;
    return std::exp(-r2 / (2.0 * s * s));
  });
  return G;
}

}  // namespace capxray
