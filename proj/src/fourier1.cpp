#include "capxray/fourier1.hpp"

#include <cmath>
#include <mutex>

#include <fftw3.h>

#include "fftw_lock.hpp"

namespace capxray {

namespace {

bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<cplx> fft(const std::vector<cplx>& in, int sign) {
  const int n = static_cast<int>(in.size());
  auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
  fftw_plan plan;
  {
    std::lock_guard lock(detail::fftw_mutex());
    plan = fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
  }
  for (int k = 0; k < n; ++k) {
    buf[k][0] = in[k].real();
    buf[k][1] = in[k].imag();
  }
  fftw_execute(plan);
  std::vector<cplx> out(n);
  for (int k = 0; k < n; ++k) out[k] = {buf[k][0], buf[k][1]};
  {
    std::lock_guard lock(detail::fftw_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(buf);
  return out;
}

}  // namespace

void CircleFunction::validate() const {
  if (!power_of_two(size()) || size() < 64) {
    throw ValidationError("CircleFunction: sample count must be a power of two >= 64");
  }
  if (!(smoothness > 0.5)) throw ValidationError("CircleFunction: smoothness must exceed 1/2");
}

CircleFunction CircleFunction::sample(const std::function<cplx(double)>& f, int n, double m) {
  CircleFunction F;
  F.smoothness = m;
  F.samples.resize(n);
  for (int j = 0; j < n; ++j) F.samples[j] = f(kTwoPi * j / n);
  F.validate();
  return F;
}

cplx CoefficientTable::at(int k) const {
  if (k < -n / 2 || k > n / 2) return {};
  return c[k + n / 2];
}

cplx& CoefficientTable::at(int k) {
  if (k < -n / 2 || k > n / 2) throw ShapeError("CoefficientTable: frequency out of range");
  return c[k + n / 2];
}

double CoefficientTable::hs_norm(double s) const {
  double sum = 0.0;
  for (int k = -n / 2; k <= n / 2; ++k) {
    sum += std::pow(1.0 + double(k) * k, s) * std::norm(at(k));
  }
  return std::sqrt(sum);
}

std::vector<cplx> CoefficientTable::synthesize() const {
  std::vector<cplx> bins(n);
  for (int k = -n / 2; k <= n / 2; ++k) bins[((k % n) + n) % n] += at(k);
  return fft(bins, FFTW_BACKWARD);
}

CoefficientTable coefficients(const CircleFunction& F) {
  F.validate();
  const int n = F.size();
  const auto raw = fft(F.samples, FFTW_FORWARD);
  CoefficientTable t{n, std::vector<cplx>(n + 1)};
  for (int k = -n / 2 + 1; k < n / 2; ++k) t.at(k) = raw[((k % n) + n) % n] / double(n);
  const cplx nyq = raw[n / 2] / double(n);
  t.at(n / 2) = 0.5 * nyq;
  t.at(-n / 2) = 0.5 * nyq;
  return t;
}

CircleFunction from_coefficients(const CoefficientTable& table, double smoothness) {
  CircleFunction F{table.synthesize(), smoothness};
  F.validate();
  return F;
}

CoefficientTable SplitResult::anti_table() const {
  const int n = 2 * static_cast<int>(anti_part.size());
  CoefficientTable t{n, std::vector<cplx>(n + 1)};
  for (int k = 1; k <= n / 2; ++k) t.at(-k) = anti_part[k - 1];
  return t;
}

CoefficientTable SplitResult::holo_table() const {
  const int n = 2 * (static_cast<int>(holo_part.size()) - 1);
  CoefficientTable t{n, std::vector<cplx>(n + 1)};
  for (int k = 0; k <= n / 2; ++k) t.at(k) = holo_part[k];
  return t;
}

double split_decay_exponent(double beta, double m) { return (m - 0.5 - beta) / (2.0 * (m + 1.0)); }

int split_truncation(double epsilon, double beta, double m) {
  const double theta = -(2.0 * (-m + beta) + 1.0) / (m + 1.0);
  const double e = (theta - 2.0) / (2.0 * (1.0 + beta) + 1.0);
  return static_cast<int>(std::ceil(std::pow(epsilon, e)));
}

SplitResult split(const CircleFunction& F, double epsilon, double beta) {
  F.validate();
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("split: epsilon must lie in (0, 1)");
  const double m = F.smoothness;
  if (!(beta > 0.0 && beta < m - 0.5)) throw ParameterError("split: beta must lie in (0, m - 1/2)");
  const auto c = coefficients(F);
  SplitResult r;
  r.epsilon = epsilon;
  r.beta = beta;
  r.truncation_N = split_truncation(epsilon, beta, m);
  r.anti_part.resize(c.max_k());
  r.holo_part.resize(c.max_k() + 1);
  for (int k = 1; k <= c.max_k(); ++k) r.anti_part[k - 1] = c.at(-k);
  for (int k = 0; k <= c.max_k(); ++k) r.holo_part[k] = c.at(k);
  r.anti_norm = r.anti_table().hs_norm(beta);
  return r;
}

LogBoundCheck log_perturbation_bound(cplx z) {
  if (!(std::abs(z) < 0.5)) throw DomainError("log_perturbation_bound: requires |z| < 1/2");
  LogBoundCheck c{z, std::abs(std::log(1.0 + z)), 2.0 * std::abs(z), false};
  c.holds = (z == cplx{}) ? true : c.lhs < c.bound;
  return c;
}

ModulusKind parse_modulus_kind(const std::string& s) {
  if (s == "single_log") return ModulusKind::single_log;
  if (s == "double_log") return ModulusKind::double_log;
  if (s == "triple_log") return ModulusKind::triple_log;
  throw ParameterError("unknown modulus kind '" + s + "' (single_log, double_log, triple_log)");
}

std::string to_string(ModulusKind k) {
  switch (k) {
    case ModulusKind::single_log: return "single_log";
    case ModulusKind::double_log: return "double_log";
    case ModulusKind::triple_log: return "triple_log";
  }
  return "?";
}

double modulus_domain_limit(ModulusKind kind) {
  switch (kind) {
    case ModulusKind::single_log: return 1.0;
    case ModulusKind::double_log: return std::exp(-1.0);
    case ModulusKind::triple_log: return std::exp(-std::exp(1.0));
  }
  return 0.0;
}

double modulus(ModulusKind kind, double s, double sigma) {
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ParameterError("modulus: sigma must lie in (0, 1]");
  if (!(s > 0.0 && s < modulus_domain_limit(kind))) {
    throw DomainError("modulus: s outside the domain of the " + to_string(kind) + " modulus");
  }
  double x = std::abs(std::log(s));
  if (kind != ModulusKind::single_log) x = std::abs(std::log(x));
  if (kind == ModulusKind::triple_log) x = std::abs(std::log(x));
  return std::pow(x, -sigma / (3.0 * (sigma + 1.0)));
}

double modulus_functional(double s, double K, double lambda0, double L, double sigma, double C) {
  if (!(s < 1.0)) throw DomainError("modulus_functional: requires s < 1");
  if (!(s > 0.0)) throw DomainError("modulus_functional: requires s > 0");
  return modulus_functional_log(std::log(s), K, lambda0, L, sigma, C);
}

double modulus_functional_log(double log_s, double K, double lambda0, double L, double sigma,
                              double C) {
  if (!(log_s < 0.0)) throw DomainError("modulus_functional: requires log s < 0");
  if (!(lambda0 > 0.0 && lambda0 <= 1.0)) throw ParameterError("modulus_functional: lambda0 in (0, 1]");
  if (!(sigma > 0.0 && sigma <= 1.0)) throw ParameterError("modulus_functional: sigma in (0, 1]");
  if (!(C > 0.0)) throw ParameterError("modulus_functional: C must be positive");
  const double k = std::max(1.0, K);
  const double e = sigma / (3.0 * (sigma + 1.0));
  return C * k * k * std::exp(2.0 * L * lambda0) * std::pow(lambda0, -0.5 - 2.0 * sigma) *
         std::pow(-log_s, -e);
}

}  // namespace capxray
