#pragma once

/// \file
/// Fourier series on the circle, the split of a function into its
/// negative-frequency part and the rest, the log(1+z) perturbation bound and
/// the logarithmic moduli of continuity.

#include <functional>
#include <string>
#include <vector>

#include "capxray/types.hpp"

namespace capxray {

/// Samples F(phi_j), phi_j = 2 pi j / N, with a declared Sobolev smoothness m.
struct CircleFunction {
  std::vector<cplx> samples;
  double smoothness = 1.0;

  /// Throws ValidationError unless N is a power of two >= 64 and m > 1/2.
  void validate() const;
  [[nodiscard]] int size() const { return static_cast<int>(samples.size()); }

  static CircleFunction sample(const std::function<cplx(double)>& f, int n, double m);
};

/// c_k for -N/2 <= k <= N/2 with F = sum c_k e^{ik phi}. The Nyquist bin is
/// shared equally between k = N/2 and k = -N/2.
struct CoefficientTable {
  int n = 0;
  std::vector<cplx> c;  // c[k + n/2]

  [[nodiscard]] int max_k() const { return n / 2; }
  [[nodiscard]] cplx at(int k) const;
  [[nodiscard]] cplx& at(int k);

  /// sum <k>^{2s} |c_k|^2 over the table, <k> = (1 + k^2)^{1/2}, square-rooted.
  [[nodiscard]] double hs_norm(double s) const;
  /// Values at the N sample angles.
  [[nodiscard]] std::vector<cplx> synthesize() const;
};

CoefficientTable coefficients(const CircleFunction& F);

/// Inverse of coefficients(): samples of sum c_k e^{ik phi}.
CircleFunction from_coefficients(const CoefficientTable& table, double smoothness);

struct SplitResult {
  std::vector<cplx> anti_part;  // anti_part[k - 1] = c_{-k}, k >= 1
  std::vector<cplx> holo_part;  // holo_part[k] = c_k, k >= 0
  int truncation_N = 0;
  double epsilon = 0.0;
  double beta = 0.0;
  double anti_norm = 0.0;  // H^beta norm of the negative-frequency series

  [[nodiscard]] CoefficientTable anti_table() const;
  [[nodiscard]] CoefficientTable holo_table() const;
};

/// N(eps) = ceil(eps^{(theta~ - 2)/(2(1 + beta) + 1)}) with
/// theta~ = -(2(-m + beta) + 1)/(m + 1).
int split_truncation(double epsilon, double beta, double m);

/// (m - 1/2 - beta) / (2 (m + 1)).
double split_decay_exponent(double beta, double m);

/// Throws ParameterError unless 0 < eps < 1 and 0 < beta < m - 1/2.
SplitResult split(const CircleFunction& F, double epsilon, double beta);

struct LogBoundCheck {
  cplx z;
  double lhs = 0.0;    // |log(1 + z)|
  double bound = 0.0;  // 2 |z|
  bool holds = false;
};

/// Principal-branch check of |log(1+z)| < 2|z| (z = 0 counts as holding).
/// Throws DomainError for |z| >= 1/2.
LogBoundCheck log_perturbation_bound(cplx z);

enum class ModulusKind { single_log, double_log, triple_log };
ModulusKind parse_modulus_kind(const std::string& s);
std::string to_string(ModulusKind k);

/// |log s|^{-e}, |log|log s||^{-e}, |log|log|log s|||^{-e} with
/// e = sigma / (3 (sigma + 1)). Throws DomainError unless s lies below the
/// point where the innermost logarithm exceeds 1 (1, e^{-1}, e^{-e}).
double modulus(ModulusKind kind, double s, double sigma);
/// Largest admissible s for the kind.
double modulus_domain_limit(ModulusKind kind);

/// C max(1,K)^2 e^{2 L lambda0} lambda0^{-1/2-2 sigma} |log s|^{-sigma/(3(sigma+1))}.
double modulus_functional(double s, double K, double lambda0, double L, double sigma, double C);
/// The same with s given through log s, for s below the double range.
double modulus_functional_log(double log_s, double K, double lambda0, double L, double sigma,
                              double C);

}  // namespace capxray
