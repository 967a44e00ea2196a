#pragma once

#include <vector>

namespace capxray {

/// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;

  [[nodiscard]] int size() const { return static_cast<int>(nodes.size()); }
};

/// Returns the n-point rule. Rules are cached per n; the cache is
/// thread-safe.
const GaussLegendre& gauss_legendre(int n);

/// Integrates f over [a, b] with the n-point rule.
template <class F>
auto integrate_gl(F&& f, double a, double b, int n) {
  const auto& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  decltype(f(mid)) sum = f(mid + half * rule.nodes[0]) * rule.weights[0];
  for (int q = 1; q < rule.size(); ++q) {
    sum += f(mid + half * rule.nodes[q]) * rule.weights[q];
  }
  return sum * half;
}

}  // namespace capxray
