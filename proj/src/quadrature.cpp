#include "capxray/quadrature.hpp"

#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>

#include <gsl/gsl_integration.h>

namespace capxray {

const GaussLegendre& gauss_legendre(int n) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<GaussLegendre>> cache;
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");

  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) {
    auto rule = std::make_unique<GaussLegendre>();
    gsl_integration_glfixed_table* table = gsl_integration_glfixed_table_alloc(n);
    rule->nodes.resize(n);
    rule->weights.resize(n);
    for (int i = 0; i < n; ++i) {
      gsl_integration_glfixed_point(-1.0, 1.0, i, &rule->nodes[i], &rule->weights[i], table);
    }
    gsl_integration_glfixed_table_free(table);
    slot = std::move(rule);
  }
  return *slot;
}

}  // namespace capxray
