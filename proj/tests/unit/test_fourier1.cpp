#include <cmath>
#include <random>

#include "doctest.h"

#include "capxray/fourier1.hpp"

using namespace capxray;

TEST_SUITE("fourier1") {

TEST_CASE("coefficients of single modes") {
  const auto F = CircleFunction::sample([](double p) { return std::exp(cplx(0.0, 3.0 * p)); }, 64, 2.0);
  const CoefficientTable c = coefficients(F);
  for (int k = -32; k <= 32; ++k) CHECK(std::abs(c.at(k) - (k == 3 ? 1.0 : 0.0)) < 1e-14);
  const auto G = CircleFunction::sample([](double p) { return cplx(std::cos(32.0 * p)); }, 64, 2.0);
  const CoefficientTable d = coefficients(G);
  CHECK(std::abs(d.at(32) - 0.5) < 1e-14);
  CHECK(std::abs(d.at(-32) - 0.5) < 1e-14);
}

TEST_CASE("synthesis inverts analysis") {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> N;
  CircleFunction F;
  F.smoothness = 1.0;
  for (int j = 0; j < 128; ++j) F.samples.push_back({N(rng), N(rng)});
  const CircleFunction G = from_coefficients(coefficients(F), 1.0);
  for (int j = 0; j < 128; ++j) CHECK(std::abs(G.samples[j] - F.samples[j]) < 1e-12);
}

TEST_CASE("sample counts and smoothness are validated") {
  CHECK_THROWS_AS(CircleFunction::sample([](double) { return cplx{}; }, 48, 2.0), ValidationError);
  CHECK_THROWS_AS(CircleFunction::sample([](double) { return cplx{}; }, 32, 2.0), ValidationError);
  CHECK_THROWS_AS(CircleFunction::sample([](double) { return cplx{}; }, 64, 0.5), ValidationError);
}

TEST_CASE("split separates negative frequencies") {
  const auto F = CircleFunction::sample(
      [](double p) { return std::exp(cplx(0.0, -2.0 * p)) + 0.5 * std::exp(cplx(0.0, p)) + 0.25; }, 64, 3.0);
  const SplitResult r = split(F, 1e-2, 0.5);
  CHECK(std::abs(r.anti_part[1] - 1.0) < 1e-14);
  CHECK(std::abs(r.holo_part[1] - 0.5) < 1e-14);
  CHECK(std::abs(r.holo_part[0] - 0.25) < 1e-14);
  CHECK(r.anti_norm == doctest::Approx(std::pow(5.0, 0.25)));
  CHECK(r.truncation_N == 4);
  CHECK_THROWS_AS(split(F, 1e-2, 2.5), ParameterError);
  CHECK_THROWS_AS(split(F, 1.5, 0.5), ParameterError);
}

TEST_CASE("truncation and decay exponent") {
  CHECK(split_truncation(1e-2, 0.5, 3.0) == 4);
  CHECK(split_truncation(1e-6, 0.5, 3.0) == 32);
  CHECK(split_decay_exponent(0.5, 3.0) == doctest::Approx(0.25));
}

TEST_CASE("log perturbation bound") {
  const LogBoundCheck c = log_perturbation_bound(0.4);
  CHECK(c.lhs == doctest::Approx(std::log(1.4)));
  CHECK(c.bound == doctest::Approx(0.8));
  CHECK(c.holds);
  CHECK(log_perturbation_bound(0.0).holds);
  CHECK_THROWS_AS(log_perturbation_bound(cplx(0.0, 0.5)), DomainError);
}

TEST_CASE("logarithmic moduli") {
  const double s = std::exp(-std::exp(std::exp(1.0)));
  CHECK(modulus(ModulusKind::double_log, s, 0.25) == doctest::Approx(std::exp(-1.0 / 15.0)));
  CHECK(modulus(ModulusKind::double_log, s, 0.25) == doctest::Approx(0.9355).epsilon(1e-4));
  CHECK(modulus_domain_limit(ModulusKind::triple_log) == doctest::Approx(std::exp(-std::exp(1.0))));
  CHECK_THROWS_AS(modulus(ModulusKind::single_log, 1.0, 0.25), DomainError);
  CHECK_THROWS_AS(modulus(ModulusKind::double_log, 0.5, 0.25), DomainError);
  CHECK_THROWS_AS(modulus(ModulusKind::single_log, 0.5, 0.0), ParameterError);
  CHECK(parse_modulus_kind(to_string(ModulusKind::triple_log)) == ModulusKind::triple_log);
  CHECK_THROWS_AS(parse_modulus_kind("quad_log"), ParameterError);
  double prev = 0.0;
  for (double e = -30.0; e < -1.5; e += 0.5) {
    const double v = modulus(ModulusKind::double_log, std::exp(e), 0.5);
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("modulus functional") {
  const double v = modulus_functional_log(-std::exp(8.0), 1.0, 1.0, 1.0, 1.0, 1.0);
  CHECK(v == doctest::Approx(std::exp(2.0) * std::exp(-4.0 / 3.0)));
  CHECK(v == doctest::Approx(1.948).epsilon(1e-3));
  CHECK(modulus_functional(1e-8, 2.0, 0.5, 1.0, 0.5, 1.0) <
        modulus_functional(1e-4, 2.0, 0.5, 1.0, 0.5, 1.0));
  CHECK_THROWS_AS(modulus_functional(1e-3, 1.0, 1.5, 1.0, 0.5, 1.0), ParameterError);
  CHECK_THROWS_AS(modulus_functional(1.0, 1.0, 0.5, 1.0, 0.5, 1.0), DomainError);
}

}  // TEST_SUITE
