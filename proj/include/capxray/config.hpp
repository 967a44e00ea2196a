#pragma once

/// \file
/// Experiment configuration for the command-line tool. Configs are JSON;
/// validation errors carry the file, the line and the JSON pointer of the
/// offending value.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "capxray/cgo.hpp"
#include "capxray/xray.hpp"

namespace capxray {

struct DomainConfig {
  double beta = 0.6;
  double beta_prime = 0.5;
  int cap_nu = 64;
  int cap_nv = 128;
  int n_psi = 64;
  int n_a = 32;
  int quad_nodes = 96;

  [[nodiscard]] SphericalCap cap() const { return {beta, beta_prime, 3}; }
  [[nodiscard]] RayGrid rays() const { return {cap(), n_psi, n_a}; }
  [[nodiscard]] CapGrid grid() const { return {beta, cap_nu, cap_nv}; }
};

/// Input pair of the transform command.
///   zero      f = 0, alpha = 0
///   constant  f = value, alpha = 0
///   random    random smooth pair from `seed` (config seed when absent)
///   file      gridded pair read from a field-pair CSV
/// For analytic kinds, support_height (in [beta', beta]) selects the cap the
/// pair is extended by zero from; it defaults to beta.
struct PairSpec {
  std::string kind = "zero";
  cplx value{1.0, 0.0};
  std::optional<std::uint64_t> seed;
  std::string file;
  std::optional<double> support_height;
};

struct TransformConfig {
  PairSpec pair;
  std::optional<double> lambda;  // first entry of `lambdas` when absent
};

struct AdjointConfig {
  std::string sinogram;  // path of a sinogram CSV
};

struct ProbeConfig {
  ProbeOptions options;
  double floor = 1e-8;
};

struct DbarCheckConfig {
  int n = 256;
  double radius = 1.0;
  cplx center{0.0, 0.0};
  int pad = 3;
};

struct FourierSplitConfig {
  int samples = 1024;
  double smoothness = 3.0;
  double beta = 0.5;
  std::vector<double> epsilons{1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
};

struct ModulusPlotConfig {
  std::string kind = "double_log";
  double sigma = 0.25;
  int rows = 200;
  double s_max = 1e-3;
  double log_s_max = 1e6;  // largest |log s| sampled
};

struct ExperimentConfig {
  std::filesystem::path source;
  DomainConfig domain;
  VectorPotential potential;
  std::vector<double> lambdas{0.0};
  std::string output_dir = "capxray-out";
  std::uint64_t seed = 20240607;
  int jobs = 1;
  TransformConfig transform;
  AdjointConfig adjoint;
  ProbeConfig probe;
  DbarCheckConfig dbar_check;
  FourierSplitConfig fourier_split;
  ModulusPlotConfig modulus_plot;
  std::map<std::string, double> tolerances;  // identity-suite overrides

  [[nodiscard]] double tolerance(const std::string& check, double fallback) const;
};

/// Line (1-based) of the value at each JSON pointer of a document.
std::map<std::string, int> json_pointer_lines(const std::string& text);

/// Parses and validates a config document. `source` names the document in
/// error messages. Throws ConfigError.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& source);

/// Reads and parses a config file. Throws ConfigError (including for a
/// missing or unreadable file).
ExperimentConfig load_config(const std::filesystem::path& path);

}  // namespace capxray
