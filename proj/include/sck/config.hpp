#pragma once

#include "sck/model.hpp"
#include "sck/sde.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace sck {

/// Quadratic running cost a (x - center)^2 + offset.
struct CostConfig {
  double curvature = 1.0;
  double center = 0.0;
  double offset = 0.0;
  bool operator==(const CostConfig&) const = default;
  RunningCost build() const;
};

/// Two players with costs of x^1 - x^2; lists have one entry per player.
struct TwoPlayerConfig {
  double rho = 1.0;
  std::string convention = "joint";  // joint | difference
  std::vector<double> drift;
  std::vector<std::vector<double>> sigma;
  std::vector<double> k_plus;
  std::vector<double> k_minus;
  std::vector<double> weights;
  std::vector<CostConfig> costs;
  std::vector<double> x0;
  bool operator==(const TwoPlayerConfig&) const = default;
  GameSpec build() const;
};

/// A reduced band problem given directly.
struct SingleConfig {
  double rho = 1.0;
  double sigma_tilde = 1.0;
  double k_plus = 0.5;
  double k_minus = 0.5;
  double drift = 0.0;
  CostConfig cost;
  double x0 = 0.0;
  bool operator==(const SingleConfig&) const = default;
  ReducedProblem1D build() const;
};

struct SeparableConfig {
  double discount = 1.0;
  std::string convention = "joint";
  std::size_t investors = 0;
  std::size_t products = 0;
  std::size_t brownian_dim = 0;
  std::vector<std::vector<double>> y;
  std::vector<std::vector<double>> mu;
  std::vector<std::vector<std::vector<double>>> sigma;
  std::vector<std::vector<double>> p;
  std::vector<std::vector<double>> q;
  std::vector<std::vector<CostConfig>> costs;
  std::vector<double> profit;
  std::vector<double> demand_drift;
  std::vector<double> demand_vol;
  std::vector<double> demand0;
  bool operator==(const SeparableConfig&) const = default;
  InvestmentSpec build() const;
};

/// N banks with the interbank joint cost.
struct InterbankConfig {
  double rho = 1.0;
  std::vector<double> kappa;
  std::vector<double> nu;
  std::vector<double> a;
  std::vector<double> weights;
  std::vector<double> drift;
  std::vector<std::vector<double>> sigma;
  std::vector<double> k_plus;
  std::vector<double> k_minus;
  bool operator==(const InterbankConfig&) const = default;
  GameSpec build() const;
};

using ProblemConfig = std::variant<TwoPlayerConfig, SingleConfig, SeparableConfig, InterbankConfig>;

struct SolverSection {
  double tol = 1e-12;
  std::size_t grid = 801;  // nodes per axis for value grids and FD
  double domain = 4.0;     // FD domain [-domain, domain]
  bool fd_fallback = true;
  std::size_t levels = 3;  // refinement levels for verify
  bool operator==(const SolverSection&) const = default;
};

struct SimSection {
  double dt = 1e-3;
  double horizon = 12.0;
  std::size_t paths = 10000;
  bool antithetic = false;
  std::string policy = "pareto";  // pareto | nash | custom
  std::string split = "paper";    // paper | single
  double band = 0.0;              // half-width for the custom policy
  std::size_t record_paths = 4;
  std::size_t record_stride = 100;
  bool operator==(const SimSection&) const = default;
  SimConfig build(std::uint64_t seed) const;
};

struct SweepSection {
  std::vector<double> k = {0.25, 0.5, 1.0, 2.0, 4.0};
  bool operator==(const SweepSection&) const = default;
};

struct RunConfig {
  std::string task = "solve";
  std::uint64_t seed = 1;
  std::string out = "out";
  ProblemConfig problem;
  SolverSection solver;
  SimSection sim;
  SweepSection sweep;
  bool operator==(const RunConfig&) const = default;

  /// Checks the schema and that the problem builds. Throws ConfigError.
  void validate() const;
};

std::string problem_kind(const ProblemConfig& p);

/// Strict parse: unknown keys, wrong types and missing required keys throw
/// ConfigError.
RunConfig parse_config(const nlohmann::json& j);
RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Every field, defaults included; parse_config(to_json(c)) == c.
nlohmann::json to_json(const RunConfig& c);

}  // namespace sck
