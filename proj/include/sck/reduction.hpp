#pragma once

#include "sck/model.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace sck {

/// Central-controller view of one product: X^j = sum_i Y^{i,j} - D^j.
struct ReducedProduct {
  double x0 = 0.0;
  double drift = 0.0;              // sum_i mu_{i,j} - alpha_j
  std::vector<double> sigma_row;   // (sum_i sigma_{i,j}, -gamma_j e_j), length D + P
  double sigma_tilde = 0.0;        // per the spec's volatility convention
  double p_star = 0.0;             // min_i p_{i,j}
  double q_star = 0.0;             // min_i q_{i,j}
  std::size_t i_plus = 0;          // investor carrying all expansion
  std::size_t i_minus = 0;         // investor carrying all contraction
  std::optional<RunningCost> averaged_cost;  // (1/M) sum_i h_{i,j}
};

/// Ties on the minimal cost go to the lowest investor index.
std::vector<ReducedProduct> reduce_central(const InvestmentSpec& inv);

/// sum_j (r_j / M) (alpha_j / alpha^2 + d_j / alpha): the expected discounted
/// demand revenue that separates the full and reduced cost functionals.
double demand_constant(const InvestmentSpec& inv);

/// Piecewise-constant control increments on a uniform grid.
/// expand/contract are laid out [step][agent][product].
struct ControlPath {
  std::size_t agents = 1;
  std::size_t products = 1;
  std::size_t steps = 0;
  double dt = 0.0;
  std::vector<double> expand;
  std::vector<double> contract;

  ControlPath() = default;
  ControlPath(std::size_t agents, std::size_t products, std::size_t steps, double dt);

  std::size_t index(std::size_t step, std::size_t agent, std::size_t product) const noexcept {
    return (step * agents + agent) * products + product;
  }
  double& expand_at(std::size_t k, std::size_t i, std::size_t j) { return expand[index(k, i, j)]; }
  double& contract_at(std::size_t k, std::size_t i, std::size_t j) { return contract[index(k, i, j)]; }
  double expand_at(std::size_t k, std::size_t i, std::size_t j) const { return expand[index(k, i, j)]; }
  double contract_at(std::size_t k, std::size_t i, std::size_t j) const { return contract[index(k, i, j)]; }

  /// Throws InvalidInput on a negative or non-finite increment.
  void validate() const;
};

/// Assigns each product's expansion to i_plus and contraction to i_minus.
ControlPath lift_control(const ControlPath& reduced, std::span<const ReducedProduct> products,
                         std::size_t investors);

/// Sum over investors; the inverse direction of lift_control.
ControlPath aggregate_control(const ControlPath& full);

/// Brownian increments driving the investment model on one path.
struct InvestmentNoise {
  std::size_t steps = 0;
  double dt = 0.0;
  std::size_t production_dim = 0;   // D
  std::size_t demand_dim = 0;       // P
  std::vector<double> db;           // [step][D]
  std::vector<double> dw;           // [step][P]
};

InvestmentNoise sample_investment_noise(const InvestmentSpec& inv, std::size_t steps, double dt,
                                        std::uint64_t seed, std::uint64_t path);

struct PathCost {
  double total = 0.0;
  double demand_term = 0.0;  // -(sum_j r_j / M) int e^{-alpha t} D^j_t dt on this path
  std::vector<double> final_state;  // X^j at the horizon
};

/// Central controller's cost (1/M) sum_i J^i on one path, simulating every
/// investor's capacity and the demand. Running cost is trapezoidal, control
/// increments are discounted at the left end of their step.
PathCost full_model_cost(const InvestmentSpec& inv, const InvestmentNoise& noise,
                         const ControlPath& full);

/// Reduced cost on one path with the aggregated dynamics and the minimal
/// unit costs p*_j, q*_j. Satisfies full = reduced + demand_term pathwise for
/// lifted controls.
PathCost reduced_model_cost(const InvestmentSpec& inv, std::span<const ReducedProduct> products,
                            const InvestmentNoise& noise, const ControlPath& reduced);

struct TwoPlayerReduction {
  ReducedProblem1D problem;       // in y = x^1 - x^2
  std::size_t acting_player = 1;  // 0-based; the cheaper player
  bool policy_unique = true;      // false when K_1 == K_2
};

/// Two-player regulator problem to the band problem in y = x^1 - x^2 with
/// K_eff = L K_min. Needs equal weights, equal drifts and K^+ = K^- per player.
TwoPlayerReduction reduce_two_player(const GameSpec& spec, double x1 = 0.0, double x2 = 0.0);

}  // namespace sck
