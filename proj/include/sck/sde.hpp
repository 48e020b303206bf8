#pragma once

#include "sck/model.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sck {

struct SimConfig {
  double dt = 1e-3;
  double horizon = 12.0;
  std::size_t n_paths = 10000;
  std::uint64_t seed = 1;
  bool antithetic = false;  // pairs (2m, 2m+1) share a stream with negated normals

  std::size_t steps() const;
  /// e^{-rho T}
  double discount_truncation(double rho) const;
  void validate() const;
};

/// One reflected path on the simulation grid. x[0] is the state after any
/// initial jump; xi_plus / xi_minus are cumulative and include that jump.
struct ReflectedPath {
  std::vector<double> x;
  std::vector<double> xi_plus;   // pushes up, acts at -c
  std::vector<double> xi_minus;  // pushes down, acts at +c
};

/// Discrete two-sided Skorokhod map of x0 + cumsum(increments) on [-c, c].
ReflectedPath skorokhod_map_1d(std::span<const double> increments, double c, double x0);

/// Discounted cost of one reflected path: trapezoidal running cost plus
/// control increments discounted at the left end of their step.
double reflected_path_cost(const ReflectedPath& path, const RunningCost& h, double rho, double dt,
                           double k_plus, double k_minus);

struct CostEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // NaN when it cannot be estimated (one path or one pair)
  double truncation_bound = 0.0;  // h_max e^{-rho T} / rho over the band
  std::size_t n_paths = 0;
  std::vector<double> path_costs;

  bool has_std_error() const;
};

/// Mean and standard error of per-path values, summed in path order.
/// With antithetic pairing the error is taken over pair means.
CostEstimate summarize_costs(std::vector<double> costs, bool antithetic);

/// Monte Carlo estimate of the band policy cost for the reduced problem
/// (drift, sigma_tilde, rho, K+-, h, x0) with band [-c, c].
/// Paths run in parallel; each owns the stream (seed, path), so the result is
/// bit-identical for any thread count.
CostEstimate estimate_cost(const SimConfig& config, const ReducedProblem1D& problem, double c);

/// Reference implementation: materializes every driver path, runs
/// skorokhod_map_1d and reflected_path_cost one path at a time.
CostEstimate estimate_cost_serial(const SimConfig& config, const ReducedProblem1D& problem,
                                  double c);

/// Sampled paths for export: states and cumulative controls per dimension.
struct RecordedPaths {
  double dt = 0.0;
  std::size_t dim = 1;
  std::size_t stride = 1;  // steps between stored rows
  struct Path {
    std::vector<double> state;     // [row][dim]
    std::vector<double> xi_plus;   // [row][dim]
    std::vector<double> xi_minus;  // [row][dim]
  };
  std::vector<Path> paths;
};

/// The first n_record paths of estimate_cost, reproduced from the same streams.
RecordedPaths record_reflected_paths(const SimConfig& config, const ReducedProblem1D& problem,
                                     double c, std::size_t n_record, std::size_t stride = 1);

// ---------------------------------------------------------------------------
// Two players

enum class PolicyKind { kPareto, kNash, kCustomBand };

/// How control is attributed when both players have the same cost.
enum class ControlSplit {
  kPaper,         // player 1 contracts at the upper edge, player 2 at the lower edge
  kSinglePlayer,  // player 2 does everything
};

struct TwoPlayerPolicy {
  PolicyKind kind = PolicyKind::kPareto;
  double c = 0.0;  // used by kCustomBand only
  ControlSplit split = ControlSplit::kPaper;
};

/// "pareto" | "nash" | "custom"; throws InvalidInput otherwise.
PolicyKind parse_policy(std::string_view name);
std::string_view policy_name(PolicyKind kind);

/// A policy resolved to a band half-width and per-edge acting players.
struct ResolvedBand {
  double c = 0.0;
  std::size_t upper_actor = 0;  // 0-based player acting at y = +c
  std::size_t lower_actor = 1;  // 0-based player acting at y = -c
};

/// Pareto: c1 with K_eff = L K_min, the cheaper player acts at both edges.
/// Nash: c2 with K_eff = K (needs K_1 = K_2), paper split.
ResolvedBand resolve_band(const GameSpec& spec, const TwoPlayerPolicy& policy);

struct TwoPlayerStats {
  ResolvedBand band;
  CostEstimate player[2];    // J^i
  CostEstimate aggregate;    // sum_i L_i J^i
  double max_abs_y = 0.0;    // over all paths and steps t > 0
  double max_xi[2] = {0.0, 0.0};  // largest total control of each player on any path
  CostEstimate dispersion;   // time average of y^2 over [T/2, T]
};

struct TwoPlayerBatch {
  std::vector<TwoPlayerStats> policies;
  /// Standard error of the paired difference aggregate[a] - aggregate[b]
  /// for the first two policies (shared noise); NaN with fewer than two.
  double paired_diff_std_error = 0.0;
  RecordedPaths samples;  // first policy, state (X^1, X^2)
};

/// Simulates X^1, X^2 driven by their own rows of the Brownian motion under
/// each policy on shared noise. y = X^1 - X^2 is reflected onto the band by
/// moving only the acting player's coordinate.
TwoPlayerBatch simulate_two_player(const GameSpec& spec, std::span<const TwoPlayerPolicy> policies,
                                   const SimConfig& config, std::array<double, 2> x0 = {0.0, 0.0},
                                   std::size_t n_record = 0, std::size_t stride = 1);

/// Single-policy convenience overload.
TwoPlayerStats simulate_two_player(const GameSpec& spec, const TwoPlayerPolicy& policy,
                                   const SimConfig& config);

// ---------------------------------------------------------------------------
// Separable products

struct SeparableBatch {
  std::vector<CostEstimate> products;
  CostEstimate total;
  double demand_adjustment = 0.0;  // subtracted from the total when enabled
};

/// Independent reflected simulations per product with the reduced dynamics
/// and K+ = p*_j / M, K- = q*_j / M. Product j uses streams derived from
/// (seed, j). With include_demand the expected demand revenue is subtracted.
SeparableBatch simulate_separable(const InvestmentSpec& inv, std::span<const double> thresholds,
                                  const SimConfig& config, bool include_demand = false);

// ---------------------------------------------------------------------------
// Benchmark rate

struct BenchmarkSeries {
  std::vector<double> xbar;
  double mean = 0.0;
  double variance = 0.0;         // of xbar over time
  double spread_variance = 0.0;  // mean over i and t of (X^i - xbar)^2
};

/// paths[i][t] is player i's spread; weights must be nonnegative and sum to 1
/// (empty means uniform).
BenchmarkSeries benchmark_series(std::span<const std::vector<double>> paths,
                                 std::span<const double> weights);

// ---------------------------------------------------------------------------
// CSV

struct StatRow {
  std::string stat;
  double value = 0.0;
  double std_error = 0.0;  // NaN prints as NA
};

/// Header stat,value,stderr.
void write_stats_csv(std::ostream& os, std::span<const StatRow> rows);

/// Header path_id,t,x_1..x_n,xi_plus_1..,xi_minus_1..
void write_paths_csv(std::ostream& os, const RecordedPaths& rec);

}  // namespace sck
