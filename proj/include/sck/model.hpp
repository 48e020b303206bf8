#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sck {

/// Value and first two derivatives of a scalar function at one point.
struct Jet {
  double value = 0.0;
  double slope = 0.0;
  double curvature = 0.0;
};

/// Convex running cost h of a scalar state.
///
/// Quadratic costs are h(x) = a (x - s0)^2 + offset. Custom costs carry a
/// user supplied (h, h', h'') triple and declared curvature bounds
/// c_lo <= h'' <= c_hi.
class RunningCost {
 public:
  enum class Kind { kQuadratic, kCustom };
  using Fn = std::function<double(double)>;

  static RunningCost quadratic(double curvature, double center = 0.0,
                               double offset = 0.0);
  static RunningCost custom(Fn h, Fn dh, Fn d2h, double c_lo, double c_hi,
                            double center = 0.0);
  /// sum_k w_k h_k; stays quadratic when every term is.
  static RunningCost weighted_sum(std::span<const RunningCost> costs,
                                  std::span<const double> weights);

  Kind kind() const noexcept { return kind_; }
  bool is_quadratic() const noexcept { return kind_ == Kind::kQuadratic; }

  double value(double x) const;
  double slope(double x) const;
  double curvature(double x) const;
  Jet jet(double x) const { return {value(x), slope(x), curvature(x)}; }

  double curvature_lo() const noexcept { return c_lo_; }
  double curvature_hi() const noexcept { return c_hi_; }
  double center() const noexcept { return center_; }

  // Quadratic parameters; meaningless for custom costs.
  double quad_curvature() const noexcept { return a_; }
  double quad_offset() const noexcept { return offset_; }

  /// Samples h'' on [center - span, center + span] and throws
  /// DegenerateError if it leaves [c_lo, c_hi] (relative slack 1e-9).
  void check_curvature_bounds(double span = 10.0, int samples = 201) const;
  /// Max of |h(center + x) - h(center - x)| over sampled x in [0, span].
  double symmetry_defect(double span = 10.0, int samples = 101) const;

 private:
  RunningCost() = default;

  Kind kind_ = Kind::kQuadratic;
  double a_ = 0.0;
  double offset_ = 0.0;
  double center_ = 0.0;
  double c_lo_ = 0.0;
  double c_hi_ = 0.0;
  Fn h_, dh_, d2h_;
};

/// Joint running cost H on R^N with gradient and Hessian.
struct JointCost {
  std::function<double(const Eigen::VectorXd&)> value;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> gradient;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> hessian;
  std::size_t dim = 0;
};

/// How the two coexisting definitions of the effective volatility are read.
enum class VolatilityConvention {
  kJoint,       ///< sqrt of the sum of all squared entries of the rows
  kDifference,  ///< norm of the driver row actually seen by the reduced state
};

/// How per-player costs enter the aggregate running cost.
enum class CostForm {
  kDifference,  ///< N = 2, h_i(x^1 - x^2)
  kOwnState,    ///< h_i(x^i)
  kJoint,       ///< a single joint H
};

struct Player {
  double drift = 0.0;
  std::vector<double> sigma;  // row of length D
  double k_plus = 1.0;        // cost per unit of upward control
  double k_minus = 1.0;       // cost per unit of downward control
  double weight = 0.5;        // welfare weight L_i
  RunningCost cost = RunningCost::quadratic(1.0);
};

/// Full N-player problem data.
struct GameSpec {
  double rho = 1.0;
  std::vector<Player> players;
  std::vector<double> benchmark_weights;  // a_i, empty means uniform
  CostForm cost_form = CostForm::kDifference;
  std::optional<JointCost> joint;
  VolatilityConvention convention = VolatilityConvention::kJoint;

  std::size_t n() const noexcept { return players.size(); }
  std::size_t brownian_dim() const noexcept {
    return players.empty() ? 0 : players.front().sigma.size();
  }
  /// sigma sigma^T (N x N).
  Eigen::MatrixXd covariance() const;
  /// Aggregate H(x) = sum_i L_i H^i(x) evaluated per the cost form.
  double aggregate_cost(const Eigen::VectorXd& x) const;
  Eigen::MatrixXd aggregate_hessian(const Eigen::VectorXd& x) const;
  /// Throws InvalidInput / DegenerateError when an invariant fails.
  void validate() const;
};

/// M investors producing P products, indexed [investor][product].
struct InvestmentSpec {
  std::size_t investors = 0;
  std::size_t products = 0;
  std::size_t brownian_dim = 0;  // dimension of the production noise B

  std::vector<std::vector<double>> y;      // initial capacities
  std::vector<std::vector<double>> mu;     // capacity drifts
  std::vector<std::vector<std::vector<double>>> sigma;  // rows of length D
  std::vector<std::vector<double>> p;      // expansion costs
  std::vector<std::vector<double>> q;      // contraction costs
  std::vector<std::vector<RunningCost>> costs;  // separable h_{i,j}

  std::vector<double> profit;        // r_j
  std::vector<double> demand_drift;  // alpha_j
  std::vector<double> demand_vol;    // gamma_j
  std::vector<double> demand0;       // d_j
  double discount = 1.0;             // alpha

  VolatilityConvention convention = VolatilityConvention::kJoint;

  void validate() const;
};

/// One-dimensional band problem all closed forms reduce to.
struct ReducedProblem1D {
  double sigma_tilde = 1.0;
  double rho = 1.0;
  double k_plus = 0.5;   // effective cost of pushing up
  double k_minus = 0.5;  // effective cost of pushing down
  double drift = 0.0;
  RunningCost cost = RunningCost::quadratic(1.0);
  double x0 = 0.0;

  bool symmetric_costs() const noexcept { return k_plus == k_minus; }
  void validate() const;
};

struct ResolventOptions {
  double abs_tol = 1e-10;
  unsigned max_depth = 18;
  bool force_quadrature = false;  // bypass the quadratic closed form
};

/// Expected discounted running cost of the uncontrolled diffusion,
/// p(x) = E int_0^inf e^{-rho t} h(x + sigma B_t) dt, with p' and p''.
class Resolvent {
 public:
  Resolvent(RunningCost cost, double sigma_tilde, double rho,
            ResolventOptions options = {});

  double value(double x) const { return eval(x).value; }
  double slope(double x) const { return eval(x).slope; }
  double curvature(double x) const { return eval(x).curvature; }
  Jet eval(double x) const;

  const RunningCost& cost() const noexcept { return cost_; }
  double sigma_tilde() const noexcept { return sigma_; }
  double rho() const noexcept { return rho_; }
  /// Decay rate sqrt(2 rho) / sigma of the Green kernel.
  double rate() const noexcept { return rate_; }
  bool closed_form() const noexcept { return closed_form_; }
  const ResolventOptions& options() const noexcept { return options_; }

 private:
  double convolve(const RunningCost::Fn& f, double x, double c0,
                  double c1, double c2) const;

  RunningCost cost_;
  double sigma_;
  double rho_;
  double rate_;
  bool closed_form_;
  ResolventOptions options_;
};

double effective_volatility(
    std::span<const std::vector<double>> rows,
    VolatilityConvention convention = VolatilityConvention::kJoint);

Resolvent resolvent_build(const RunningCost& cost, double sigma_tilde,
                          double rho, ResolventOptions options = {});

/// H(x) = sum_i L_i [kappa_i (x^i - sum_{j != i} a_j x^j)^2 + nu_i (x^i)^2].
JointCost interbank_running_cost(std::span<const double> kappa,
                                 std::span<const double> nu,
                                 std::span<const double> a,
                                 std::span<const double> weights);

struct AssumptionCheck {
  std::string name;
  bool passed = false;
  std::string witness;  // where/why it failed, or the fitted constant
  double value = 0.0;   // fitted constant or offending value
};

struct AssumptionReport {
  std::vector<AssumptionCheck> checks;
  bool all_passed() const;
  const AssumptionCheck* find(const std::string& name) const;
};

struct AssumptionSampling {
  double radius = 3.0;
  int points_per_axis = 9;  // capped so the grid stays below ~20k samples
};

/// Samples the aggregate running cost and reports nonnegativity, quadratic
/// growth and directional curvature bounds. Never throws on a failed check.
AssumptionReport validate_assumptions(const GameSpec& spec,
                                      AssumptionSampling sampling = {});

}  // namespace sck
