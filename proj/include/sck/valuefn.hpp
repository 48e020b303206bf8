#pragma once

#include "sck/model.hpp"
#include "sck/thresholds.hpp"

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace sck {

/// Which piece of a band value function a point falls in.
enum class Branch : int { kLower = -1, kInterior = 0, kUpper = 1 };

/// Even, C^2 band value: A cosh(k x) + p(x) for |x| <= c and linear with
/// slope +-K outside, A = -sigma^2 p''(c) / (2 rho cosh(k c)), k = sqrt(2 rho)/sigma.
class PiecewiseValue {
 public:
  PiecewiseValue(Resolvent res, double c, double k_eff);
  /// Solves the threshold first.
  static PiecewiseValue solve(Resolvent res, double k_eff, const ThresholdOptions& options = {});

  Jet eval(double x) const;
  /// The cosh-plus-resolvent formula at any x, ignoring the band.
  Jet interior(double x) const;
  Branch branch(double x) const;

  double threshold() const noexcept { return c_; }
  double cosh_coefficient() const noexcept { return a_; }
  double k_eff() const noexcept { return k_; }
  const Resolvent& resolvent() const noexcept { return res_; }

 private:
  Resolvent res_;
  double c_;
  double k_;
  double a_;
  Jet edge_;  // interior(c)
};

inline Jet value_eval(const PiecewiseValue& pv, double x) { return pv.eval(x); }

/// Signed branch residuals of max{rho v - h - (sigma^2/2) v'', |v'| - K} = 0.
struct HjbResidual {
  double interior = 0.0;  // rho v - h - (sigma^2/2) v''
  double gradient = 0.0;  // |v'| - K
  double max = 0.0;
  Branch branch = Branch::kInterior;
};

HjbResidual hjb_residual_1d(const PiecewiseValue& pv, double x);

/// Nash values of the symmetric two-player game (common cost K).
class NashValue {
 public:
  NashValue(Resolvent res, double k, const ThresholdOptions& options = {});

  /// (v^1, v^2)
  std::pair<double, double> eval(double x1, double x2) const;
  /// d v^1 / d x^1
  double player_slope(double x1, double x2) const;
  double threshold() const noexcept { return band_.threshold(); }
  double k() const noexcept { return k_; }

 private:
  double v1(double d) const;
  double v1_slope(double d) const;

  double k_;
  PiecewiseValue band_;  // carries c2 and the cosh coefficient
};

inline std::pair<double, double> nash_value_eval(double x1, double x2, const NashValue& nv) {
  return nv.eval(x1, x2);
}

/// Regulator's value v(x^1, x^2) = u(x^1 - x^2) with K_eff = min(K1, K2) / 2.
class ParetoValue2P {
 public:
  ParetoValue2P(Resolvent res, double k1, double k2, const ThresholdOptions& options = {});
  double eval(double x1, double x2) const { return band_.eval(x1 - x2).value; }
  const PiecewiseValue& band() const noexcept { return band_; }

 private:
  PiecewiseValue band_;
};

double pareto_value_2p(double x1, double x2, const Resolvent& res, double k1, double k2);

/// Sum of per-product band values for a separable investment problem.
class SeparableSolution {
 public:
  explicit SeparableSolution(const InvestmentSpec& inv, const ThresholdOptions& options = {});
  double value(std::span<const double> x) const;
  const std::vector<PiecewiseValue>& products() const noexcept { return values_; }
  const std::vector<double>& initial_state() const noexcept { return x0_; }

 private:
  std::vector<PiecewiseValue> values_;
  std::vector<double> x0_;
};

inline double separable_value(const SeparableSolution& sol, std::span<const double> x) {
  return sol.value(x);
}

/// l(y) = sum_i l_i(y_i) with l_i(y) = L_i K_i^- y for y >= 0, -L_i K_i^+ y otherwise.
struct ProportionalCost {
  std::vector<double> weight;
  std::vector<double> k_plus;
  std::vector<double> k_minus;
  double operator()(std::span<const double> y) const;
};

using Projection = std::function<std::vector<double>(std::span<const double>)>;
using RegionValue = std::function<double(std::span<const double>)>;

/// v(x) = v(pi(x)) + l(x - pi(x)).
double outside_band_value(std::span<const double> x, const Projection& pi,
                          const RegionValue& value_in_region, const ProportionalCost& l);

/// One-dimensional band: pi clamps to [-c, c].
double outside_band_value(double y, const PiecewiseValue& pv, double k_plus, double k_minus);

/// Projection onto {|x^1 - x^2| <= c} moving only the acting player's coordinate.
Projection two_player_band_projection(double c, std::size_t acting_player);

/// CSV with header x,v,dv,d2v,branch on n evenly spaced points of [lo, hi].
void write_value_grid_csv(std::ostream& os, const PiecewiseValue& pv, double lo, double hi,
                          std::size_t n);

}  // namespace sck
