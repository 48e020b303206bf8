#include "sck/valuefn.hpp"

#include "sck/csv.hpp"
#include "sck/errors.hpp"
#include "sck/reduction.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace sck {

PiecewiseValue::PiecewiseValue(Resolvent res, double c, double k_eff)
    : res_(std::move(res)), c_(c), k_(k_eff) {
  if (!(c > 0.0) || !std::isfinite(c)) throw InvalidInput("band threshold must be > 0");
  if (!(k_eff > 0.0)) throw InvalidInput("effective cost must be > 0");
  const double k = res_.rate();
  // -sigma^2 p''(c) / (2 rho cosh(kc)) == -p''(c) / (k^2 cosh(kc))
  a_ = -res_.curvature(c_) / (k * k * std::cosh(k * c_));
  edge_ = interior(c_);
}

PiecewiseValue PiecewiseValue::solve(Resolvent res, double k_eff, const ThresholdOptions& options) {
  const auto sol = solve_threshold(res, k_eff, options);
  return PiecewiseValue(std::move(res), sol.c, k_eff);
}

Jet PiecewiseValue::interior(double x) const {
  const double k = res_.rate();
  const Jet p = res_.eval(x);
  return {a_ * std::cosh(k * x) + p.value, a_ * k * std::sinh(k * x) + p.slope,
          a_ * k * k * std::cosh(k * x) + p.curvature};
}

Branch PiecewiseValue::branch(double x) const {
  if (x > c_) return Branch::kUpper;
  if (x < -c_) return Branch::kLower;
  return Branch::kInterior;
}

Jet PiecewiseValue::eval(double x) const {
  const double y = std::abs(x);
  if (y <= c_) {
    Jet j = interior(y);
    if (x < 0.0) j.slope = -j.slope;
    return j;
  }
  return {edge_.value + k_ * (y - c_), x > 0.0 ? k_ : -k_, 0.0};
}

HjbResidual hjb_residual_1d(const PiecewiseValue& pv, double x) {
  const auto& res = pv.resolvent();
  const Jet v = pv.eval(x);
  const double s = res.sigma_tilde();
  HjbResidual r;
  r.branch = pv.branch(x);
  r.interior = res.rho() * v.value - res.cost().value(x) - 0.5 * s * s * v.curvature;
  r.gradient = std::abs(v.slope) - pv.k_eff();
  r.max = std::max(r.interior, r.gradient);
  return r;
}

// ---------------------------------------------------------------------------

NashValue::NashValue(Resolvent res, double k, const ThresholdOptions& options)
    : k_(k), band_(PiecewiseValue::solve(std::move(res), k, options)) {}

double NashValue::v1(double d) const {
  const double c = band_.threshold();
  if (d <= -c) return band_.interior(-c).value;
  if (d <= c) return band_.interior(d).value;
  return k_ * (d - c) + band_.interior(c).value;
}

double NashValue::v1_slope(double d) const {
  const double c = band_.threshold();
  if (d < -c) return 0.0;
  if (d <= c) return band_.interior(d).slope;
  return k_;
}

std::pair<double, double> NashValue::eval(double x1, double x2) const {
  return {v1(x1 - x2), v1(x2 - x1)};
}

double NashValue::player_slope(double x1, double x2) const { return v1_slope(x1 - x2); }

ParetoValue2P::ParetoValue2P(Resolvent res, double k1, double k2, const ThresholdOptions& options)
    : band_(PiecewiseValue::solve(std::move(res), 0.5 * std::min(k1, k2), options)) {}

double pareto_value_2p(double x1, double x2, const Resolvent& res, double k1, double k2) {
  return ParetoValue2P(res, k1, k2).eval(x1, x2);
}

// ---------------------------------------------------------------------------

SeparableSolution::SeparableSolution(const InvestmentSpec& inv, const ThresholdOptions& options) {
  const auto products = reduce_central(inv);
  const auto thresholds = product_thresholds(inv, options);
  for (std::size_t j = 0; j < products.size(); ++j) {
    auto res = resolvent_build(*products[j].averaged_cost, products[j].sigma_tilde, inv.discount);
    values_.emplace_back(std::move(res), thresholds[j].c, thresholds[j].k_used);
    x0_.push_back(products[j].x0);
  }
}

double SeparableSolution::value(std::span<const double> x) const {
  if (x.size() != values_.size()) {
    throw InvalidInput(fmt::format("state has {} entries, expected {}", x.size(), values_.size()));
  }
  double v = 0.0;
  for (std::size_t j = 0; j < values_.size(); ++j) v += values_[j].eval(x[j]).value;
  return v;
}

// ---------------------------------------------------------------------------

double ProportionalCost::operator()(std::span<const double> y) const {
  if (y.size() != weight.size() || y.size() != k_plus.size() || y.size() != k_minus.size()) {
    throw InvalidInput("proportional cost dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    s += (y[i] >= 0.0) ? weight[i] * k_minus[i] * y[i] : -weight[i] * k_plus[i] * y[i];
  }
  return s;
}

double outside_band_value(std::span<const double> x, const Projection& pi,
                          const RegionValue& value_in_region, const ProportionalCost& l) {
  const auto px = pi(x);
  if (px.size() != x.size()) throw InvalidInput("projection changed the dimension");
  std::vector<double> jump(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) jump[i] = x[i] - px[i];
  return value_in_region(px) + l(jump);
}

double outside_band_value(double y, const PiecewiseValue& pv, double k_plus, double k_minus) {
  const double c = pv.threshold();
  const ProportionalCost l{{1.0}, {k_plus}, {k_minus}};
  const double x[1] = {y};
  return outside_band_value(
      x,
      [c](std::span<const double> p) { return std::vector<double>{std::clamp(p[0], -c, c)}; },
      [&pv](std::span<const double> p) { return pv.eval(p[0]).value; }, l);
}

Projection two_player_band_projection(double c, std::size_t acting_player) {
  if (acting_player > 1) throw InvalidInput("acting player must be 0 or 1");
  return [c, acting_player](std::span<const double> x) {
    if (x.size() != 2) throw InvalidInput("two-player projection needs a 2-vector");
    const double y = x[0] - x[1];
    const double yc = std::clamp(y, -c, c);
    std::vector<double> out{x[0], x[1]};
    if (acting_player == 0) {
      out[0] = x[1] + yc;
    } else {
      out[1] = x[0] - yc;
    }
    return out;
  };
}

void write_value_grid_csv(std::ostream& os, const PiecewiseValue& pv, double lo, double hi,
                          std::size_t n) {
  if (n < 2 || !(hi > lo)) throw InvalidInput("value grid needs n >= 2 and hi > lo");
  csv::Writer w(os);
  w.header({"x", "v", "dv", "d2v", "branch"});
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    const Jet j = pv.eval(x);
    w.row(x, j.value, j.slope, j.curvature, static_cast<int>(pv.branch(x)));
  }
}

}  // namespace sck
