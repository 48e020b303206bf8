#pragma once

#include "sck/model.hpp"

#include <vector>

namespace sck {

/// Solved free boundary of a symmetric band problem.
struct ThresholdSolution {
  double c = 0.0;
  double k_used = 0.0;
  double residual = 0.0;
  double lo = 0.0;  // F(lo) < 0
  double hi = 0.0;  // F(hi) > 0
  int iterations = 0;
};

struct ThresholdOptions {
  double tol = 1e-12;        // on |F(c)|
  double width_tol = 1e-12;  // bracket width at which iteration gives up
  int max_doublings = 64;
  int max_iterations = 400;
};

/// Smooth-pasting residual
///   F(x) = (p'(x) - K) / p''(x) - (sigma / sqrt(2 rho)) tanh(sqrt(2 rho) x / sigma).
/// Throws DegenerateError when p''(x) falls below half its lower bound.
double smoothing_residual(double x, const Resolvent& res, double k_eff);

/// Unique positive root of the smooth-pasting residual, bracketed from 0 and
/// refined with a bisection / regula falsi hybrid. For quadrature-backed
/// resolvents the residual tolerance is floored at 10x the quadrature tolerance.
ThresholdSolution solve_threshold(const Resolvent& res, double k_eff,
                                  const ThresholdOptions& options = {});

struct NashParetoGap {
  ThresholdSolution pareto;  // K/2
  ThresholdSolution nash;    // K
  double gap = 0.0;          // c2 - c1
};

/// Throws Error if the Nash band is not strictly wider.
NashParetoGap compare_nash_pareto(const Resolvent& res, double k,
                                  const ThresholdOptions& options = {});

/// Per-product thresholds b_j with K_eff = k*_j / M. Needs r_j = 0,
/// zero reduced drift and p*_j = q*_j.
std::vector<ThresholdSolution> product_thresholds(const InvestmentSpec& inv,
                                                  const ThresholdOptions& options = {});

}  // namespace sck
