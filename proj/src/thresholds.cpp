#include "sck/thresholds.hpp"

#include "sck/errors.hpp"
#include "sck/reduction.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <string>

namespace sck {

double smoothing_residual(double x, const Resolvent& res, double k_eff) {
  const Jet p = res.eval(x);
  const double floor = 0.5 * res.cost().curvature_lo() / res.rho();
  if (!(p.curvature > 0.0) || p.curvature < floor) {
    throw DegenerateError(fmt::format("p''({}) = {} below the curvature floor {}", x,
                                      p.curvature, floor));
  }
  const double k = res.rate();
  return (p.slope - k_eff) / p.curvature - std::tanh(k * x) / k;
}

namespace {

void require_symmetric(const Resolvent& res) {
  const auto& h = res.cost();
  if (h.center() != 0.0) {
    throw UnsupportedCase(fmt::format(
        "closed-form thresholds need a cost symmetric about 0 (center is {})", h.center()));
  }
  if (!h.is_quadratic()) {
    const double defect = h.symmetry_defect();
    if (defect > 1e-9 * std::max(1.0, std::abs(h.value(1.0)))) {
      throw UnsupportedCase(fmt::format("running cost is not symmetric (defect {})", defect));
    }
  }
}

}  // namespace

ThresholdSolution solve_threshold(const Resolvent& res, double k_eff,
                                  const ThresholdOptions& options) {
  if (!(k_eff > 0.0) || !std::isfinite(k_eff)) {
    throw InvalidInput(fmt::format("effective cost must be > 0, got {}", k_eff));
  }
  require_symmetric(res);
  const double tol = res.closed_form()
                         ? options.tol
                         : std::max(options.tol, 10.0 * res.options().abs_tol);
  auto F = [&](double x) { return smoothing_residual(x, res, k_eff); };

  ThresholdSolution sol;
  sol.k_used = k_eff;
  double a = 0.0;
  double fa = F(a);
  if (!(fa < 0.0)) {
    throw NoRootError(fmt::format("smooth-pasting residual F(0) = {} is not negative", fa));
  }
  double b = std::max(k_eff, 1.0 / res.rate());
  double fb = F(b);
  int doublings = 0;
  while (!(fb > 0.0)) {
    if (++doublings > options.max_doublings) {
      throw NoRootError(fmt::format("no sign change of F up to x = {}", b));
    }
    if (fb < 0.0) {
      a = b;
      fa = fb;
    }
    b *= 2.0;
    fb = F(b);
  }

  // Illinois regula falsi, with a bisection step whenever the bracket
  // fails to halve over two iterations.
  int side = 0;
  double width_before = b - a;
  for (int it = 1; it <= options.max_iterations; ++it) {
    double x;
    if (it % 3 == 0 && (b - a) > 0.5 * width_before) {
      x = 0.5 * (a + b);
    } else {
      x = (a * fb - b * fa) / (fb - fa);
      if (!(x > a && x < b)) x = 0.5 * (a + b);
    }
    if (it % 3 == 0) width_before = b - a;
    const double fx = F(x);
    sol.iterations = it;
    if (std::abs(fx) < tol) {
      sol.c = x;
      sol.residual = fx;
      // certify the sign change around the root
      sol.lo = (fx < 0.0) ? x : a;
      sol.hi = (fx > 0.0) ? x : b;
      if (fx == 0.0 || sol.lo == sol.hi) {
        sol.lo = a;
        sol.hi = b;
      }
      return sol;
    }
    if (fx < 0.0) {
      a = x;
      fa = fx;
      if (side == -1) fb *= 0.5;
      side = -1;
    } else {
      b = x;
      fb = fx;
      if (side == 1) fa *= 0.5;
      side = 1;
    }
    if (b - a < options.width_tol * std::max(1.0, b)) {
      const double mid = 0.5 * (a + b);
      const double fm = F(mid);
      if (std::abs(fm) < tol) {
        sol.c = mid;
        sol.residual = fm;
        sol.lo = a;
        sol.hi = b;
        return sol;
      }
      throw AccuracyError(fmt::format("bracket collapsed with |F| = {} > tol {}",
                                      std::abs(fm), tol),
                          std::abs(fm));
    }
  }
  throw AccuracyError("threshold iteration budget exhausted", std::min(std::abs(fa), std::abs(fb)));
}

NashParetoGap compare_nash_pareto(const Resolvent& res, double k, const ThresholdOptions& options) {
  if (!(k > 0.0)) throw InvalidInput("intervention cost must be > 0");
  NashParetoGap out;
  out.pareto = solve_threshold(res, 0.5 * k, options);
  out.nash = solve_threshold(res, k, options);
  out.gap = out.nash.c - out.pareto.c;
  if (!(out.gap > 0.0)) {
    throw Error(fmt::format("Nash threshold {} is not wider than Pareto threshold {}",
                            out.nash.c, out.pareto.c));
  }
  return out;
}

std::vector<ThresholdSolution> product_thresholds(const InvestmentSpec& inv,
                                                  const ThresholdOptions& options) {
  const auto products = reduce_central(inv);
  if (inv.costs.empty()) throw InvalidInput("product thresholds need separable costs h_{i,j}");
  std::vector<ThresholdSolution> out(products.size());
  std::string failures;
  const double m = static_cast<double>(inv.investors);
  for (std::size_t j = 0; j < products.size(); ++j) {
    const auto& pr = products[j];
    try {
      if (inv.profit[j] != 0.0) throw UnsupportedCase("closed form needs r_j = 0");
      if (std::abs(pr.drift) > 1e-14) throw UnsupportedCase("closed form needs zero reduced drift");
      if (pr.p_star != pr.q_star) throw UnsupportedCase("closed form needs p*_j = q*_j");
      const auto res = resolvent_build(*pr.averaged_cost, pr.sigma_tilde, inv.discount);
      out[j] = solve_threshold(res, pr.p_star / m, options);
    } catch (const Error& e) {
      failures += fmt::format("{}product {}: {}", failures.empty() ? "" : "; ", j + 1, e.what());
    }
  }
  if (!failures.empty()) throw Error(failures);
  return out;
}

}  // namespace sck
