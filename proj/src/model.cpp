#include "sck/model.hpp"

#include "sck/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace sck {

// ---------------------------------------------------------------------------
// RunningCost

RunningCost RunningCost::quadratic(double curvature, double center,
                                   double offset) {
  if (!(curvature > 0.0) || !std::isfinite(curvature)) {
    throw InvalidInput(
        fmt::format("quadratic cost curvature must be > 0, got {}", curvature));
  }
  if (!std::isfinite(center) || !std::isfinite(offset)) {
    throw InvalidInput("quadratic cost center/offset must be finite");
  }
  RunningCost c;
  c.kind_ = Kind::kQuadratic;
  c.a_ = curvature;
  c.center_ = center;
  c.offset_ = offset;
  c.c_lo_ = c.c_hi_ = 2.0 * curvature;
  return c;
}

RunningCost RunningCost::custom(Fn h, Fn dh, Fn d2h, double c_lo, double c_hi,
                                double center) {
  if (!h || !dh || !d2h) {
    throw InvalidInput("custom cost needs h, h' and h''");
  }
  if (!(c_lo >= 0.0) || !(c_hi >= c_lo) || !std::isfinite(c_hi)) {
    throw InvalidInput(fmt::format(
        "custom cost curvature bounds must satisfy 0 <= lo <= hi, got [{}, {}]",
        c_lo, c_hi));
  }
  RunningCost c;
  c.kind_ = Kind::kCustom;
  c.c_lo_ = c_lo;
  c.c_hi_ = c_hi;
  c.center_ = center;
  c.h_ = std::move(h);
  c.dh_ = std::move(dh);
  c.d2h_ = std::move(d2h);
  return c;
}

RunningCost RunningCost::weighted_sum(std::span<const RunningCost> costs,
                                      std::span<const double> weights) {
  if (costs.empty() || costs.size() != weights.size()) {
    throw InvalidInput("weighted_sum needs one weight per cost");
  }
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidInput("weighted_sum weights must be >= 0");
  }
  const bool all_quadratic = std::all_of(
      costs.begin(), costs.end(), [](const auto& c) { return c.is_quadratic(); });
  if (all_quadratic) {
    // sum w a (x - s)^2 + w o = A (x - S)^2 + O
    double a = 0.0, as = 0.0, rest = 0.0;
    for (std::size_t k = 0; k < costs.size(); ++k) {
      const auto& c = costs[k];
      a += weights[k] * c.a_;
      as += weights[k] * c.a_ * c.center_;
      rest += weights[k] * (c.a_ * c.center_ * c.center_ + c.offset_);
    }
    const double s = as / a;
    return quadratic(a, s, rest - a * s * s);
  }
  std::vector<RunningCost> cs(costs.begin(), costs.end());
  std::vector<double> ws(weights.begin(), weights.end());
  auto combine = [cs, ws](auto member) {
    return [cs, ws, member](double x) {
      double s = 0.0;
      for (std::size_t k = 0; k < cs.size(); ++k) s += ws[k] * (cs[k].*member)(x);
      return s;
    };
  };
  double lo = 0.0, hi = 0.0, wsum = 0.0, center = 0.0;
  for (std::size_t k = 0; k < cs.size(); ++k) {
    lo += ws[k] * cs[k].c_lo_;
    hi += ws[k] * cs[k].c_hi_;
    wsum += ws[k];
    center += ws[k] * cs[k].center_;
  }
  return custom(combine(&RunningCost::value), combine(&RunningCost::slope),
                combine(&RunningCost::curvature), lo, hi,
                wsum > 0.0 ? center / wsum : 0.0);
}

double RunningCost::value(double x) const {
  if (kind_ == Kind::kQuadratic) {
    const double d = x - center_;
    return a_ * d * d + offset_;
  }
  return h_(x);
}

double RunningCost::slope(double x) const {
  if (kind_ == Kind::kQuadratic) return 2.0 * a_ * (x - center_);
  return dh_(x);
}

double RunningCost::curvature(double x) const {
  if (kind_ == Kind::kQuadratic) return 2.0 * a_;
  return d2h_(x);
}

void RunningCost::check_curvature_bounds(double span, int samples) const {
  const double slack = 1e-9 * std::max(1.0, c_hi_);
  for (int k = 0; k < samples; ++k) {
    const double x = center_ - span + 2.0 * span * k / (samples - 1);
    const double c = curvature(x);
    if (!(c >= c_lo_ - slack) || !(c <= c_hi_ + slack) || !(c > 0.0)) {
      throw DegenerateError(fmt::format(
          "h''({}) = {} outside declared curvature bounds [{}, {}]", x, c,
          c_lo_, c_hi_));
    }
  }
}

double RunningCost::symmetry_defect(double span, int samples) const {
  double worst = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double x = span * k / (samples - 1);
    worst = std::max(worst, std::abs(value(center_ + x) - value(center_ - x)));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Specs

Eigen::MatrixXd GameSpec::covariance() const {
  const auto n_players = n();
  const auto d = brownian_dim();
  Eigen::MatrixXd s(n_players, d);
  for (std::size_t i = 0; i < n_players; ++i) {
    for (std::size_t j = 0; j < d; ++j) s(i, j) = players[i].sigma[j];
  }
  return s * s.transpose();
}

double GameSpec::aggregate_cost(const Eigen::VectorXd& x) const {
  switch (cost_form) {
    case CostForm::kJoint:
      return joint->value(x);
    case CostForm::kDifference: {
      double s = 0.0;
      for (const auto& p : players) s += p.weight * p.cost.value(x(0) - x(1));
      return s;
    }
    case CostForm::kOwnState: {
      double s = 0.0;
      for (std::size_t i = 0; i < n(); ++i) {
        s += players[i].weight * players[i].cost.value(x(i));
      }
      return s;
    }
  }
  return 0.0;
}

Eigen::MatrixXd GameSpec::aggregate_hessian(const Eigen::VectorXd& x) const {
  const auto n_players = static_cast<Eigen::Index>(n());
  switch (cost_form) {
    case CostForm::kJoint:
      return joint->hessian(x);
    case CostForm::kDifference: {
      double c = 0.0;
      for (const auto& p : players) c += p.weight * p.cost.curvature(x(0) - x(1));
      Eigen::MatrixXd h(2, 2);
      h << c, -c, -c, c;
      return h;
    }
    case CostForm::kOwnState: {
      Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_players, n_players);
      for (Eigen::Index i = 0; i < n_players; ++i) {
        h(i, i) = players[i].weight * players[i].cost.curvature(x(i));
      }
      return h;
    }
  }
  return {};
}

void GameSpec::validate() const {
  if (players.empty()) throw InvalidInput("game needs at least one player");
  if (!(rho > 0.0)) throw InvalidInput(fmt::format("rho must be > 0, got {}", rho));
  const auto d = brownian_dim();
  if (d == 0) throw InvalidInput("volatility rows must be nonempty");
  double wsum = 0.0;
  for (std::size_t i = 0; i < n(); ++i) {
    const auto& p = players[i];
    if (p.sigma.size() != d) {
      throw InvalidInput(fmt::format(
          "player {} volatility row has length {}, expected {}", i + 1,
          p.sigma.size(), d));
    }
    for (double s : p.sigma) {
      if (!std::isfinite(s)) throw InvalidInput("volatility entries must be finite");
    }
    if (!(p.k_plus > 0.0) || !(p.k_minus > 0.0)) {
      throw InvalidInput(fmt::format("player {} intervention costs must be > 0", i + 1));
    }
    if (!(p.weight > 0.0)) {
      throw InvalidInput(fmt::format("player {} welfare weight must be > 0", i + 1));
    }
    if (!std::isfinite(p.drift)) throw InvalidInput("drift must be finite");
    wsum += p.weight;
  }
  if (std::abs(wsum - 1.0) > 1e-12) {
    throw InvalidInput(fmt::format("welfare weights must sum to 1, got {}", wsum));
  }
  if (!benchmark_weights.empty()) {
    if (benchmark_weights.size() != n()) {
      throw InvalidInput("benchmark weights must have one entry per player");
    }
    double asum = 0.0;
    for (double a : benchmark_weights) {
      if (!(a >= 0.0)) throw InvalidInput("benchmark weights must be >= 0");
      asum += a;
    }
    if (std::abs(asum - 1.0) > 1e-12) {
      throw InvalidInput(fmt::format("benchmark weights must sum to 1, got {}", asum));
    }
  }
  if (cost_form == CostForm::kDifference && n() != 2) {
    throw InvalidInput("difference-cost form needs exactly two players");
  }
  if (cost_form == CostForm::kJoint && (!joint || joint->dim != n())) {
    throw InvalidInput("joint cost form needs a joint H of dimension N");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance());
  const double lambda = eig.eigenvalues().minCoeff();
  if (!(lambda > 1e-14 * std::max(1.0, eig.eigenvalues().maxCoeff()))) {
    throw DegenerateError(fmt::format(
        "sigma sigma^T is not positive definite (smallest eigenvalue {})", lambda));
  }
}

void InvestmentSpec::validate() const {
  if (investors == 0 || products == 0) {
    throw InvalidInput("investment spec needs at least one investor and product");
  }
  auto check_matrix = [&](const auto& m, const char* name) {
    if (m.size() != investors) {
      throw InvalidInput(fmt::format("{} must have {} rows", name, investors));
    }
    for (const auto& row : m) {
      if (row.size() != products) {
        throw InvalidInput(fmt::format("{} rows must have {} entries", name, products));
      }
    }
  };
  check_matrix(y, "y");
  check_matrix(mu, "mu");
  check_matrix(p, "p");
  check_matrix(q, "q");
  check_matrix(sigma, "sigma");
  if (!costs.empty()) check_matrix(costs, "costs");
  for (std::size_t i = 0; i < investors; ++i) {
    for (std::size_t j = 0; j < products; ++j) {
      if (!(p[i][j] > 0.0) || !(q[i][j] > 0.0)) {
        throw InvalidInput(fmt::format(
            "expansion/contraction costs must be > 0 (investor {}, product {})",
            i + 1, j + 1));
      }
      const auto& row = sigma[i][j];
      if (row.size() != brownian_dim) {
        throw InvalidInput("volatility rows must have length brownian_dim");
      }
      double norm2 = 0.0;
      for (double s : row) norm2 += s * s;
      if (!(norm2 > 0.0)) {
        throw DegenerateError(fmt::format(
            "volatility row of investor {}, product {} has zero norm", i + 1,
            j + 1));
      }
    }
  }
  for (const auto* v : {&profit, &demand_drift, &demand_vol, &demand0}) {
    if (v->size() != products) {
      throw InvalidInput(fmt::format("demand/profit vectors must have {} entries", products));
    }
  }
  if (!(discount > 0.0)) throw InvalidInput("discount rate must be > 0");
}

void ReducedProblem1D::validate() const {
  if (!(sigma_tilde > 0.0)) {
    throw DegenerateError(fmt::format("effective volatility must be > 0, got {}", sigma_tilde));
  }
  if (!(rho > 0.0)) throw InvalidInput("rho must be > 0");
  if (!(k_plus > 0.0) || !(k_minus > 0.0)) {
    throw InvalidInput("effective intervention costs must be > 0");
  }
}

// ---------------------------------------------------------------------------
// Volatility and resolvent

double effective_volatility(std::span<const std::vector<double>> rows,
                            VolatilityConvention convention) {
  if (rows.empty()) throw InvalidInput("effective_volatility needs at least one row");
  const auto d = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != d) throw InvalidInput("volatility rows must share a length");
    for (double s : r) {
      if (!std::isfinite(s)) throw InvalidInput("volatility entries must be finite");
    }
  }
  double out = 0.0;
  if (convention == VolatilityConvention::kJoint || rows.size() == 1) {
    for (const auto& r : rows) {
      for (double s : r) out += s * s;
    }
  } else {
    if (rows.size() != 2) {
      throw InvalidInput("difference convention needs one or two rows");
    }
    for (std::size_t k = 0; k < d; ++k) {
      const double diff = rows[0][k] - rows[1][k];
      out += diff * diff;
    }
  }
  out = std::sqrt(out);
  if (!(out > 0.0)) throw DegenerateError("effective volatility is zero");
  return out;
}

Resolvent::Resolvent(RunningCost cost, double sigma_tilde, double rho,
                     ResolventOptions options)
    : cost_(std::move(cost)),
      sigma_(sigma_tilde),
      rho_(rho),
      rate_(std::sqrt(2.0 * rho) / sigma_tilde),
      closed_form_(cost_.is_quadratic() && !options.force_quadrature),
      options_(options) {
  if (!(sigma_tilde > 0.0)) throw DegenerateError("resolvent needs sigma > 0");
  if (!(rho > 0.0)) throw InvalidInput("resolvent needs rho > 0");
  if (!(options.abs_tol > 0.0)) throw InvalidInput("quadrature tolerance must be > 0");
}

Jet Resolvent::eval(double x) const {
  if (closed_form_) {
    // E (d + sigma B_t)^2 = d^2 + sigma^2 t
    const double a = cost_.quad_curvature();
    const double d = x - cost_.center();
    return {a * d * d / rho_ + a * sigma_ * sigma_ / (rho_ * rho_) +
                cost_.quad_offset() / rho_,
            2.0 * a * d / rho_, 2.0 * a / rho_};
  }
  const double chi = cost_.curvature_hi();
  const auto h = [this](double z) { return cost_.value(z); };
  const auto dh = [this](double z) { return cost_.slope(z); };
  const auto d2h = [this](double z) { return cost_.curvature(z); };
  const double hx = cost_.value(x);
  const double dhx = cost_.slope(x);
  return {convolve(h, x, std::abs(hx), std::abs(dhx), 0.5 * chi),
          convolve(dh, x, std::abs(dhx), chi, 0.0),
          convolve(d2h, x, std::max(chi, std::abs(cost_.curvature(x))), 0.0, 0.0)};
}

// Green-kernel convolution (1 / (sigma sqrt(2 rho))) int f(z) e^{-k|x - z|} dz,
// with |f(x +- t)| <= c0 + c1 t + c2 t^2 bounding the truncated tail.
double Resolvent::convolve(const RunningCost::Fn& f, double x, double c0,
                           double c1, double c2) const {
  const double k = rate_;
  const double pref = 1.0 / (sigma_ * std::sqrt(2.0 * rho_));
  const double tol = options_.abs_tol;
  auto tail = [&](double t_max) {
    const double e = std::exp(-k * t_max);
    return 2.0 * pref * e *
           (c0 / k + c1 * (t_max / k + 1.0 / (k * k)) +
            c2 * (t_max * t_max / k + 2.0 * t_max / (k * k) + 2.0 / (k * k * k)));
  };
  double t_max = 8.0 / k;
  for (int i = 0; i < 64 && tail(t_max) > 0.25 * tol; ++i) t_max *= 1.5;
  const double tail_bound = tail(t_max);
  if (tail_bound > 0.25 * tol) {
    throw AccuracyError("resolvent tail bound did not fall below tolerance", tail_bound);
  }

  auto integrand = [&](double t) { return (f(x + t) + f(x - t)) * std::exp(-k * t); };
  using Quad = boost::math::quadrature::gauss_kronrod<double, 61>;
  double err = 0.0, l1 = 0.0;
  Quad::integrate(integrand, 0.0, t_max, 0, 1.0, &err, &l1);
  const double target = 0.5 * tol / pref;
  const double rel = std::max(target / std::max(l1, std::numeric_limits<double>::min()),
                              4.0 * std::numeric_limits<double>::epsilon());
  const double value =
      Quad::integrate(integrand, 0.0, t_max, options_.max_depth, rel, &err, &l1);
  const double achieved = pref * err + tail_bound;
  if (!(achieved <= tol) || !std::isfinite(value)) {
    throw AccuracyError(
        fmt::format("resolvent quadrature reached {} > tolerance {}", achieved, tol),
        achieved);
  }
  return pref * value;
}

Resolvent resolvent_build(const RunningCost& cost, double sigma_tilde,
                          double rho, ResolventOptions options) {
  if (!cost.is_quadratic() && cost.curvature_hi() > 0.0) {
    cost.check_curvature_bounds();
  }
  return Resolvent(cost, sigma_tilde, rho, options);
}

// ---------------------------------------------------------------------------
// Interbank running cost

JointCost interbank_running_cost(std::span<const double> kappa,
                                 std::span<const double> nu,
                                 std::span<const double> a,
                                 std::span<const double> weights) {
  const auto n = kappa.size();
  if (n == 0 || nu.size() != n || a.size() != n || weights.size() != n) {
    throw InvalidInput("interbank cost needs kappa, nu, a, L of equal length");
  }
  double asum = 0.0, lsum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(kappa[i] > 0.0) || !(nu[i] >= 0.0)) {
      throw InvalidInput("interbank cost needs kappa > 0 and nu >= 0");
    }
    if (!(a[i] >= 0.0) || !(weights[i] > 0.0)) {
      throw InvalidInput("interbank weights must be nonnegative (L positive)");
    }
    asum += a[i];
    lsum += weights[i];
  }
  if (std::abs(asum - 1.0) > 1e-12 || std::abs(lsum - 1.0) > 1e-12) {
    throw InvalidInput("benchmark weights and welfare weights must each sum to 1");
  }

  // Row i of w gives x^i - sum_{j != i} a_j x^j.
  const auto sz = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd w(sz, sz);
  Eigen::VectorXd lk(sz), ln(sz);
  for (Eigen::Index i = 0; i < sz; ++i) {
    for (Eigen::Index j = 0; j < sz; ++j) w(i, j) = (i == j) ? 1.0 : -a[j];
    lk(i) = weights[i] * kappa[i];
    ln(i) = weights[i] * nu[i];
  }
  const Eigen::MatrixXd hess =
      2.0 * w.transpose() * lk.asDiagonal() * w + Eigen::MatrixXd(2.0 * ln.asDiagonal());

  JointCost cost;
  cost.dim = n;
  cost.value = [w, lk, ln](const Eigen::VectorXd& x) {
    const Eigen::VectorXd r = w * x;
    return lk.dot(r.cwiseProduct(r)) + ln.dot(x.cwiseProduct(x));
  };
  cost.gradient = [hess](const Eigen::VectorXd& x) -> Eigen::VectorXd { return hess * x; };
  cost.hessian = [hess](const Eigen::VectorXd&) -> Eigen::MatrixXd { return hess; };
  return cost;
}

// ---------------------------------------------------------------------------
// Assumption report

bool AssumptionReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const auto& c) { return c.passed; });
}

const AssumptionCheck* AssumptionReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

namespace {

std::string format_point(const Eigen::VectorXd& x) {
  std::string s = "(";
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    s += fmt::format("{}{:.4g}", i ? ", " : "", x(i));
  }
  return s + ")";
}

template <class Visit>
void for_each_grid_point(std::size_t dim, int per_axis, double radius, Visit&& visit) {
  std::vector<int> idx(dim, 0);
  Eigen::VectorXd x(static_cast<Eigen::Index>(dim));
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) {
      x(static_cast<Eigen::Index>(k)) =
          -radius + 2.0 * radius * idx[k] / std::max(1, per_axis - 1);
    }
    visit(x);
    std::size_t k = 0;
    while (k < dim && ++idx[k] == per_axis) idx[k++] = 0;
    if (k == dim) break;
  }
}

}  // namespace

AssumptionReport validate_assumptions(const GameSpec& spec, AssumptionSampling sampling) {
  AssumptionReport report;
  const auto n = spec.n();

  {
    double lsum = 0.0;
    bool positive = true;
    for (const auto& p : spec.players) {
      lsum += p.weight;
      positive = positive && p.weight > 0.0;
    }
    const bool ok = positive && std::abs(lsum - 1.0) <= 1e-12;
    report.checks.push_back({"welfare_weights", ok,
                             ok ? "" : fmt::format("sum L = {}", lsum), lsum});
  }
  {
    bool ok = spec.rho > 0.0;
    for (const auto& p : spec.players) ok = ok && p.k_plus > 0.0 && p.k_minus > 0.0;
    report.checks.push_back({"positive_rates_and_costs", ok, "", spec.rho});
  }
  {
    double lambda = 0.0;
    bool shapes_ok = n > 0 && spec.brownian_dim() > 0;
    for (const auto& p : spec.players) shapes_ok = shapes_ok && p.sigma.size() == spec.brownian_dim();
    if (shapes_ok) {
      lambda = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(spec.covariance())
                   .eigenvalues()
                   .minCoeff();
    }
    report.checks.push_back({"nondegenerate_diffusion", shapes_ok && lambda > 1e-14,
                             fmt::format("lambda_min(sigma sigma^T) = {}", lambda), lambda});
  }
  if (n == 0 || (spec.cost_form == CostForm::kJoint && !spec.joint) ||
      (spec.cost_form == CostForm::kDifference && n != 2)) {
    report.checks.push_back({"running_cost", false, "running cost not evaluable", 0.0});
    return report;
  }

  int per_axis = std::max(2, sampling.points_per_axis);
  while (per_axis > 2 && std::pow(per_axis, static_cast<double>(n)) > 20000.0) --per_axis;

  std::vector<Eigen::VectorXd> directions;
  // a cost of x^1 - x^2 is flat along the diagonal; its curvature is that of
  // the spread, which moving x^1 alone measures
  if (spec.cost_form == CostForm::kDifference) directions.push_back(Eigen::VectorXd::Unit(2, 0));
  for (std::size_t i = 0; spec.cost_form != CostForm::kDifference && i < n; ++i) {
    directions.push_back(Eigen::VectorXd::Unit(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(i)));
    for (std::size_t j = i + 1; j < n; ++j) {
      for (double s : {1.0, -1.0}) {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
        z(static_cast<Eigen::Index>(i)) = 1.0;
        z(static_cast<Eigen::Index>(j)) = s;
        directions.push_back(z.normalized());
      }
    }
  }
  std::mt19937 gen(7);
  std::normal_distribution<double> normal;
  for (int k = 0; spec.cost_form != CostForm::kDifference && k < 8; ++k) {
    Eigen::VectorXd z(static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(gen);
    directions.push_back(z.normalized());
  }

  struct Shell {
    double min_h = std::numeric_limits<double>::infinity();
    Eigen::VectorXd min_h_at;
    double growth = 0.0;
    double min_curv = std::numeric_limits<double>::infinity();
    Eigen::VectorXd min_curv_at;
    double max_curv = -std::numeric_limits<double>::infinity();
    Eigen::VectorXd max_curv_at;
  };
  auto scan = [&](double radius) {
    Shell s;
    for_each_grid_point(n, per_axis, radius, [&](const Eigen::VectorXd& x) {
      const double h = spec.aggregate_cost(x);
      if (h < s.min_h) {
        s.min_h = h;
        s.min_h_at = x;
      }
      s.growth = std::max(s.growth, h / (1.0 + x.squaredNorm()));
      const Eigen::MatrixXd hess = spec.aggregate_hessian(x);
      for (const auto& z : directions) {
        const double c = z.dot(hess * z);
        if (c < s.min_curv) {
          s.min_curv = c;
          s.min_curv_at = x;
        }
        if (c > s.max_curv) {
          s.max_curv = c;
          s.max_curv_at = x;
        }
      }
    });
    return s;
  };
  const Shell inner = scan(sampling.radius);
  const Shell outer = scan(4.0 * sampling.radius);

  const double min_h = std::min(inner.min_h, outer.min_h);
  const auto& min_h_at = inner.min_h <= outer.min_h ? inner.min_h_at : outer.min_h_at;
  report.checks.push_back({"nonnegativity", min_h >= -1e-12,
                           fmt::format("min H = {} at {}", min_h, format_point(min_h_at)),
                           min_h});
  const bool growth_ok = outer.growth <= 2.0 * inner.growth + 1e-12;
  report.checks.push_back(
      {"quadratic_growth", growth_ok,
       fmt::format("H/(1+|x|^2) <= {} at radius {}, {} at radius {}", inner.growth,
                   sampling.radius, outer.growth, 4.0 * sampling.radius),
       outer.growth});
  const double c_lo = std::min(inner.min_curv, outer.min_curv);
  const auto& c_lo_at = inner.min_curv <= outer.min_curv ? inner.min_curv_at : outer.min_curv_at;
  report.checks.push_back({"curvature_lower_bound", c_lo > 1e-12,
                           fmt::format("min d2H/dz2 = {} at {}", c_lo, format_point(c_lo_at)),
                           c_lo});
  const bool upper_ok = outer.max_curv <= 2.0 * inner.max_curv + 1e-12;
  report.checks.push_back(
      {"curvature_upper_bound", upper_ok,
       fmt::format("max d2H/dz2 = {} at {} (inner shell max {})", outer.max_curv,
                   format_point(outer.max_curv_at), inner.max_curv),
       outer.max_curv});
  return report;
}

}  // namespace sck
