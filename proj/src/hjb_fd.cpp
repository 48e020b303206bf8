#include "sck/hjb_fd.hpp"

#include "sck/csv.hpp"
#include "sck/errors.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace sck {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
  std::array<std::size_t, 9> col{};
  std::array<double, 9> coef{};
  int n = 0;
  double rhs = 0.0;
  double scale = 1.0;  // residuals are divided by this

  void add(std::size_t c, double v) {
    col[n] = c;
    coef[n] = v;
    ++n;
  }
  double residual(const std::vector<double>& u) const {
    double s = -rhs;
    for (int k = 0; k < n; ++k) s += coef[k] * u[col[k]];
    return s / scale;
  }
};

// Builds the row of branch b at a node; returns false if the branch does not
// apply there.
using RowBuilder = std::function<bool(std::size_t node, NodeLabel b, Row& row)>;
// Resets pairs of opposing one-sided rows that would make the system singular.
using PolicyGuard = std::function<void(std::vector<NodeLabel>&)>;

VISolution policy_iteration(std::size_t n_nodes, const std::vector<bool>& boundary,
                            const std::vector<NodeLabel>& branches, const RowBuilder& build,
                            const PolicyGuard& guard, const VIOptions& options) {
  std::vector<NodeLabel> policy(n_nodes);
  for (std::size_t k = 0; k < n_nodes; ++k) {
    policy[k] = boundary[k] ? NodeLabel::kBoundary : NodeLabel::kInterior;
  }
  VISolution sol;
  sol.u.assign(n_nodes, 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n_nodes));
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n_nodes),
                                static_cast<Eigen::Index>(n_nodes));
  Row row;

  for (int it = 1; it <= options.max_iterations; ++it) {
    trip.clear();
    trip.reserve(n_nodes * 9);
    for (std::size_t k = 0; k < n_nodes; ++k) {
      row = Row{};
      if (!build(k, policy[k], row)) throw SolverError("inconsistent policy", sol.residual_history);
      for (int m = 0; m < row.n; ++m) {
        trip.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(row.col[m]),
                          row.coef[m] / row.scale);
      }
      rhs[static_cast<Eigen::Index>(k)] = row.rhs / row.scale;
    }
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
      throw SolverError(fmt::format("singular policy system at iteration {}", it),
                        sol.residual_history);
    }
    const Eigen::VectorXd x = lu.solve(rhs);
    for (std::size_t k = 0; k < n_nodes; ++k) sol.u[k] = x[static_cast<Eigen::Index>(k)];

    double res = 0.0;
    std::vector<NodeLabel> next = policy;
    for (std::size_t k = 0; k < n_nodes; ++k) {
      if (boundary[k]) continue;
      row = Row{};
      build(k, policy[k], row);
      const double r_old = row.residual(sol.u);
      double best = r_old;
      NodeLabel best_b = policy[k];
      for (NodeLabel b : branches) {
        if (b == policy[k]) continue;
        row = Row{};
        if (!build(k, b, row)) continue;
        const double r = row.residual(sol.u);
        if (r > best) {
          best = r;
          best_b = b;
        }
      }
      res = std::max(res, std::abs(best));
      if (best > r_old + 1e-13) next[k] = best_b;
    }
    guard(next);
    sol.residual_history.push_back(res);
    sol.iterations = it;
    sol.residual = res;
    if (next == policy || res < options.tol) {
      sol.labels = std::move(policy);
      return sol;
    }
    policy = std::move(next);
  }
  throw SolverError(fmt::format("policy iteration did not converge in {} iterations (residual {})",
                                options.max_iterations, sol.residual),
                    sol.residual_history);
}

void check_common(double rho, const VIOptions& options) {
  if (!(rho > 0.0)) throw InvalidInput("rho must be > 0");
  if (!(options.tol > 0.0)) throw InvalidInput("tolerance must be > 0");
  if (options.max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
}

}  // namespace

void Axis::validate() const {
  if (n < 3) throw InvalidInput("an axis needs at least 3 nodes");
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw InvalidInput("an axis needs finite lo < hi");
  }
}

const char* label_name(NodeLabel label) {
  switch (label) {
    case NodeLabel::kInterior: return "interior";
    case NodeLabel::kUpper: return "upper";
    case NodeLabel::kLower: return "lower";
    case NodeLabel::kUpper2: return "upper2";
    case NodeLabel::kLower2: return "lower2";
    case NodeLabel::kBoundary: return "boundary";
  }
  return "?";
}

// ---------------------------------------------------------------------------

VISolution solve_vi_1d(const Axis& grid, const std::function<double(double)>& h, double sigma,
                       double rho, double k_plus, double k_minus, double drift,
                       const VIOptions& options) {
  grid.validate();
  check_common(rho, options);
  if (!(sigma > 0.0)) throw DegenerateError("volatility must be > 0");
  if (!(k_plus > 0.0) || !(k_minus > 0.0)) throw InvalidInput("intervention costs must be > 0");
  if (!h) throw InvalidInput("running cost is empty");

  const std::size_t n = grid.n;
  const double dx = grid.step();
  const double d2 = 0.5 * sigma * sigma / (dx * dx);
  const double up = std::abs(drift) / dx;
  std::vector<double> hv(n);
  for (std::size_t i = 0; i < n; ++i) hv[i] = h(grid.at(i));
  std::vector<bool> boundary(n, false);
  boundary.front() = boundary.back() = true;

  // Edge rows impose u'' = 0 (linear growth): the edge slope is then +-K
  // wherever the neighbouring nodes are on a gradient branch.
  auto build = [&](std::size_t i, NodeLabel b, Row& row) {
    switch (b) {
      case NodeLabel::kBoundary: {
        const std::size_t a1 = i == 0 ? 1 : n - 2, a2 = i == 0 ? 2 : n - 3;
        row.add(i, 1.0);
        row.add(a1, -2.0);
        row.add(a2, 1.0);
        return true;
      }
      case NodeLabel::kInterior: {
        const double centre = rho + 2.0 * d2 + up;
        row.add(i, centre);
        row.add(i - 1, -d2 - (drift < 0.0 ? up : 0.0));
        row.add(i + 1, -d2 - (drift > 0.0 ? up : 0.0));
        row.rhs = hv[i];
        row.scale = centre;
        return true;
      }
      case NodeLabel::kUpper:
        row.add(i, 1.0);
        row.add(i - 1, -1.0);
        row.rhs = dx * k_minus;
        return true;
      case NodeLabel::kLower:
        row.add(i, 1.0);
        row.add(i + 1, -1.0);
        row.rhs = dx * k_plus;
        return true;
      default:
        return false;
    }
  };
  auto guard = [n](std::vector<NodeLabel>& p) {
    for (std::size_t i = 1; i + 2 < n; ++i) {
      if (p[i] == NodeLabel::kLower && p[i + 1] == NodeLabel::kUpper) {
        p[i] = p[i + 1] = NodeLabel::kInterior;
      }
    }
  };
  auto sol = policy_iteration(n, boundary,
                              {NodeLabel::kInterior, NodeLabel::kUpper, NodeLabel::kLower}, build,
                              guard, options);
  sol.axes = {grid};
  return sol;
}

VISolution solve_vi_1d(const Axis& grid, const ReducedProblem1D& problem,
                       const VIOptions& options) {
  const RunningCost& h = problem.cost;
  return solve_vi_1d(
      grid, [&h](double x) { return h.value(x); }, problem.sigma_tilde, problem.rho,
      problem.k_plus, problem.k_minus, problem.drift, options);
}

// ---------------------------------------------------------------------------

FdProblem2D fd_problem_from_game(const GameSpec& spec) {
  spec.validate();
  if (spec.n() != 2) throw UnsupportedCase("the 2-D solver needs N = 2");
  FdProblem2D p;
  p.cost = [&spec](double x1, double x2) {
    Eigen::VectorXd x(2);
    x << x1, x2;
    return spec.aggregate_cost(x);
  };
  const auto cov = spec.covariance();
  for (int i = 0; i < 2; ++i) {
    p.drift[i] = spec.players[i].drift;
    p.k_plus[i] = spec.players[i].k_plus;
    p.k_minus[i] = spec.players[i].k_minus;
    p.weights[i] = spec.players[i].weight;
    for (int j = 0; j < 2; ++j) p.covariance[i][j] = cov(i, j);
  }
  return p;
}

VISolution solve_vi_2d(const Axis& xa, const Axis& ya, const FdProblem2D& pr,
                       const VIOptions& options) {
  xa.validate();
  ya.validate();
  check_common(pr.rho, options);
  if (!pr.cost) throw InvalidInput("running cost is empty");
  for (int i = 0; i < 2; ++i) {
    if (!(pr.k_plus[i] > 0.0) || !(pr.k_minus[i] > 0.0) || !(pr.weights[i] > 0.0)) {
      throw InvalidInput("intervention costs and weights must be > 0");
    }
  }
  const double a11 = pr.covariance[0][0];
  const double a22 = pr.covariance[1][1];
  const double a12 = pr.covariance[0][1];
  if (!(a11 > 0.0) || !(a22 > 0.0) || a11 * a22 - a12 * a12 < -1e-14) {
    throw DegenerateError("covariance must be positive definite on each axis");
  }

  const std::size_t nx = xa.n, ny = ya.n, n = nx * ny;
  const double hx = xa.step(), hy = ya.step();
  const double ax = 0.5 * a11 / (hx * hx);
  const double ay = 0.5 * a22 / (hy * hy);
  const double cxy = std::abs(a12) / (2.0 * hx * hy);
  const int diag_sign = a12 >= 0.0 ? 1 : -1;
  const double ux = std::abs(pr.drift[0]) / hx;
  const double uy = std::abs(pr.drift[1]) / hy;
  const double lim_up[2] = {pr.weights[0] * pr.k_minus[0], pr.weights[1] * pr.k_minus[1]};
  const double lim_lo[2] = {pr.weights[0] * pr.k_plus[0], pr.weights[1] * pr.k_plus[1]};

  VISolution warn_holder;
  if (cxy > ax + 1e-14 || cxy > ay + 1e-14) {
    warn_holder.warnings.push_back(fmt::format(
        "cross-derivative stencil is not monotone (|a12|/(2 hx hy) = {} exceeds {} or {})", cxy,
        ax, ay));
  }

  std::vector<double> hv(n);
  std::vector<bool> boundary(n, false);
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = i + nx * j;
      hv[k] = pr.cost(xa.at(i), ya.at(j));
      boundary[k] = i == 0 || j == 0 || i == nx - 1 || j == ny - 1;
    }
  }
  auto id = [nx](std::size_t i, std::size_t j) { return i + nx * j; };
  auto inside = [&](long i, long j) {
    return i >= 0 && j >= 0 && i < static_cast<long>(nx) && j < static_cast<long>(ny);
  };

  auto build = [&](std::size_t k, NodeLabel b, Row& row) {
    const std::size_t i = k % nx, j = k / nx;
    switch (b) {
      case NodeLabel::kBoundary: {
        row.add(k, 1.0);
        if (options.closure == BoundaryClosure::kTranslation) {
          const long di = options.translation[0], dj = options.translation[1];
          for (long s : {1L, -1L}) {
            const long ti = static_cast<long>(i) + s * di, tj = static_cast<long>(j) + s * dj;
            if (inside(ti, tj) && !boundary[id(static_cast<std::size_t>(ti), static_cast<std::size_t>(tj))]) {
              row.add(id(static_cast<std::size_t>(ti), static_cast<std::size_t>(tj)), -1.0);
              row.rhs = 0.0;
              return true;
            }
          }
        }
        if (i == 0) {
          row.add(id(1, j), -1.0);
          row.rhs = hx * lim_lo[0];
        } else if (i == nx - 1) {
          row.add(id(nx - 2, j), -1.0);
          row.rhs = hx * lim_up[0];
        } else if (j == 0) {
          row.add(id(i, 1), -1.0);
          row.rhs = hy * lim_lo[1];
        } else {
          row.add(id(i, ny - 2), -1.0);
          row.rhs = hy * lim_up[1];
        }
        return true;
      }
      case NodeLabel::kInterior: {
        const double centre = pr.rho + 2.0 * ax + 2.0 * ay - 2.0 * cxy + ux + uy;
        row.add(k, centre);
        row.add(id(i - 1, j), -ax + cxy - (pr.drift[0] < 0.0 ? ux : 0.0));
        row.add(id(i + 1, j), -ax + cxy - (pr.drift[0] > 0.0 ? ux : 0.0));
        row.add(id(i, j - 1), -ay + cxy - (pr.drift[1] < 0.0 ? uy : 0.0));
        row.add(id(i, j + 1), -ay + cxy - (pr.drift[1] > 0.0 ? uy : 0.0));
        if (cxy > 0.0) {
          if (diag_sign > 0) {
            row.add(id(i + 1, j + 1), -cxy);
            row.add(id(i - 1, j - 1), -cxy);
          } else {
            row.add(id(i + 1, j - 1), -cxy);
            row.add(id(i - 1, j + 1), -cxy);
          }
        }
        row.rhs = hv[k];
        row.scale = centre;
        return true;
      }
      case NodeLabel::kUpper:
        row.add(k, 1.0);
        row.add(id(i - 1, j), -1.0);
        row.rhs = hx * lim_up[0];
        return true;
      case NodeLabel::kLower:
        row.add(k, 1.0);
        row.add(id(i + 1, j), -1.0);
        row.rhs = hx * lim_lo[0];
        return true;
      case NodeLabel::kUpper2:
        row.add(k, 1.0);
        row.add(id(i, j - 1), -1.0);
        row.rhs = hy * lim_up[1];
        return true;
      case NodeLabel::kLower2:
        row.add(k, 1.0);
        row.add(id(i, j + 1), -1.0);
        row.rhs = hy * lim_lo[1];
        return true;
    }
    return false;
  };
  auto guard = [&](std::vector<NodeLabel>& p) {
    for (std::size_t j = 1; j + 1 < ny; ++j) {
      for (std::size_t i = 1; i + 1 < nx; ++i) {
        const std::size_t k = id(i, j);
        if (p[k] == NodeLabel::kLower && p[id(i + 1, j)] == NodeLabel::kUpper) {
          p[k] = p[id(i + 1, j)] = NodeLabel::kInterior;
        }
        if (p[k] == NodeLabel::kLower2 && p[id(i, j + 1)] == NodeLabel::kUpper2) {
          p[k] = p[id(i, j + 1)] = NodeLabel::kInterior;
        }
      }
    }
  };
  auto sol = policy_iteration(n, boundary,
                              {NodeLabel::kInterior, NodeLabel::kUpper, NodeLabel::kLower,
                               NodeLabel::kUpper2, NodeLabel::kLower2},
                              build, guard, options);
  sol.axes = {xa, ya};
  sol.warnings = std::move(warn_holder.warnings);
  return sol;
}

// ---------------------------------------------------------------------------

namespace {

// Quadratic through (-2, d0), (-1, d1), (0, d2); its first zero at tau >= 0,
// or NaN when the values do not decrease towards one.
double zero_ahead(double d0, double d1, double d2) {
  if (!(d0 > d1 && d1 > d2 && d2 >= 0.0)) return kNaN;
  const double b = 0.5 * (3.0 * d2 - 4.0 * d1 + d0);
  const double c = 0.5 * (d2 - 2.0 * d1 + d0);
  if (std::abs(c) < 1e-14 * std::abs(b)) return -d2 / b;
  const double disc = b * b - 4.0 * c * d2;
  if (disc < 0.0) return -d2 / b;
  const double sq = std::sqrt(disc);
  double best = kNaN;
  for (double tau : {(-b - sq) / (2.0 * c), (-b + sq) / (2.0 * c)}) {
    if (tau >= 0.0 && (std::isnan(best) || tau < best)) best = tau;
  }
  return std::isnan(best) ? -d2 / b : best;
}

bool is_gradient(NodeLabel l) { return l != NodeLabel::kInterior && l != NodeLabel::kBoundary; }

// Edges of the interior run containing the interior node of least value on
// a line of nodes t (ascending, uniform), values u and labels. Each edge is
// where the second difference, extrapolated from inside, reaches zero.
FreeBoundary1D edges_on_line(const std::vector<double>& t, const std::vector<double>& u,
                             const std::vector<NodeLabel>& lab) {
  const std::size_t n = t.size();
  std::size_t best = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (lab[k] == NodeLabel::kInterior && (best == n || u[k] < u[best])) best = k;
  }
  if (best == n) throw BoundaryNotFound("no interior node on the line");
  std::size_t l = best, r = best;
  while (l > 0 && lab[l - 1] == NodeLabel::kInterior) --l;
  while (r + 1 < n && lab[r + 1] == NodeLabel::kInterior) ++r;

  auto d2 = [&](std::size_t k) { return u[k + 1] - 2.0 * u[k] + u[k - 1]; };
  FreeBoundary1D out;
  out.upper = out.lower = kNaN;
  out.upper_bracket = out.lower_bracket = {kNaN, kNaN};
  const bool has_upper = r + 1 < n && is_gradient(lab[r + 1]);
  const bool has_lower = l > 0 && is_gradient(lab[l - 1]);
  if (!has_upper && !has_lower) throw BoundaryNotFound("no active gradient node next to the band");

  if (has_upper) {
    out.upper_bracket = {t[r], t[r + 1]};
    double est = 0.5 * (t[r] + t[r + 1]);
    if (r >= l + 4) {
      const double tau = zero_ahead(d2(r - 3), d2(r - 2), d2(r - 1));
      if (!std::isnan(tau)) est = t[r - 1] + tau * (t[r - 1] - t[r - 2]);
    }
    out.upper = std::clamp(est, t[r], t[r + 1]);
  }
  if (has_lower) {
    out.lower_bracket = {t[l - 1], t[l]};
    double est = 0.5 * (t[l - 1] + t[l]);
    if (l + 4 <= r) {
      const double tau = zero_ahead(d2(l + 3), d2(l + 2), d2(l + 1));
      if (!std::isnan(tau)) est = t[l + 1] - tau * (t[l + 2] - t[l + 1]);
    }
    out.lower = std::clamp(est, t[l - 1], t[l]);
  }
  return out;
}

}  // namespace

FreeBoundary1D extract_free_boundary(const VISolution& sol) {
  if (sol.axes.size() != 1) throw InvalidInput("1-D boundary extraction needs a 1-D solution");
  const auto& ax = sol.axes[0];
  std::vector<double> t(ax.n);
  for (std::size_t i = 0; i < ax.n; ++i) t[i] = ax.at(i);
  return edges_on_line(t, sol.u, sol.labels);
}

FreeBoundary2D extract_free_boundary_2d(const VISolution& sol) {
  if (sol.axes.size() != 2) throw InvalidInput("2-D boundary extraction needs a 2-D solution");
  const auto& xa = sol.axes[0];
  const auto& ya = sol.axes[1];
  FreeBoundary2D out;
  for (std::size_t j = 0; j < ya.n; ++j) {
    std::size_t best = xa.n;
    for (std::size_t i = 0; i < xa.n; ++i) {
      if (sol.label(i, j) == NodeLabel::kInterior && (best == xa.n || sol.at(i, j) < sol.at(best, j))) {
        best = i;
      }
    }
    if (best == xa.n) continue;
    std::size_t l = best, r = best;
    while (l > 0 && sol.label(l - 1, j) == NodeLabel::kInterior) --l;
    while (r + 1 < xa.n && sol.label(r + 1, j) == NodeLabel::kInterior) ++r;
    const double y = ya.at(j);
    if (l > 0 && is_gradient(sol.label(l - 1, j))) {
      out.left.push_back({0.5 * (xa.at(l - 1) + xa.at(l)), y});
    }
    if (r + 1 < xa.n && is_gradient(sol.label(r + 1, j))) {
      out.right.push_back({0.5 * (xa.at(r) + xa.at(r + 1)), y});
    }
  }
  if (out.left.empty() && out.right.empty()) {
    throw BoundaryNotFound("no active gradient node in the 2-D solution");
  }
  return out;
}

double antidiagonal_band_width(const VISolution& sol) {
  if (sol.axes.size() != 2) throw InvalidInput("band width needs a 2-D solution");
  const auto& xa = sol.axes[0];
  const auto& ya = sol.axes[1];
  if (xa.n != ya.n || xa.lo != ya.lo || xa.hi != ya.hi) {
    throw InvalidInput("band width needs identical axes");
  }
  const std::size_t n = xa.n;
  std::vector<double> t(n), u(n);
  std::vector<NodeLabel> lab(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t j = n - 1 - k;
    t[k] = xa.at(k) - ya.at(j);
    u[k] = sol.at(k, j);
    lab[k] = sol.label(k, j);
  }
  const auto e = edges_on_line(t, u, lab);
  if (std::isnan(e.upper) || std::isnan(e.lower)) {
    throw BoundaryNotFound("band is not closed on both sides along the antidiagonal");
  }
  return e.upper - e.lower;
}

void write_vi_csv(std::ostream& os, const VISolution& sol) {
  csv::Writer w(os);
  if (sol.axes.size() == 1) {
    w.header({"x", "u", "label"});
    for (std::size_t i = 0; i < sol.axes[0].n; ++i) {
      w.row(sol.axes[0].at(i), sol.at(i), label_name(sol.label(i)));
    }
    return;
  }
  w.header({"x", "y", "u", "label"});
  for (std::size_t j = 0; j < sol.axes[1].n; ++j) {
    for (std::size_t i = 0; i < sol.axes[0].n; ++i) {
      w.row(sol.axes[0].at(i), sol.axes[1].at(j), sol.at(i, j), label_name(sol.label(i, j)));
    }
  }
}

void write_boundary_csv(std::ostream& os, const FreeBoundary1D& b) {
  csv::Writer w(os);
  w.header({"side", "x"});
  w.row("lower", b.lower);
  w.row("upper", b.upper);
}

void write_boundary_csv(std::ostream& os, const FreeBoundary2D& b) {
  csv::Writer w(os);
  w.header({"side", "x", "y"});
  for (const auto& p : b.left) w.row("left", p[0], p[1]);
  for (const auto& p : b.right) w.row("right", p[0], p[1]);
}

}  // namespace sck
