#pragma once

#include "sck/model.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace sck {

/// Uniform axis with n nodes on [lo, hi].
struct Axis {
  double lo = -4.0;
  double hi = 4.0;
  std::size_t n = 801;

  double step() const { return (hi - lo) / static_cast<double>(n - 1); }
  double at(std::size_t i) const { return lo + step() * static_cast<double>(i); }
  void validate() const;
};

/// Active branch per node. kUpper/kLower constrain the first coordinate,
/// kUpper2/kLower2 the second. kBoundary marks the truncation closure.
enum class NodeLabel : int { kInterior = 0, kUpper = 1, kLower = 2, kUpper2 = 3, kLower2 = 4, kBoundary = 5 };

const char* label_name(NodeLabel label);

/// How the truncated domain is closed.
enum class BoundaryClosure {
  kNeumann,      // edge slope fixed at the gradient bound pointing outward
  kTranslation,  // u_b = u_{b +- d} when that neighbor is an interior node, else Neumann
};

struct VIOptions {
  double tol = 1e-10;
  int max_iterations = 500;
  BoundaryClosure closure = BoundaryClosure::kNeumann;
  std::array<int, 2> translation = {1, 1};  // 2-D only, in grid steps
};

struct VISolution {
  std::vector<Axis> axes;  // one or two
  std::vector<double> u;   // first axis fastest
  std::vector<NodeLabel> labels;
  std::vector<double> residual_history;  // one entry per policy iteration
  int iterations = 0;
  double residual = 0.0;  // sup over nodes of |max of scaled branch residuals|
  std::vector<std::string> warnings;

  std::size_t index(std::size_t i, std::size_t j = 0) const { return i + axes[0].n * j; }
  double at(std::size_t i, std::size_t j = 0) const { return u[index(i, j)]; }
  NodeLabel label(std::size_t i, std::size_t j = 0) const { return labels[index(i, j)]; }
};

/// max{rho u - mu u' - (sigma^2/2) u'' - h, u' - K-, -u' - K+} = 0 by policy
/// iteration. The edges carry the linear-growth condition u'' = 0, which gives
/// slopes -K+ / +K- there whenever the gradient branch is active next to them.
/// Throws SolverError carrying the residual history on non-convergence.
VISolution solve_vi_1d(const Axis& grid, const std::function<double(double)>& h, double sigma,
                       double rho, double k_plus, double k_minus, double drift,
                       const VIOptions& options = {});

VISolution solve_vi_1d(const Axis& grid, const ReducedProblem1D& problem,
                       const VIOptions& options = {});

struct FdProblem2D {
  std::function<double(double, double)> cost;
  std::array<double, 2> drift = {0.0, 0.0};
  std::array<std::array<double, 2>, 2> covariance = {{{1.0, 0.0}, {0.0, 1.0}}};  // sigma sigma^T
  double rho = 1.0;
  std::array<double, 2> k_plus = {1.0, 1.0};
  std::array<double, 2> k_minus = {1.0, 1.0};
  std::array<double, 2> weights = {0.5, 0.5};
};

/// Aggregate (regulator) problem of a two-player spec.
FdProblem2D fd_problem_from_game(const GameSpec& spec);

/// max{rho u - L u - H, max_i (d_i u - L_i K_i^-), max_i (-d_i u - L_i K_i^+)} = 0,
/// L u = mu . grad u + (1/2) a11 u_11 + a12 u_12 + (1/2) a22 u_22, with a
/// seven-point cross stencil oriented by the sign of a12. A warning is
/// recorded when the stencil is not monotone on the given grid.
VISolution solve_vi_2d(const Axis& x, const Axis& y, const FdProblem2D& problem,
                       const VIOptions& options = {});

/// Edges of the continuation interval around the central interior run.
/// NaN on a side with no active gradient node.
struct FreeBoundary1D {
  double upper = 0.0;
  double lower = 0.0;
  std::array<double, 2> upper_bracket = {0.0, 0.0};  // last interior, first active
  std::array<double, 2> lower_bracket = {0.0, 0.0};
};

/// Brackets each edge by labels and refines it by extrapolating the discrete
/// second difference of u to zero from inside. Throws BoundaryNotFound when
/// no gradient node is active.
FreeBoundary1D extract_free_boundary(const VISolution& sol);

/// Per-row activation frontier: for every row (fixed second coordinate) with
/// an interior run, the midpoints between its end nodes and the active
/// neighbors on each side.
struct FreeBoundary2D {
  std::vector<std::array<double, 2>> left;
  std::vector<std::array<double, 2>> right;
};

FreeBoundary2D extract_free_boundary_2d(const VISolution& sol);

/// Width of the continuation region along the antidiagonal through the grid
/// center, in the coordinate y = x1 - x2. Needs a square grid with equal axes.
double antidiagonal_band_width(const VISolution& sol);

/// Header x,u,label (1-D) or x,y,u,label (2-D).
void write_vi_csv(std::ostream& os, const VISolution& sol);
/// Header side,x (1-D).
void write_boundary_csv(std::ostream& os, const FreeBoundary1D& b);
/// Header side,x,y (2-D polyline).
void write_boundary_csv(std::ostream& os, const FreeBoundary2D& b);

}  // namespace sck
