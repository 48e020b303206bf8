#include "fixtures.hpp"
#include "oracles.hpp"

#include "sck/errors.hpp"
#include "sck/hjb_fd.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace sck;

namespace {

double quad(double x) { return x * x; }

double sup_error(const VISolution& sol, const oracle::Quadratic& q) {
  double e = 0;
  for (std::size_t i = 0; i < sol.axes[0].n; ++i) {
    e = std::max(e, std::abs(sol.at(i) - double(q.value(sol.axes[0].at(i)))));
  }
  return e;
}

}  // namespace

TEST_CASE("constant cost gives a constant value and no active nodes") {
  Axis g{-2.0, 2.0, 81};
  auto sol = solve_vi_1d(g, [](double) { return 3.0; }, 1.0, 2.0, 0.5, 0.5, 0.0);
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(sol.at(i) == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(sol.label(i) != NodeLabel::kUpper);
    CHECK(sol.label(i) != NodeLabel::kLower);
  }
  CHECK_THROWS_AS(extract_free_boundary(sol), BoundaryNotFound);
}

TEST_CASE("symmetric quadratic matches the closed form") {
  oracle::Quadratic q{1.0, 1.0, 1.0, 0.5};
  double prev = 1e9;
  for (std::size_t n : {401u, 801u, 1601u}) {
    Axis g{-4.0, 4.0, n};
    auto sol = solve_vi_1d(g, quad, 1.0, 1.0, 0.5, 0.5, 0.0);
    CHECK(sol.residual < 1e-8);
    double e = sup_error(sol, q);
    CHECK(e < prev);
    prev = e;
    auto b = extract_free_boundary(sol);
    CHECK(std::abs(b.upper - oracle::kC1) < 2 * g.step());
    CHECK(std::abs(b.lower + oracle::kC1) < 2 * g.step());
    CHECK(b.upper_bracket[0] <= b.upper);
    CHECK(b.upper <= b.upper_bracket[1]);
  }
}

TEST_CASE("discrete solution is convex with slopes within the cost bounds") {
  Axis g{-4.0, 4.0, 401};
  auto sol = solve_vi_1d(g, quad, 1.0, 1.0, 0.5, 0.5, 0.0);
  const double h = g.step();
  for (std::size_t i = 1; i + 1 < g.n; ++i) {
    CHECK(sol.at(i + 1) - 2 * sol.at(i) + sol.at(i - 1) >= -1e-10);
  }
  for (std::size_t i = 0; i + 1 < g.n; ++i) {
    CHECK(std::abs(sol.at(i + 1) - sol.at(i)) / h <= 0.5 + 1e-9);
  }
}

TEST_CASE("cheaper downward pushes narrow the upper side") {
  Axis g{-4.0, 4.0, 801};
  auto sol = solve_vi_1d(g, quad, 1.0, 1.0, 1.0, 0.5, 0.0);
  auto b = extract_free_boundary(sol);
  CHECK(b.upper < -b.lower);
  CHECK(b.upper > 0.0);
}

TEST_CASE("drift shifts the band against its direction") {
  Axis g{-4.0, 4.0, 801};
  auto sol = solve_vi_1d(g, quad, 1.0, 1.0, 0.5, 0.5, 0.5);
  auto b = extract_free_boundary(sol);
  CHECK(b.upper + b.lower < 0.0);
}

TEST_CASE("huge intervention cost leaves no active node on the domain") {
  Axis g{-2.0, 2.0, 101};
  auto sol = solve_vi_1d(g, quad, 1.0, 1.0, 1e6, 1e6, 0.0);
  CHECK_THROWS_AS(extract_free_boundary(sol), BoundaryNotFound);
}

TEST_CASE("reduced problem overload") {
  Axis g{-4.0, 4.0, 401};
  auto a = solve_vi_1d(g, fixture::demo_reduced());
  auto b = solve_vi_1d(g, quad, 1.0, 1.0, 0.5, 0.5, 0.0);
  CHECK(a.u == b.u);
}

TEST_CASE("bad grid is rejected") {
  Axis g{1.0, -1.0, 10};
  CHECK_THROWS_AS(g.validate(), InvalidInput);
  Axis tiny{-1.0, 1.0, 2};
  CHECK_THROWS_AS(tiny.validate(), InvalidInput);
}

TEST_CASE("two-dimensional regulator problem reduces to the band") {
  auto p = fd_problem_from_game(fixture::demo_game());
  CHECK(p.covariance[0][0] == doctest::Approx(0.5));
  CHECK(p.covariance[0][1] == doctest::Approx(0.0));
  VIOptions opt;
  opt.closure = BoundaryClosure::kTranslation;
  Axis a{-3.0, 3.0, 61};
  auto sol = solve_vi_2d(a, a, p, opt);
  oracle::Quadratic q{1.0, 1.0, 1.0, 0.5};
  double e = 0;
  for (std::size_t j = 10; j < 51; ++j) {
    for (std::size_t i = 10; i < 51; ++i) {
      e = std::max(e, std::abs(sol.at(i, j) - double(q.value(a.at(i) - a.at(j)))));
    }
  }
  CHECK(e < 0.02);
  CHECK(std::abs(antidiagonal_band_width(sol) - 2 * oracle::kC1) < 3 * a.step());
  auto fb = extract_free_boundary_2d(sol);
  CHECK_FALSE(fb.left.empty());
  CHECK_FALSE(fb.right.empty());
  std::ostringstream os;
  write_vi_csv(os, sol);
  CHECK(os.str().rfind("x,y,u,label\n", 0) == 0);
}
