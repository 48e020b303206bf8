#include "fixtures.hpp"
#include "oracles.hpp"

#include "sck/errors.hpp"
#include "sck/reduction.hpp"
#include "sck/thresholds.hpp"

#include <doctest.h>

#include <cmath>

using namespace sck;

TEST_CASE("smoothing residual brackets the demo threshold") {
  Resolvent res(RunningCost::quadratic(1.0), 1.0, 1.0);
  CHECK(smoothing_residual(0.8, res, 0.5) < 0.0);
  CHECK(smoothing_residual(0.85, res, 0.5) > 0.0);
  CHECK(smoothing_residual(1.1, res, 1.0) < 0.0);
  CHECK(smoothing_residual(1.2, res, 1.0) > 0.0);
  CHECK(smoothing_residual(0.8, res, 0.5) == doctest::Approx(-0.0238).epsilon(0.01));
  CHECK(smoothing_residual(0.85, res, 0.5) == doctest::Approx(0.01007).epsilon(0.01));
}

TEST_CASE("demo thresholds match the reference values") {
  Resolvent res(RunningCost::quadratic(1.0), 1.0, 1.0);
  auto c1 = solve_threshold(res, 0.5);
  auto c2 = solve_threshold(res, 1.0);
  CHECK(std::abs(c1.c - oracle::kC1) < 1e-12);
  CHECK(std::abs(c2.c - oracle::kC2) < 1e-12);
  CHECK(std::abs(c1.residual) <= 1e-12);
  CHECK(c1.lo <= c1.c);
  CHECK(c1.c <= c1.hi);
  CHECK(c1.k_used == 0.5);
}

TEST_CASE("thresholds match an independent bisection over parameters") {
  for (double a : {0.3, 1.0, 4.0}) {
    for (double s : {0.4, 1.0, 2.5}) {
      for (double rho : {0.2, 1.0, 3.0}) {
        for (double k : {0.1, 1.0, 5.0}) {
          oracle::Quadratic q{a, s, rho, k};
          Resolvent res(RunningCost::quadratic(a), s, rho);
          auto t = solve_threshold(res, k);
          CHECK(std::abs(t.c - double(q.threshold())) < 1e-9 * (1 + double(q.threshold())));
        }
      }
    }
  }
}

TEST_CASE("threshold grows with the intervention cost") {
  Resolvent res(RunningCost::quadratic(1.0), 1.0, 1.0);
  double prev = 0.0;
  for (double k = 0.05; k < 6.0; k *= 1.7) {
    double c = solve_threshold(res, k).c;
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("nash band is wider than the pareto band") {
  Resolvent res(RunningCost::quadratic(1.0), 1.0, 1.0);
  auto gap = compare_nash_pareto(res, 1.0);
  CHECK(gap.gap > 0.0);
  CHECK(gap.gap == doctest::Approx(oracle::kC2 - oracle::kC1).epsilon(1e-10));
  CHECK_THROWS_AS(compare_nash_pareto(res, 0.0), InvalidInput);
}

TEST_CASE("custom cost threshold uses quadrature") {
  auto h = RunningCost::custom([](double z) { return std::sqrt(1 + z * z) + 0.5 * z * z; },
                               [](double z) { return z / std::sqrt(1 + z * z) + z; },
                               [](double z) { return std::pow(1 + z * z, -1.5) + 1.0; }, 1.0, 2.0);
  Resolvent res(h, oracle::kCustomSigma, oracle::kCustomRho);
  auto t = solve_threshold(res, 0.5);
  CHECK(t.c > 0.0);
  CHECK(std::abs(smoothing_residual(t.c, res, 0.5)) < 1e-8);
}

TEST_CASE("invalid threshold inputs") {
  Resolvent res(RunningCost::quadratic(1.0), 1.0, 1.0);
  CHECK_THROWS_AS(solve_threshold(res, -1.0), InvalidInput);
  Resolvent shifted(RunningCost::quadratic(1.0, 0.5), 1.0, 1.0);
  CHECK_THROWS_AS(solve_threshold(shifted, 0.5), UnsupportedCase);
}

TEST_CASE("per-product thresholds use K = p* / M") {
  auto inv = fixture::three_products(false);
  inv.q = inv.p;
  auto ts = product_thresholds(inv);
  REQUIRE(ts.size() == 3);
  auto products = reduce_central(inv);
  for (std::size_t j = 0; j < 3; ++j) {
    double a = 0.5 * (inv.costs[0][j].quad_curvature() + inv.costs[1][j].quad_curvature());
    oracle::Quadratic q{a, products[j].sigma_tilde, 1.0, products[j].p_star / 2.0};
    CHECK(std::abs(ts[j].c - double(q.threshold())) < 1e-10);
  }
  auto unequal = fixture::three_products(false);
  unequal.q[0][0] = 0.9;
  CHECK_THROWS_AS(product_thresholds(unequal), Error);
}
