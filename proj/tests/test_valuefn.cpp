#include "fixtures.hpp"
#include "oracles.hpp"

#include "sck/errors.hpp"
#include "sck/valuefn.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

using namespace sck;

namespace {

PiecewiseValue demo_value() {
  return PiecewiseValue::solve(Resolvent(RunningCost::quadratic(1.0), 1.0, 1.0), 0.5);
}

}  // namespace

TEST_CASE("band value matches the closed form oracle") {
  auto pv = demo_value();
  oracle::Quadratic q{1.0, 1.0, 1.0, 0.5};
  CHECK(std::abs(pv.eval(0.0).value - oracle::kV0) < 1e-13);
  for (double y : {-2.5, -0.9, -0.3, 0.0, 0.5, 0.83, 1.7}) {
    CHECK(std::abs(pv.eval(y).value - double(q.value(y))) < 1e-12);
  }
}

TEST_CASE("band value is even, C2 and smooth pastes at the threshold") {
  auto pv = demo_value();
  const double c = pv.threshold();
  auto in = pv.eval(c - 1e-12);
  auto out = pv.eval(c + 1e-12);
  CHECK(std::abs(in.slope - 0.5) < 1e-10);
  CHECK(std::abs(out.slope - 0.5) < 1e-10);
  CHECK(std::abs(pv.interior(c).curvature) < 1e-12);
  for (double y : {0.1, 0.6, 1.3}) {
    CHECK(pv.eval(y).value == doctest::Approx(pv.eval(-y).value).epsilon(1e-15));
    CHECK(pv.eval(y).slope == doctest::Approx(-pv.eval(-y).slope).epsilon(1e-15));
  }
  CHECK(pv.branch(0.0) == Branch::kInterior);
  CHECK(pv.branch(2.0) == Branch::kUpper);
  CHECK(pv.branch(-2.0) == Branch::kLower);
}

TEST_CASE("band value is convex and its slope is bounded by K") {
  auto pv = demo_value();
  for (double y = -3; y <= 3; y += 0.01) {
    auto j = pv.eval(y);
    CHECK(j.curvature >= -1e-12);
    CHECK(std::abs(j.slope) <= 0.5 + 1e-12);
  }
}

TEST_CASE("hjb residual vanishes on the active branch") {
  auto pv = demo_value();
  for (double y = -2.5; y <= 2.5; y += 0.05) {
    auto r = hjb_residual_1d(pv, y);
    CHECK(std::abs(r.max) < 1e-10);
    CHECK(r.interior <= 1e-10);
    CHECK(r.gradient <= 1e-10);
  }
}

TEST_CASE("nash values on and off the diagonal") {
  NashValue nv(Resolvent(RunningCost::quadratic(1.0), 1.0, 1.0), 1.0);
  CHECK(std::abs(nv.threshold() - oracle::kC2) < 1e-12);
  auto [v1, v2] = nv.eval(0.3, 0.3);
  CHECK(std::abs(v1 - oracle::kNashV1Diagonal) < 1e-12);
  CHECK(v1 == doctest::Approx(v2));
  auto [a1, a2] = nv.eval(0.4, -0.1);
  auto [b1, b2] = nv.eval(-0.1, 0.4);
  CHECK(a1 == doctest::Approx(b2));
  CHECK(a2 == doctest::Approx(b1));
  // past the upper edge player 1 pays K per unit
  const double d = nv.threshold() + 0.5;
  CHECK(nv.player_slope(d, 0.0) == doctest::Approx(1.0));
  CHECK(nv.eval(d, 0.0).first - nv.eval(nv.threshold(), 0.0).first == doctest::Approx(0.5));
}

TEST_CASE("pareto value uses half the cheaper cost") {
  auto r = Resolvent(RunningCost::quadratic(1.0), 1.0, 1.0);
  ParetoValue2P pv(r, 2.0, 1.0);
  CHECK(std::abs(pv.band().threshold() - oracle::kC1) < 1e-12);
  CHECK(std::abs(pv.eval(0.7, 0.7) - oracle::kV0) < 1e-13);
  CHECK(pareto_value_2p(1.2, 0.2, r, 1.0, 3.0) == doctest::Approx(pv.eval(1.2, 0.2)));
  CHECK(pv.eval(0.0, 0.0) < oracle::kNashBandCostHalfK);
}

TEST_CASE("outside band value is the projection plus the proportional cost") {
  auto pv = demo_value();
  const double c = pv.threshold();
  CHECK(outside_band_value(c + 0.7, pv, 0.5, 0.5) == doctest::Approx(pv.eval(c + 0.7).value));
  CHECK(outside_band_value(0.2, pv, 0.5, 0.5) == doctest::Approx(pv.eval(0.2).value));
  ProportionalCost l{{0.5, 0.5}, {1.0, 1.0}, {1.0, 1.0}};
  auto proj = two_player_band_projection(c, 1);
  RegionValue inside = [&](std::span<const double> x) { return pv.eval(x[0] - x[1]).value; };
  std::vector<double> x = {1.5, -0.2};
  auto px = proj(x);
  CHECK(px[0] == 1.5);
  CHECK(px[1] == doctest::Approx(1.5 - c));
  CHECK(outside_band_value(x, proj, inside, l) ==
        doctest::Approx(pv.eval(c).value + 0.5 * (1.7 - c)));
  std::vector<double> y = {0.1, 0.2};
  CHECK(proj(y) == y);
  CHECK_THROWS_AS(two_player_band_projection(c, 2), InvalidInput);
}

TEST_CASE("separable solution sums per-product values") {
  auto inv = fixture::three_products(false);
  inv.q = inv.p;
  SeparableSolution sol(inv);
  REQUIRE(sol.products().size() == 3);
  std::vector<double> x = {0.1, -0.4, 2.0};
  double s = 0;
  for (std::size_t j = 0; j < 3; ++j) s += sol.products()[j].eval(x[j]).value;
  CHECK(separable_value(sol, x) == doctest::Approx(s));
  std::vector<double> short_x = {0.0};
  CHECK_THROWS_AS(sol.value(short_x), InvalidInput);
}

TEST_CASE("value grid csv layout") {
  auto pv = demo_value();
  std::ostringstream os;
  write_value_grid_csv(os, pv, -1.0, 1.0, 3);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  CHECK(line == "x,v,dv,d2v,branch");
  int rows = 0;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == 3);
  CHECK(os.str().find('\r') == std::string::npos);
}
