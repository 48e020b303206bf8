#include "fixtures.hpp"
#include "oracles.hpp"

#include "sck/errors.hpp"
#include "sck/model.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace sck;

namespace {

RunningCost soft_cost() {
  return RunningCost::custom([](double z) { return std::sqrt(1 + z * z) + 0.5 * z * z; },
                             [](double z) { return z / std::sqrt(1 + z * z) + z; },
                             [](double z) { return std::pow(1 + z * z, -1.5) + 1.0; }, 1.0, 2.0);
}

}  // namespace

TEST_CASE("quadratic resolvent matches the closed form") {
  oracle::Quadratic q{1.5, 1.3, 0.7, 0.5};
  Resolvent res(RunningCost::quadratic(1.5), 1.3, 0.7);
  CHECK(res.closed_form());
  for (double x : {-2.0, -0.3, 0.0, 0.8, 3.0}) {
    auto j = res.eval(x);
    CHECK(j.value == doctest::Approx(double(q.p(x))).epsilon(1e-14));
    CHECK(j.slope == doctest::Approx(double(q.dp(x))).epsilon(1e-14));
    CHECK(j.curvature == doctest::Approx(double(q.d2p())).epsilon(1e-14));
  }
  CHECK(res.rate() == doctest::Approx(std::sqrt(1.4) / 1.3));
}

TEST_CASE("quadrature resolvent agrees with the closed form") {
  ResolventOptions opt;
  opt.force_quadrature = true;
  Resolvent quad(RunningCost::quadratic(1.0, 0.2, 0.1), 1.0, 1.0, opt);
  Resolvent exact(RunningCost::quadratic(1.0, 0.2, 0.1), 1.0, 1.0);
  CHECK_FALSE(quad.closed_form());
  for (double x : {-1.5, 0.0, 0.2, 1.0}) {
    CHECK(std::abs(quad.value(x) - exact.value(x)) < 1e-8);
    CHECK(std::abs(quad.slope(x) - exact.slope(x)) < 1e-8);
    CHECK(std::abs(quad.curvature(x) - exact.curvature(x)) < 1e-8);
  }
}

TEST_CASE("custom cost resolvent matches high-precision values") {
  Resolvent res(soft_cost(), oracle::kCustomSigma, oracle::kCustomRho);
  for (const auto& row : oracle::kCustomP) CHECK(std::abs(res.value(row[0]) - row[1]) < 1e-8);
}

TEST_CASE("resolvent solves rho p - (sigma^2/2) p'' = h") {
  RunningCost h = soft_cost();
  Resolvent res(h, oracle::kCustomSigma, oracle::kCustomRho);
  const double s2 = oracle::kCustomSigma * oracle::kCustomSigma;
  for (double x : {-1.0, 0.0, 0.7, 2.0}) {
    auto j = res.eval(x);
    CHECK(std::abs(oracle::kCustomRho * j.value - 0.5 * s2 * j.curvature - h.value(x)) < 1e-7);
  }
}

TEST_CASE("resolvent curvature stays within the cost curvature bounds over rho") {
  Resolvent res(soft_cost(), 1.0, 1.0);
  for (double x = -3; x <= 3; x += 0.25) {
    CHECK(res.curvature(x) >= 1.0 - 1e-8);
    CHECK(res.curvature(x) <= 2.0 + 1e-8);
  }
}

TEST_CASE("custom cost rejects bad curvature bounds") {
  auto bad = RunningCost::custom([](double z) { return z * z; }, [](double z) { return 2 * z; },
                                 [](double) { return 2.0; }, 3.0, 4.0);
  CHECK_THROWS_AS(bad.check_curvature_bounds(), DegenerateError);
  CHECK_THROWS_AS(RunningCost::custom(nullptr, nullptr, nullptr, 1, 2), InvalidInput);
}

TEST_CASE("weighted sum of quadratics stays quadratic") {
  std::vector<RunningCost> costs = {RunningCost::quadratic(1.0), RunningCost::quadratic(3.0)};
  std::vector<double> w = {0.5, 0.5};
  auto s = RunningCost::weighted_sum(costs, w);
  CHECK(s.is_quadratic());
  CHECK(s.quad_curvature() == doctest::Approx(2.0));
  CHECK(s.value(1.5) == doctest::Approx(4.5));
  CHECK(soft_cost().symmetry_defect() < 1e-14);
}

TEST_CASE("effective volatility conventions") {
  std::vector<std::vector<double>> rows = {{0.6, 0.0}, {0.0, 0.8}};
  CHECK(effective_volatility(rows, VolatilityConvention::kJoint) == doctest::Approx(1.0));
  CHECK(effective_volatility(rows, VolatilityConvention::kDifference) == doctest::Approx(1.0));
  std::vector<std::vector<double>> same = {{0.5, 0.0}, {0.5, 0.0}};
  CHECK(effective_volatility(same, VolatilityConvention::kJoint) ==
        doctest::Approx(std::sqrt(0.5)));
  CHECK_THROWS_AS(effective_volatility(same, VolatilityConvention::kDifference), DegenerateError);
}

TEST_CASE("game validation") {
  auto g = fixture::demo_game();
  CHECK_NOTHROW(g.validate());
  auto bad = g;
  bad.rho = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = g;
  bad.players[0].weight = 0.7;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = g;
  bad.players[1].k_plus = 0.0;
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  bad = g;
  bad.players[1].sigma = {1.0};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
}

TEST_CASE("difference cost curvature is measured along the spread") {
  auto rep = validate_assumptions(fixture::demo_game());
  CHECK(rep.all_passed());
  REQUIRE(rep.find("curvature_lower_bound") != nullptr);
  // h = y^2 with weights 1/2 each: d2H/dy2 = 2
  CHECK(rep.find("curvature_lower_bound")->value == doctest::Approx(2.0));
  CHECK(rep.find("curvature_upper_bound")->value == doctest::Approx(2.0));
  CHECK(rep.find("no_such_check") == nullptr);
}

TEST_CASE("interbank cost passes every assumption") {
  std::vector<double> kappa = {1.0, 0.5, 2.0}, nu = {0.1, 0.2, 0.3}, a = {0.2, 0.3, 0.5},
                      w = {0.3, 0.3, 0.4};
  GameSpec g;
  g.cost_form = CostForm::kJoint;
  g.joint = interbank_running_cost(kappa, nu, a, w);
  g.benchmark_weights = a;
  for (std::size_t i = 0; i < 3; ++i) {
    Player p;
    p.sigma = {0.0, 0.0, 0.0};
    p.sigma[i] = 0.5;
    p.weight = w[i];
    g.players.push_back(p);
  }
  auto rep = validate_assumptions(g);
  for (const auto& c : rep.checks) {
    CAPTURE(c.name);
    CHECK(c.passed);
  }
}

TEST_CASE("zero cost fails the curvature lower bound") {
  GameSpec g = fixture::demo_game();
  g.cost_form = CostForm::kJoint;
  JointCost zero;
  zero.dim = 2;
  zero.value = [](const Eigen::VectorXd&) { return 0.0; };
  zero.gradient = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(2).eval(); };
  zero.hessian = [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(2, 2).eval(); };
  g.joint = zero;
  auto rep = validate_assumptions(g);
  CHECK_FALSE(rep.find("curvature_lower_bound")->passed);
}

TEST_CASE("interbank cost gradient and hessian match finite differences") {
  std::vector<double> kappa = {1.0, 0.5, 2.0}, nu = {0.1, 0.2, 0.0}, a = {0.2, 0.3, 0.5},
                      w = {0.3, 0.3, 0.4};
  auto jc = interbank_running_cost(kappa, nu, a, w);
  REQUIRE(jc.dim == 3);
  Eigen::VectorXd x(3);
  x << 0.4, -0.7, 1.1;
  auto g = jc.gradient(x);
  auto hm = jc.hessian(x);
  const double e = 1e-6;
  for (int i = 0; i < 3; ++i) {
    Eigen::VectorXd xp = x, xm = x;
    xp(i) += e;
    xm(i) -= e;
    CHECK(std::abs((jc.value(xp) - jc.value(xm)) / (2 * e) - g(i)) < 1e-7);
    auto dg = ((jc.gradient(xp) - jc.gradient(xm)) / (2 * e)).eval();
    for (int k = 0; k < 3; ++k) CHECK(std::abs(dg(k) - hm(k, i)) < 1e-6);
  }
  CHECK(jc.value(Eigen::VectorXd::Zero(3)) == doctest::Approx(0.0));
}
