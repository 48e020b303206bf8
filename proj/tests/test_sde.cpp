#include "fixtures.hpp"
#include "oracles.hpp"

#include "sck/errors.hpp"
#include "sck/reduction.hpp"
#include "sck/sde.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace sck;

namespace {

SimConfig short_config(std::size_t paths = 200) {
  SimConfig c;
  c.dt = 1e-2;
  c.horizon = 4.0;
  c.n_paths = paths;
  c.seed = 42;
  return c;
}

}  // namespace

TEST_CASE("skorokhod map on a hand-worked path") {
  std::vector<double> dz = {0.5, 0.7, -0.4, -1.5, 0.2};
  auto p = skorokhod_map_1d(dz, 1.0, 0.0);
  std::vector<double> x = {0.0, 0.5, 1.0, 0.6, -0.9, -0.7};
  std::vector<double> down = {0.0, 0.0, 0.2, 0.2, 0.2, 0.2};
  std::vector<double> up(6, 0.0);
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(p.x[k] == doctest::Approx(x[k]));
    CHECK(p.xi_minus[k] == doctest::Approx(down[k]));
    CHECK(p.xi_plus[k] == doctest::Approx(up[k]));
  }
  auto jump = skorokhod_map_1d(std::vector<double>{}, 1.0, -2.5);
  CHECK(jump.x[0] == -1.0);
  CHECK(jump.xi_plus[0] == 1.5);
}

TEST_CASE("skorokhod map properties on random paths") {
  std::mt19937_64 gen(5);
  std::normal_distribution<double> n(0.0, 0.3);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> dz(500);
    for (auto& z : dz) z = n(gen);
    const double c = 0.4 + 0.1 * trial;
    const double x0 = (trial % 3 - 1) * 2.0;
    auto p = skorokhod_map_1d(dz, c, x0);
    auto o = oracle::reflect(dz, c, x0);
    double free = x0;
    for (std::size_t k = 0; k < p.x.size(); ++k) {
      if (k) free += dz[k - 1];
      CHECK(std::abs(p.x[k]) <= c + 1e-12);
      CHECK(std::abs(p.x[k] - (free + p.xi_plus[k] - p.xi_minus[k])) < 1e-10);
      CHECK(std::abs(p.x[k] - o.x[k]) < 1e-12);
      CHECK(std::abs(p.xi_plus[k] - o.up[k]) < 1e-12);
      if (k) {
        CHECK(p.xi_plus[k] >= p.xi_plus[k - 1]);
        CHECK(p.xi_minus[k] >= p.xi_minus[k - 1]);
        // pushes happen only at the matching edge
        if (p.xi_plus[k] > p.xi_plus[k - 1]) CHECK(p.x[k] == -c);
        if (p.xi_minus[k] > p.xi_minus[k - 1]) CHECK(p.x[k] == c);
      }
    }
  }
}

TEST_CASE("path cost of a frozen path") {
  ReflectedPath p{{0.5, 0.5, 0.5}, {0.0, 0.0, 0.0}, {0.0, 0.0, 0.3}};
  const double dt = 0.1, rho = 1.0;
  const double e = std::exp(-rho * dt);
  const double running = 0.25 * 0.5 * dt * (1 + 2 * e + e * e);
  const double control = 2.0 * e * 0.3;
  CHECK(reflected_path_cost(p, RunningCost::quadratic(1.0), rho, dt, 1.0, 2.0) ==
        doctest::Approx(running + control).epsilon(1e-14));
}

TEST_CASE("summary statistics") {
  auto s = summarize_costs({1.0, 2.0, 3.0, 4.0}, false);
  CHECK(s.mean == doctest::Approx(2.5));
  CHECK(s.std_error == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  auto one = summarize_costs({1.0}, false);
  CHECK_FALSE(one.has_std_error());
  CHECK(std::isnan(one.std_error));
  auto pairs = summarize_costs({1.0, 3.0, 2.0, 6.0}, true);
  CHECK(pairs.mean == doctest::Approx(3.0));
  CHECK(pairs.std_error == doctest::Approx(1.0));
}

TEST_CASE("config validation") {
  SimConfig c = short_config(3);
  c.antithetic = true;
  CHECK_THROWS_AS(c.validate(), InvalidInput);
  c.n_paths = 4;
  CHECK_NOTHROW(c.validate());
  CHECK(c.steps() == 400);
  CHECK(SimConfig{}.discount_truncation(1.0) <= 1e-5);
}

TEST_CASE("parallel estimate matches the serial reference") {
  auto pr = fixture::demo_reduced();
  for (bool anti : {false, true}) {
    auto cfg = short_config();
    cfg.antithetic = anti;
    auto a = estimate_cost(cfg, pr, oracle::kC1);
    auto b = estimate_cost_serial(cfg, pr, oracle::kC1);
    CHECK(std::abs(a.mean - b.mean) <= 1e-12 * std::abs(b.mean));
    CHECK(std::abs(a.std_error - b.std_error) <= 1e-12 * b.std_error);
    REQUIRE(a.path_costs.size() == b.path_costs.size());
    for (std::size_t i = 0; i < a.path_costs.size(); ++i) {
      CHECK(std::abs(a.path_costs[i] - b.path_costs[i]) <= 1e-12 * std::abs(b.path_costs[i]));
    }
  }
}

TEST_CASE("estimate is deterministic in the seed") {
  auto pr = fixture::demo_reduced();
  auto cfg = short_config(50);
  auto a = estimate_cost(cfg, pr, oracle::kC1);
  auto b = estimate_cost(cfg, pr, oracle::kC1);
  CHECK(a.path_costs == b.path_costs);
  cfg.seed = 43;
  auto c = estimate_cost(cfg, pr, oracle::kC1);
  CHECK(a.path_costs != c.path_costs);
}

TEST_CASE("recorded paths reproduce the estimator streams") {
  auto pr = fixture::demo_reduced();
  auto cfg = short_config(3);
  auto rec = record_reflected_paths(cfg, pr, oracle::kC1, 2, 10);
  REQUIRE(rec.paths.size() == 2);
  CHECK(rec.dim == 1);
  CHECK(rec.paths[0].state.size() == 41);
  for (double x : rec.paths[1].state) CHECK(std::abs(x) <= oracle::kC1 + 1e-12);
  std::ostringstream os;
  write_paths_csv(os, rec);
  CHECK(os.str().rfind("path_id,t,x_1,xi_plus_1,xi_minus_1\n", 0) == 0);
}

TEST_CASE("two-player simulation on shared noise") {
  auto g = fixture::demo_game();
  auto cfg = short_config(100);
  std::vector<TwoPlayerPolicy> pol = {{PolicyKind::kPareto}, {PolicyKind::kNash}};
  auto batch = simulate_two_player(g, pol, cfg);
  REQUIRE(batch.policies.size() == 2);
  CHECK(batch.policies[0].band.c == doctest::Approx(oracle::kC1));
  CHECK(batch.policies[1].band.c == doctest::Approx(oracle::kC2));
  CHECK(batch.policies[0].max_abs_y <= oracle::kC1 + 1e-12);
  CHECK(batch.policies[1].max_abs_y <= oracle::kC2 + 1e-12);
  CHECK(batch.paired_diff_std_error > 0.0);
  for (const auto& s : batch.policies) {
    CHECK(s.aggregate.mean ==
          doctest::Approx(0.5 * (s.player[0].mean + s.player[1].mean)).epsilon(1e-12));
  }
  auto again = simulate_two_player(g, pol, cfg);
  CHECK(again.policies[0].aggregate.path_costs == batch.policies[0].aggregate.path_costs);
}

TEST_CASE("cheaper player carries all control") {
  auto g = fixture::demo_game(2.0, 1.0);
  auto s = simulate_two_player(g, TwoPlayerPolicy{PolicyKind::kPareto}, short_config(50));
  CHECK(s.band.upper_actor == 1);
  CHECK(s.band.lower_actor == 1);
  CHECK(s.max_xi[0] == 0.0);
  CHECK(s.max_xi[1] > 0.0);
  CHECK_THROWS_AS(
      simulate_two_player(g, TwoPlayerPolicy{PolicyKind::kNash}, short_config(10)), Error);
}

TEST_CASE("separable simulation") {
  auto inv = fixture::three_products(false);
  inv.q = inv.p;
  std::vector<double> b = {0.8, 0.9, 1.0};
  auto cfg = short_config(40);
  auto s = simulate_separable(inv, b, cfg);
  REQUIRE(s.products.size() == 3);
  double sum = 0;
  for (const auto& e : s.products) sum += e.mean;
  CHECK(s.total.mean == doctest::Approx(sum).epsilon(1e-12));
  CHECK(s.demand_adjustment == 0.0);
  auto none = inv;
  none.products = 0;
  none.y = {{}, {}};
  none.mu = {{}, {}};
  none.p = {{}, {}};
  none.q = {{}, {}};
  none.sigma = {{}, {}};
  none.costs = {{}, {}};
  none.profit = none.demand_drift = none.demand_vol = none.demand0 = {};
  auto z = simulate_separable(none, std::vector<double>{}, cfg);
  CHECK(z.total.mean == 0.0);
}

TEST_CASE("benchmark series identities") {
  std::vector<std::vector<double>> paths = {{1.0, 2.0, 3.0}, {3.0, 2.0, 1.0}};
  auto s = benchmark_series(paths, std::vector<double>{});
  CHECK(s.xbar == std::vector<double>{2.0, 2.0, 2.0});
  CHECK(s.mean == doctest::Approx(2.0));
  CHECK(s.variance == doctest::Approx(0.0));
  CHECK(s.spread_variance == doctest::Approx(2.0 / 3.0));
  std::vector<double> w = {1.0, 0.0};
  auto first = benchmark_series(paths, w);
  CHECK(first.xbar == paths[0]);
  CHECK(first.variance == doctest::Approx(2.0 / 3.0));
  std::vector<double> bad = {0.6, 0.6};
  CHECK_THROWS_AS(benchmark_series(paths, bad), InvalidInput);
}

TEST_CASE("stats csv prints NA for a missing error") {
  std::vector<StatRow> rows = {{"mean", 0.5, std::nan("")}, {"x", 1.25, 0.5}};
  std::ostringstream os;
  write_stats_csv(os, rows);
  CHECK(os.str() == "stat,value,stderr\nmean,0.5,NA\nx,1.25,0.5\n");
}
