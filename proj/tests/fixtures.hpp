#pragma once

#include "sck/model.hpp"

#include <cmath>

namespace fixture {

// Two players with orthogonal rows of norm sqrt(1/2), h = y^2, rho = 1, L = 1/2:
// the reduced problem has sigma = 1 and K_eff = K_min / 2.
inline sck::GameSpec demo_game(double k1 = 1.0, double k2 = 1.0) {
  sck::GameSpec g;
  g.rho = 1.0;
  const double s = std::sqrt(0.5);
  sck::Player a, b;
  a.sigma = {s, 0.0};
  b.sigma = {0.0, s};
  a.k_plus = a.k_minus = k1;
  b.k_plus = b.k_minus = k2;
  a.weight = b.weight = 0.5;
  g.players = {a, b};
  return g;
}

inline sck::ReducedProblem1D demo_reduced(double k_eff = 0.5) {
  sck::ReducedProblem1D r;
  r.k_plus = r.k_minus = k_eff;
  return r;
}

// M = 2 investors, P = 3 products, D = 2 production drivers.
inline sck::InvestmentSpec three_products(bool with_demand) {
  sck::InvestmentSpec inv;
  inv.investors = 2;
  inv.products = 3;
  inv.brownian_dim = 2;
  inv.y = {{0.1, -0.2, 0.0}, {0.3, 0.0, 0.2}};
  inv.mu = {{0.0, 0.1, 0.0}, {0.0, -0.1, 0.0}};
  inv.sigma = {{{0.5, 0.0}, {0.3, 0.2}, {0.0, 0.4}}, {{0.0, 0.5}, {0.2, 0.3}, {0.4, 0.0}}};
  inv.p = {{1.0, 2.0, 1.5}, {1.2, 1.8, 1.5}};
  inv.q = {{1.0, 1.8, 1.5}, {1.4, 2.0, 1.6}};
  inv.costs = {{sck::RunningCost::quadratic(1.0), sck::RunningCost::quadratic(0.5),
                sck::RunningCost::quadratic(2.0)},
               {sck::RunningCost::quadratic(1.0), sck::RunningCost::quadratic(1.5),
                sck::RunningCost::quadratic(1.0)}};
  inv.discount = 1.0;
  if (with_demand) {
    inv.profit = {0.8, 0.5, 1.2};
    inv.demand_drift = {0.1, -0.05, 0.2};
    inv.demand_vol = {0.3, 0.2, 0.25};
    inv.demand0 = {0.4, 0.6, 0.2};
  } else {
    inv.profit = {0.0, 0.0, 0.0};
    inv.demand_drift = {0.0, 0.0, 0.0};
    inv.demand_vol = {0.3, 0.2, 0.25};
    inv.demand0 = {0.0, 0.0, 0.0};
  }
  return inv;
}

}  // namespace fixture
