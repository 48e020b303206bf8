#include "sck/reduction.hpp"

#include "sck/errors.hpp"
#include "sck/rng.hpp"

#include <fmt/format.h>

#include <cmath>

namespace sck {

std::vector<ReducedProduct> reduce_central(const InvestmentSpec& inv) {
  inv.validate();
  const auto m = inv.investors;
  const auto d = inv.brownian_dim;
  std::vector<ReducedProduct> out(inv.products);
  for (std::size_t j = 0; j < inv.products; ++j) {
    auto& r = out[j];
    r.x0 = -inv.demand0[j];
    r.drift = -inv.demand_drift[j];
    r.sigma_row.assign(d + inv.products, 0.0);
    r.p_star = inv.p[0][j];
    r.q_star = inv.q[0][j];
    double joint2 = inv.demand_vol[j] * inv.demand_vol[j];
    for (std::size_t i = 0; i < m; ++i) {
      r.x0 += inv.y[i][j];
      r.drift += inv.mu[i][j];
      for (std::size_t k = 0; k < d; ++k) {
        r.sigma_row[k] += inv.sigma[i][j][k];
        joint2 += inv.sigma[i][j][k] * inv.sigma[i][j][k];
      }
      // strict comparison keeps the lowest index on ties
      if (inv.p[i][j] < r.p_star) {
        r.p_star = inv.p[i][j];
        r.i_plus = i;
      }
      if (inv.q[i][j] < r.q_star) {
        r.q_star = inv.q[i][j];
        r.i_minus = i;
      }
    }
    r.sigma_row[d + j] = -inv.demand_vol[j];
    if (inv.convention == VolatilityConvention::kJoint) {
      r.sigma_tilde = std::sqrt(joint2);
    } else {
      double n2 = 0.0;
      for (double s : r.sigma_row) n2 += s * s;
      r.sigma_tilde = std::sqrt(n2);
    }
    if (!inv.costs.empty()) {
      std::vector<RunningCost> column;
      for (std::size_t i = 0; i < m; ++i) column.push_back(inv.costs[i][j]);
      const std::vector<double> w(m, 1.0 / static_cast<double>(m));
      r.averaged_cost = RunningCost::weighted_sum(column, w);
    }
  }
  return out;
}

double demand_constant(const InvestmentSpec& inv) {
  if (!(inv.discount > 0.0)) throw InvalidInput("discount rate must be > 0");
  const double a = inv.discount;
  const double m = static_cast<double>(inv.investors);
  double s = 0.0;
  for (std::size_t j = 0; j < inv.products; ++j) {
    s += inv.profit[j] / m * (inv.demand_drift[j] / (a * a) + inv.demand0[j] / a);
  }
  return s;
}

ControlPath::ControlPath(std::size_t agents_, std::size_t products_, std::size_t steps_, double dt_)
    : agents(agents_),
      products(products_),
      steps(steps_),
      dt(dt_),
      expand(agents_ * products_ * steps_, 0.0),
      contract(agents_ * products_ * steps_, 0.0) {}

void ControlPath::validate() const {
  const auto n = agents * products * steps;
  if (expand.size() != n || contract.size() != n) {
    throw InvalidInput("control path storage does not match its shape");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (!(expand[k] >= 0.0) || !(contract[k] >= 0.0) || !std::isfinite(expand[k]) ||
        !std::isfinite(contract[k])) {
      throw InvalidInput("control increments must be finite and nonnegative");
    }
  }
}

ControlPath lift_control(const ControlPath& reduced, std::span<const ReducedProduct> products,
                         std::size_t investors) {
  reduced.validate();
  if (reduced.agents != 1 || reduced.products != products.size()) {
    throw InvalidInput("reduced control must have one agent and one slot per product");
  }
  ControlPath full(investors, reduced.products, reduced.steps, reduced.dt);
  for (std::size_t k = 0; k < reduced.steps; ++k) {
    for (std::size_t j = 0; j < reduced.products; ++j) {
      full.expand_at(k, products[j].i_plus, j) = reduced.expand_at(k, 0, j);
      full.contract_at(k, products[j].i_minus, j) = reduced.contract_at(k, 0, j);
    }
  }
  return full;
}

ControlPath aggregate_control(const ControlPath& full) {
  ControlPath out(1, full.products, full.steps, full.dt);
  for (std::size_t k = 0; k < full.steps; ++k) {
    for (std::size_t i = 0; i < full.agents; ++i) {
      for (std::size_t j = 0; j < full.products; ++j) {
        out.expand_at(k, 0, j) += full.expand_at(k, i, j);
        out.contract_at(k, 0, j) += full.contract_at(k, i, j);
      }
    }
  }
  return out;
}

InvestmentNoise sample_investment_noise(const InvestmentSpec& inv, std::size_t steps, double dt,
                                        std::uint64_t seed, std::uint64_t path) {
  InvestmentNoise n;
  n.steps = steps;
  n.dt = dt;
  n.production_dim = inv.brownian_dim;
  n.demand_dim = inv.products;
  n.db.resize(steps * n.production_dim);
  n.dw.resize(steps * n.demand_dim);
  PathRng rng(seed, path);
  const double sq = std::sqrt(dt);
  for (std::size_t k = 0; k < steps; ++k) {
    for (std::size_t a = 0; a < n.production_dim; ++a) n.db[k * n.production_dim + a] = sq * rng.normal();
    for (std::size_t a = 0; a < n.demand_dim; ++a) n.dw[k * n.demand_dim + a] = sq * rng.normal();
  }
  return n;
}

namespace {

void check_shapes(const InvestmentSpec& inv, const InvestmentNoise& noise, const ControlPath& c,
                  std::size_t agents) {
  if (noise.production_dim != inv.brownian_dim || noise.demand_dim != inv.products) {
    throw InvalidInput("noise dimensions do not match the investment spec");
  }
  if (c.agents != agents || c.products != inv.products || c.steps != noise.steps) {
    throw InvalidInput("control path shape does not match the noise/spec");
  }
  if (inv.costs.empty()) throw InvalidInput("cost evaluation needs the h_{i,j} costs");
}

}  // namespace

PathCost full_model_cost(const InvestmentSpec& inv, const InvestmentNoise& noise,
                         const ControlPath& full) {
  inv.validate();
  check_shapes(inv, noise, full, inv.investors);
  const auto m = inv.investors;
  const auto np = inv.products;
  const double inv_m = 1.0 / static_cast<double>(m);
  const double dt = noise.dt;
  const double decay = std::exp(-inv.discount * dt);

  auto capacity = inv.y;
  std::vector<double> demand = inv.demand0;
  std::vector<double> x(np);

  auto running = [&](double& demand_rate) {
    for (std::size_t j = 0; j < np; ++j) {
      x[j] = -demand[j];
      for (std::size_t i = 0; i < m; ++i) x[j] += capacity[i][j];
    }
    double f = 0.0;
    demand_rate = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        f += inv_m * (inv.costs[i][j].value(x[j]) - inv.profit[j] * capacity[i][j]);
      }
    }
    for (std::size_t j = 0; j < np; ++j) demand_rate -= inv.profit[j] * inv_m * demand[j];
    return f;
  };

  PathCost out;
  double disc = 1.0;
  double dprev = 0.0;
  double fprev = running(dprev);
  for (std::size_t k = 0; k < noise.steps; ++k) {
    const double* db = &noise.db[k * noise.production_dim];
    const double* dw = &noise.dw[k * noise.demand_dim];
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < np; ++j) {
        double inc = inv.mu[i][j] * dt + full.expand_at(k, i, j) - full.contract_at(k, i, j);
        for (std::size_t a = 0; a < noise.production_dim; ++a) inc += inv.sigma[i][j][a] * db[a];
        capacity[i][j] += inc;
        out.total += disc * inv_m *
                     (inv.p[i][j] * full.expand_at(k, i, j) + inv.q[i][j] * full.contract_at(k, i, j));
      }
    }
    for (std::size_t j = 0; j < np; ++j) {
      demand[j] += inv.demand_drift[j] * dt + inv.demand_vol[j] * dw[j];
    }
    const double next = disc * decay;
    double dnext = 0.0;
    const double fnext = running(dnext);
    out.total += 0.5 * dt * (disc * fprev + next * fnext);
    out.demand_term += 0.5 * dt * (disc * dprev + next * dnext);
    disc = next;
    fprev = fnext;
    dprev = dnext;
  }
  out.final_state = x;
  return out;
}

PathCost reduced_model_cost(const InvestmentSpec& inv, std::span<const ReducedProduct> products,
                            const InvestmentNoise& noise, const ControlPath& reduced) {
  inv.validate();
  check_shapes(inv, noise, reduced, 1);
  if (products.size() != inv.products) throw InvalidInput("one reduced product per product");
  const auto m = inv.investors;
  const auto np = inv.products;
  const auto d = inv.brownian_dim;
  const double inv_m = 1.0 / static_cast<double>(m);
  const double dt = noise.dt;
  const double decay = std::exp(-inv.discount * dt);

  std::vector<double> x(np);
  for (std::size_t j = 0; j < np; ++j) x[j] = products[j].x0;
  auto running = [&] {
    double f = 0.0;
    for (std::size_t j = 0; j < np; ++j) {
      for (std::size_t i = 0; i < m; ++i) f += inv_m * inv.costs[i][j].value(x[j]);
      f -= inv.profit[j] * inv_m * x[j];
    }
    return f;
  };

  PathCost out;
  double disc = 1.0;
  double fprev = running();
  for (std::size_t k = 0; k < noise.steps; ++k) {
    const double* db = &noise.db[k * d];
    const double* dw = &noise.dw[k * np];
    for (std::size_t j = 0; j < np; ++j) {
      const auto& pr = products[j];
      double inc = pr.drift * dt + reduced.expand_at(k, 0, j) - reduced.contract_at(k, 0, j);
      for (std::size_t a = 0; a < d; ++a) inc += pr.sigma_row[a] * db[a];
      for (std::size_t a = 0; a < np; ++a) inc += pr.sigma_row[d + a] * dw[a];
      x[j] += inc;
      out.total += disc * inv_m *
                   (pr.p_star * reduced.expand_at(k, 0, j) + pr.q_star * reduced.contract_at(k, 0, j));
    }
    const double next = disc * decay;
    const double fnext = running();
    out.total += 0.5 * dt * (disc * fprev + next * fnext);
    disc = next;
    fprev = fnext;
  }
  out.final_state = x;
  return out;
}

TwoPlayerReduction reduce_two_player(const GameSpec& spec, double x1, double x2) {
  spec.validate();
  if (spec.n() != 2 || spec.cost_form != CostForm::kDifference) {
    throw UnsupportedCase("two-player reduction needs N = 2 with costs of x^1 - x^2");
  }
  const auto& p1 = spec.players[0];
  const auto& p2 = spec.players[1];
  if (p1.k_plus != p1.k_minus || p2.k_plus != p2.k_minus) {
    throw UnsupportedCase(
        "asymmetric intervention costs (K+ != K-) have no closed form; use the FD solver");
  }
  if (p1.weight != p2.weight) {
    throw UnsupportedCase("two-player reduction is implemented for equal welfare weights only");
  }
  if (p1.drift != p2.drift) {
    throw UnsupportedCase("two-player reduction needs equal drifts (zero drift of x^1 - x^2)");
  }

  TwoPlayerReduction out;
  out.acting_player = (p1.k_plus < p2.k_plus) ? 0 : 1;
  out.policy_unique = p1.k_plus != p2.k_plus;
  const auto& actor = spec.players[out.acting_player];

  const std::vector<std::vector<double>> rows{p1.sigma, p2.sigma};
  std::vector<RunningCost> costs{p1.cost, p2.cost};
  const std::vector<double> w{p1.weight, p2.weight};

  auto& r = out.problem;
  r.sigma_tilde = effective_volatility(rows, spec.convention);
  r.rho = spec.rho;
  r.k_plus = r.k_minus = actor.weight * actor.k_plus;
  r.drift = 0.0;
  r.cost = RunningCost::weighted_sum(costs, w);
  r.x0 = x1 - x2;
  return out;
}

}  // namespace sck
