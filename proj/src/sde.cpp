#include "sck/sde.hpp"

#include "sck/csv.hpp"
#include "sck/errors.hpp"
#include "sck/reduction.hpp"
#include "sck/rng.hpp"
#include "sck/thresholds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace sck {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream and sign of a path under antithetic pairing.
struct StreamRef {
  std::uint64_t stream;
  double sign;
};

StreamRef stream_of(const SimConfig& cfg, std::size_t path) {
  if (!cfg.antithetic) return {path, 1.0};
  return {path / 2, (path % 2 == 0) ? 1.0 : -1.0};
}

double band_h_max(const RunningCost& h, double c) { return std::max(h.value(c), h.value(-c)); }

}  // namespace

std::size_t SimConfig::steps() const {
  return static_cast<std::size_t>(std::llround(horizon / dt));
}

double SimConfig::discount_truncation(double rho) const { return std::exp(-rho * horizon); }

void SimConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidInput("dt must be > 0");
  if (!(horizon >= dt) || !std::isfinite(horizon)) throw InvalidInput("horizon must be >= dt");
  if (n_paths < 1) throw InvalidInput("n_paths must be >= 1");
  if (antithetic && n_paths % 2 != 0) {
    throw InvalidInput("antithetic sampling needs an even number of paths");
  }
}

// ---------------------------------------------------------------------------

ReflectedPath skorokhod_map_1d(std::span<const double> increments, double c, double x0) {
  if (!(c > 0.0)) throw InvalidInput(fmt::format("invalid band c = {}", c));
  const std::size_t n = increments.size();
  ReflectedPath out;
  out.x.resize(n + 1);
  out.xi_plus.resize(n + 1);
  out.xi_minus.resize(n + 1);
  double x = x0, up = 0.0, down = 0.0;
  if (x > c) {
    down = x - c;
    x = c;
  } else if (x < -c) {
    up = -c - x;
    x = -c;
  }
  out.x[0] = x;
  out.xi_plus[0] = up;
  out.xi_minus[0] = down;
  for (std::size_t k = 0; k < n; ++k) {
    x += increments[k];
    if (x > c) {
      down += x - c;
      x = c;
    } else if (x < -c) {
      up += -c - x;
      x = -c;
    }
    out.x[k + 1] = x;
    out.xi_plus[k + 1] = up;
    out.xi_minus[k + 1] = down;
  }
  return out;
}

double reflected_path_cost(const ReflectedPath& path, const RunningCost& h, double rho, double dt,
                           double k_plus, double k_minus) {
  const std::size_t n = path.x.size() - 1;
  const double decay = std::exp(-rho * dt);
  double control = k_plus * path.xi_plus[0] + k_minus * path.xi_minus[0];
  double running = 0.0;
  double disc = 1.0;
  double h_prev = h.value(path.x[0]);
  for (std::size_t k = 0; k < n; ++k) {
    const double d_up = path.xi_plus[k + 1] - path.xi_plus[k];
    const double d_down = path.xi_minus[k + 1] - path.xi_minus[k];
    control += disc * (k_plus * d_up + k_minus * d_down);
    const double disc_next = disc * decay;
    const double h_next = h.value(path.x[k + 1]);
    running += 0.5 * dt * (disc * h_prev + disc_next * h_next);
    disc = disc_next;
    h_prev = h_next;
  }
  return running + control;
}

bool CostEstimate::has_std_error() const { return !std::isnan(std_error); }

CostEstimate summarize_costs(std::vector<double> costs, bool antithetic) {
  CostEstimate out;
  out.n_paths = costs.size();
  if (costs.empty()) {
    out.std_error = kNaN;
    out.path_costs = std::move(costs);
    return out;
  }
  double sum = 0.0;
  for (double v : costs) sum += v;
  out.mean = sum / static_cast<double>(costs.size());

  std::size_t m = costs.size();
  auto sample = [&](std::size_t i) {
    return antithetic ? 0.5 * (costs[2 * i] + costs[2 * i + 1]) : costs[i];
  };
  if (antithetic) m /= 2;
  if (m < 2) {
    out.std_error = kNaN;
  } else {
    double ss = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double d = sample(i) - out.mean;
      ss += d * d;
    }
    out.std_error = std::sqrt(ss / static_cast<double>(m - 1) / static_cast<double>(m));
  }
  out.path_costs = std::move(costs);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

template <class Cost>
double fused_path_cost(const SimConfig& cfg, const ReducedProblem1D& pr, double c, std::size_t path,
                       const Cost& h) {
  const std::size_t n = cfg.steps();
  const auto [stream, sign] = stream_of(cfg, path);
  PathRng rng(cfg.seed, stream);
  const double mean_inc = pr.drift * cfg.dt;
  const double vol = sign * pr.sigma_tilde * std::sqrt(cfg.dt);
  const double decay = std::exp(-pr.rho * cfg.dt);

  double x = pr.x0;
  double control = 0.0;
  if (x > c) {
    control = pr.k_minus * (x - c);
    x = c;
  } else if (x < -c) {
    control = pr.k_plus * (-c - x);
    x = -c;
  }
  double running = 0.0;
  double disc = 1.0;
  double h_prev = h(x);
  for (std::size_t k = 0; k < n; ++k) {
    x += mean_inc + vol * rng.normal();
    double d_up = 0.0, d_down = 0.0;
    if (x > c) {
      d_down = x - c;
      x = c;
    } else if (x < -c) {
      d_up = -c - x;
      x = -c;
    }
    control += disc * (pr.k_plus * d_up + pr.k_minus * d_down);
    const double disc_next = disc * decay;
    const double h_next = h(x);
    running += 0.5 * cfg.dt * (disc * h_prev + disc_next * h_next);
    disc = disc_next;
    h_prev = h_next;
  }
  return running + control;
}

std::vector<double> driver_increments(const SimConfig& cfg, const ReducedProblem1D& pr,
                                      std::size_t path) {
  const auto [stream, sign] = stream_of(cfg, path);
  PathRng rng(cfg.seed, stream);
  const double vol = sign * pr.sigma_tilde * std::sqrt(cfg.dt);
  std::vector<double> inc(cfg.steps());
  for (auto& d : inc) d = pr.drift * cfg.dt + vol * rng.normal();
  return inc;
}

void check_band_problem(const SimConfig& cfg, const ReducedProblem1D& pr, double c) {
  cfg.validate();
  pr.validate();
  if (!(c > 0.0)) throw InvalidInput(fmt::format("invalid band c = {}", c));
}

}  // namespace

CostEstimate estimate_cost(const SimConfig& config, const ReducedProblem1D& problem, double c) {
  check_band_problem(config, problem, c);
  const auto n = static_cast<std::int64_t>(config.n_paths);
  std::vector<double> costs(config.n_paths);
  if (problem.cost.is_quadratic()) {
    const double a = problem.cost.quad_curvature();
    const double s0 = problem.cost.center();
    const double off = problem.cost.quad_offset();
    auto h = [a, s0, off](double x) {
      const double d = x - s0;
      return a * d * d + off;
    };
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      costs[i] = fused_path_cost(config, problem, c, static_cast<std::size_t>(i), h);
    }
  } else {
    auto h = [&cost = problem.cost](double x) { return cost.value(x); };
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      costs[i] = fused_path_cost(config, problem, c, static_cast<std::size_t>(i), h);
    }
  }
  auto out = summarize_costs(std::move(costs), config.antithetic);
  out.truncation_bound =
      band_h_max(problem.cost, c) * config.discount_truncation(problem.rho) / problem.rho;
  return out;
}

CostEstimate estimate_cost_serial(const SimConfig& config, const ReducedProblem1D& problem,
                                  double c) {
  check_band_problem(config, problem, c);
  std::vector<double> costs(config.n_paths);
  for (std::size_t i = 0; i < config.n_paths; ++i) {
    const auto inc = driver_increments(config, problem, i);
    const auto path = skorokhod_map_1d(inc, c, problem.x0);
    costs[i] = reflected_path_cost(path, problem.cost, problem.rho, config.dt, problem.k_plus,
                                   problem.k_minus);
  }
  auto out = summarize_costs(std::move(costs), config.antithetic);
  out.truncation_bound =
      band_h_max(problem.cost, c) * config.discount_truncation(problem.rho) / problem.rho;
  return out;
}

RecordedPaths record_reflected_paths(const SimConfig& config, const ReducedProblem1D& problem,
                                     double c, std::size_t n_record, std::size_t stride) {
  check_band_problem(config, problem, c);
  if (stride < 1) throw InvalidInput("stride must be >= 1");
  RecordedPaths rec;
  rec.dt = config.dt;
  rec.dim = 1;
  rec.stride = stride;
  for (std::size_t i = 0; i < std::min(n_record, config.n_paths); ++i) {
    const auto path = skorokhod_map_1d(driver_increments(config, problem, i), c, problem.x0);
    RecordedPaths::Path p;
    for (std::size_t k = 0; k < path.x.size(); k += stride) {
      p.state.push_back(path.x[k]);
      p.xi_plus.push_back(path.xi_plus[k]);
      p.xi_minus.push_back(path.xi_minus[k]);
    }
    rec.paths.push_back(std::move(p));
  }
  return rec;
}

// ---------------------------------------------------------------------------

PolicyKind parse_policy(std::string_view name) {
  if (name == "pareto") return PolicyKind::kPareto;
  if (name == "nash") return PolicyKind::kNash;
  if (name == "custom") return PolicyKind::kCustomBand;
  throw InvalidInput(fmt::format("unknown policy '{}' (expected pareto, nash or custom)", name));
}

std::string_view policy_name(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::kPareto: return "pareto";
    case PolicyKind::kNash: return "nash";
    case PolicyKind::kCustomBand: return "custom";
  }
  return "?";
}

ResolvedBand resolve_band(const GameSpec& spec, const TwoPlayerPolicy& policy) {
  spec.validate();
  if (spec.n() != 2) throw UnsupportedCase("two-player simulation needs N = 2");
  const auto& p1 = spec.players[0];
  const auto& p2 = spec.players[1];
  const bool equal_costs = p1.k_plus == p2.k_plus && p1.k_minus == p2.k_minus;

  ResolvedBand band;
  auto paper_split = [&] {
    band.upper_actor = (policy.split == ControlSplit::kPaper) ? 0 : 1;
    band.lower_actor = 1;
  };

  switch (policy.kind) {
    case PolicyKind::kPareto: {
      const auto red = reduce_two_player(spec);
      const Resolvent res(red.problem.cost, red.problem.sigma_tilde, red.problem.rho);
      band.c = solve_threshold(res, red.problem.k_plus).c;
      if (red.policy_unique) {
        band.upper_actor = band.lower_actor = red.acting_player;
      } else {
        paper_split();
      }
      break;
    }
    case PolicyKind::kNash: {
      if (!equal_costs) {
        throw UnsupportedCase("the Nash band is implemented for equal intervention costs only");
      }
      const auto red = reduce_two_player(spec);
      const Resolvent res(p1.cost, red.problem.sigma_tilde, red.problem.rho);
      band.c = solve_threshold(res, p1.k_plus).c;
      paper_split();
      break;
    }
    case PolicyKind::kCustomBand: {
      if (!(policy.c > 0.0)) throw InvalidInput(fmt::format("invalid band c = {}", policy.c));
      band.c = policy.c;
      if (equal_costs) {
        paper_split();
      } else {
        const std::size_t cheaper = (p1.k_plus + p1.k_minus < p2.k_plus + p2.k_minus) ? 0 : 1;
        band.upper_actor = band.lower_actor = cheaper;
      }
      break;
    }
  }
  return band;
}

namespace {

struct PlayerState {
  double x[2];
  double xi_plus[2] = {0.0, 0.0};
  double xi_minus[2] = {0.0, 0.0};
  double running[2] = {0.0, 0.0};
  double control[2] = {0.0, 0.0};
  double max_abs_y = 0.0;
  double disp = 0.0;

  // Moves the acting coordinate so that |x1 - x2| <= c; returns the
  // increments of (xi^{1,+}, xi^{1,-}, xi^{2,+}, xi^{2,-}).
  void project(const ResolvedBand& b, double out[4]) {
    out[0] = out[1] = out[2] = out[3] = 0.0;
    const double y = x[0] - x[1];
    if (y > b.c) {
      const double e = y - b.c;
      if (b.upper_actor == 0) {
        x[0] -= e;
        out[1] = e;
      } else {
        x[1] += e;
        out[2] = e;
      }
    } else if (y < -b.c) {
      const double e = -b.c - y;
      if (b.lower_actor == 0) {
        x[0] += e;
        out[0] = e;
      } else {
        x[1] -= e;
        out[3] = e;
      }
    }
    xi_plus[0] += out[0];
    xi_minus[0] += out[1];
    xi_plus[1] += out[2];
    xi_minus[1] += out[3];
  }
};

}  // namespace

TwoPlayerBatch simulate_two_player(const GameSpec& spec, std::span<const TwoPlayerPolicy> policies,
                                   const SimConfig& config, std::array<double, 2> x0,
                                   std::size_t n_record, std::size_t stride) {
  config.validate();
  if (policies.empty()) throw InvalidInput("no policies to simulate");
  if (stride < 1) throw InvalidInput("stride must be >= 1");
  std::vector<ResolvedBand> bands;
  for (const auto& p : policies) bands.push_back(resolve_band(spec, p));

  const std::size_t np = policies.size();
  const std::size_t n_paths = config.n_paths;
  const std::size_t steps = config.steps();
  const std::size_t dim = spec.brownian_dim();
  const std::size_t half = steps / 2;
  const double sq = std::sqrt(config.dt);
  const double decay = std::exp(-spec.rho * config.dt);
  const auto& pl = spec.players;
  const double w[2] = {pl[0].weight, pl[1].weight};

  // [policy][path]
  std::vector<std::vector<double>> j1(np, std::vector<double>(n_paths)), j2 = j1, agg = j1,
                                                                          disp = j1, ymax = j1,
                                                                          xi1 = j1, xi2 = j1;
  TwoPlayerBatch batch;
  batch.samples.dt = config.dt;
  batch.samples.dim = 2;
  batch.samples.stride = stride;
  batch.samples.paths.resize(std::min(n_record, n_paths));

  const auto n = static_cast<std::int64_t>(n_paths);
#pragma omp parallel for schedule(static)
  for (std::int64_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const auto [stream, sign] = stream_of(config, i);
    PathRng rng(config.seed, stream);
    std::vector<PlayerState> st(np);
    double inc[4];
    RecordedPaths::Path* rec = i < batch.samples.paths.size() ? &batch.samples.paths[i] : nullptr;
    auto record = [&](const PlayerState& s) {
      for (int q = 0; q < 2; ++q) {
        rec->state.push_back(s.x[q]);
        rec->xi_plus.push_back(s.xi_plus[q]);
        rec->xi_minus.push_back(s.xi_minus[q]);
      }
    };
    std::vector<double> h_prev(2 * np);
    for (std::size_t p = 0; p < np; ++p) {
      auto& s = st[p];
      s.x[0] = x0[0];
      s.x[1] = x0[1];
      s.project(bands[p], inc);
      for (int q = 0; q < 2; ++q) {
        s.control[q] = pl[q].k_plus * s.xi_plus[q] + pl[q].k_minus * s.xi_minus[q];
        h_prev[2 * p + q] = pl[q].cost.value(s.x[0] - s.x[1]);
      }
    }
    if (rec) record(st[0]);

    std::vector<double> db(dim);
    double disc = 1.0;
    for (std::size_t k = 0; k < steps; ++k) {
      for (auto& b : db) b = sign * sq * rng.normal();
      double dx[2];
      for (int q = 0; q < 2; ++q) {
        dx[q] = pl[q].drift * config.dt;
        for (std::size_t d = 0; d < dim; ++d) dx[q] += pl[q].sigma[d] * db[d];
      }
      const double disc_next = disc * decay;
      for (std::size_t p = 0; p < np; ++p) {
        auto& s = st[p];
        s.x[0] += dx[0];
        s.x[1] += dx[1];
        s.project(bands[p], inc);
        s.control[0] += disc * (pl[0].k_plus * inc[0] + pl[0].k_minus * inc[1]);
        s.control[1] += disc * (pl[1].k_plus * inc[2] + pl[1].k_minus * inc[3]);
        const double y = s.x[0] - s.x[1];
        for (int q = 0; q < 2; ++q) {
          const double hn = pl[q].cost.value(y);
          s.running[q] += 0.5 * config.dt * (disc * h_prev[2 * p + q] + disc_next * hn);
          h_prev[2 * p + q] = hn;
        }
        s.max_abs_y = std::max(s.max_abs_y, std::abs(y));
        if (k + 1 > half) s.disp += y * y;
      }
      disc = disc_next;
      if (rec && (k + 1) % stride == 0) record(st[0]);
    }
    for (std::size_t p = 0; p < np; ++p) {
      const auto& s = st[p];
      j1[p][i] = s.running[0] + s.control[0];
      j2[p][i] = s.running[1] + s.control[1];
      agg[p][i] = w[0] * j1[p][i] + w[1] * j2[p][i];
      disp[p][i] = s.disp / static_cast<double>(steps - half);
      ymax[p][i] = s.max_abs_y;
      xi1[p][i] = s.xi_plus[0] + s.xi_minus[0];
      xi2[p][i] = s.xi_plus[1] + s.xi_minus[1];
    }
  }

  for (std::size_t p = 0; p < np; ++p) {
    TwoPlayerStats s;
    s.band = bands[p];
    s.max_abs_y = *std::max_element(ymax[p].begin(), ymax[p].end());
    s.max_xi[0] = *std::max_element(xi1[p].begin(), xi1[p].end());
    s.max_xi[1] = *std::max_element(xi2[p].begin(), xi2[p].end());
    s.player[0] = summarize_costs(std::move(j1[p]), config.antithetic);
    s.player[1] = summarize_costs(std::move(j2[p]), config.antithetic);
    s.aggregate = summarize_costs(agg[p], config.antithetic);
    s.dispersion = summarize_costs(std::move(disp[p]), config.antithetic);
    batch.policies.push_back(std::move(s));
  }
  batch.paired_diff_std_error = kNaN;
  if (np >= 2) {
    std::vector<double> diff(n_paths);
    for (std::size_t i = 0; i < n_paths; ++i) diff[i] = agg[0][i] - agg[1][i];
    batch.paired_diff_std_error = summarize_costs(std::move(diff), config.antithetic).std_error;
  }
  return batch;
}

TwoPlayerStats simulate_two_player(const GameSpec& spec, const TwoPlayerPolicy& policy,
                                   const SimConfig& config) {
  const TwoPlayerPolicy one[1] = {policy};
  return std::move(simulate_two_player(spec, one, config).policies.front());
}

// ---------------------------------------------------------------------------

SeparableBatch simulate_separable(const InvestmentSpec& inv, std::span<const double> thresholds,
                                  const SimConfig& config, bool include_demand) {
  config.validate();
  SeparableBatch out;
  if (inv.products == 0) {
    out.total = summarize_costs(std::vector<double>(config.n_paths, 0.0), config.antithetic);
    return out;
  }
  const auto products = reduce_central(inv);
  if (thresholds.size() != products.size()) {
    throw InvalidInput(fmt::format("{} thresholds for {} products", thresholds.size(),
                                   products.size()));
  }
  const double m = static_cast<double>(inv.investors);
  std::vector<double> total(config.n_paths, 0.0);
  for (std::size_t j = 0; j < products.size(); ++j) {
    const auto& pr = products[j];
    if (!pr.averaged_cost) throw InvalidInput("separable simulation needs per-product costs");
    ReducedProblem1D prob;
    prob.sigma_tilde = pr.sigma_tilde;
    prob.rho = inv.discount;
    prob.k_plus = pr.p_star / m;
    prob.k_minus = pr.q_star / m;
    prob.drift = pr.drift;
    prob.cost = *pr.averaged_cost;
    prob.x0 = pr.x0;
    SimConfig cfg = config;
    cfg.seed = stream_seed(config.seed, 0x5eedULL + j);
    auto est = estimate_cost(cfg, prob, thresholds[j]);
    for (std::size_t i = 0; i < config.n_paths; ++i) total[i] += est.path_costs[i];
    out.products.push_back(std::move(est));
  }
  if (include_demand) {
    out.demand_adjustment = demand_constant(inv);
    for (auto& v : total) v -= out.demand_adjustment;
  }
  out.total = summarize_costs(std::move(total), config.antithetic);
  for (const auto& e : out.products) out.total.truncation_bound += e.truncation_bound;
  return out;
}

// ---------------------------------------------------------------------------

BenchmarkSeries benchmark_series(std::span<const std::vector<double>> paths,
                                 std::span<const double> weights) {
  const std::size_t n = paths.size();
  if (n == 0) throw InvalidInput("benchmark needs at least one path");
  const std::size_t len = paths.front().size();
  for (const auto& p : paths) {
    if (p.size() != len) throw InvalidInput("benchmark paths differ in length");
  }
  if (len == 0) throw InvalidInput("benchmark paths are empty");
  std::vector<double> a(weights.begin(), weights.end());
  if (a.empty()) a.assign(n, 1.0 / static_cast<double>(n));
  if (a.size() != n) throw InvalidInput("benchmark weights do not match the number of paths");
  double sum = 0.0;
  for (double v : a) {
    if (!(v >= 0.0)) throw InvalidInput("benchmark weights must be nonnegative");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw InvalidInput("benchmark weights must sum to 1");

  BenchmarkSeries out;
  out.xbar.assign(len, 0.0);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t i = 0; i < n; ++i) out.xbar[t] += a[i] * paths[i][t];
  }
  for (double v : out.xbar) out.mean += v;
  out.mean /= static_cast<double>(len);
  for (double v : out.xbar) out.variance += (v - out.mean) * (v - out.mean);
  out.variance /= static_cast<double>(len);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t t = 0; t < len; ++t) {
      const double d = paths[i][t] - out.xbar[t];
      out.spread_variance += d * d;
    }
  }
  out.spread_variance /= static_cast<double>(n * len);
  return out;
}

// ---------------------------------------------------------------------------

void write_stats_csv(std::ostream& os, std::span<const StatRow> rows) {
  csv::Writer w(os);
  w.header({"stat", "value", "stderr"});
  for (const auto& r : rows) w.row(r.stat, r.value, r.std_error);
}

void write_paths_csv(std::ostream& os, const RecordedPaths& rec) {
  os << "path_id,t";
  for (const char* name : {"x", "xi_plus", "xi_minus"}) {
    for (std::size_t d = 0; d < rec.dim; ++d) os << ',' << name << '_' << d + 1;
  }
  os << '\n';
  for (std::size_t p = 0; p < rec.paths.size(); ++p) {
    const auto& path = rec.paths[p];
    const std::size_t rows = path.state.size() / rec.dim;
    for (std::size_t r = 0; r < rows; ++r) {
      const double t = static_cast<double>(r * rec.stride) * rec.dt;
      os << p << ',' << csv::number(t);
      for (const auto* v : {&path.state, &path.xi_plus, &path.xi_minus}) {
        for (std::size_t d = 0; d < rec.dim; ++d) os << ',' << csv::number((*v)[r * rec.dim + d]);
      }
      os << '\n';
    }
  }
}

}  // namespace sck
