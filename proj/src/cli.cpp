#include "sck/cli.hpp"

#include "sck/csv.hpp"
#include "sck/errors.hpp"
#include "sck/hjb_fd.hpp"
#include "sck/reduction.hpp"
#include "sck/sde.hpp"
#include "sck/thresholds.hpp"
#include "sck/valuefn.hpp"

#include <fmt/format.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>

namespace sck {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Check {
  std::string name;
  double value;
  double limit;
  bool passed;
};

class Report {
 public:
  Report(std::string command, const RunConfig& cfg) : command_(std::move(command)), cfg_(cfg) {
    fs::create_directories(cfg.out);
  }

  json results = json::object();

  void check(const std::string& name, double value, double limit, bool passed) {
    checks_.push_back({name, value, limit, passed});
  }

  std::ofstream open(const std::string& name) {
    files_.push_back(name);
    std::ofstream os(fs::path(cfg_.out) / name, std::ios::binary | std::ios::trunc);
    if (!os) throw Error(fmt::format("cannot write {}", (fs::path(cfg_.out) / name).string()));
    return os;
  }

  bool passed() const {
    for (const auto& c : checks_) {
      if (!c.passed) return false;
    }
    return true;
  }

  void finish(std::ostream& log) {
    {
      auto os = open("diagnostics.csv");
      csv::Writer w(os);
      w.header({"check", "value", "limit", "passed"});
      for (const auto& c : checks_) w.row(c.name, c.value, c.limit, c.passed ? 1 : 0);
    }
    json j;
    j["command"] = command_;
    j["seed"] = cfg_.seed;
    j["config"] = to_json(cfg_);
    j["results"] = results;
    json checks = json::array();
    for (const auto& c : checks_) {
      checks.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"passed", c.passed}});
    }
    j["checks"] = checks;
    j["passed"] = passed();
    files_.push_back("report.json");
    j["files"] = files_;
    std::ofstream os(fs::path(cfg_.out) / "report.json", std::ios::binary | std::ios::trunc);
    os << j.dump(2) << '\n';
    for (const auto& c : checks_) {
      log << fmt::format("{:<34} {:<24} limit {:<12} {}\n", c.name, csv::number(c.value),
                         csv::number(c.limit), c.passed ? "ok" : "FAIL");
    }
    log << fmt::format("{}: {} ({} files in {})\n", command_, passed() ? "passed" : "FAILED",
                       files_.size(), cfg_.out);
  }

 private:
  std::string command_;
  const RunConfig& cfg_;
  std::vector<Check> checks_;
  std::vector<std::string> files_;
};

void write_thresholds(Report& rep, const std::vector<std::pair<std::string, double>>& rows) {
  auto os = rep.open("thresholds.csv");
  csv::Writer w(os);
  w.header({"name", "value"});
  for (const auto& [name, v] : rows) w.row(name, v);
}

// ---------------------------------------------------------------------------
// Band problems

bool closed_form_eligible(const ReducedProblem1D& p) {
  return p.k_plus == p.k_minus && p.drift == 0.0 && p.cost.center() == 0.0;
}

/// Regulator band problem in y = x^1 - x^2; the cheaper player acts.
ReducedProblem1D two_player_band(const GameSpec& g, const std::vector<double>& x0) {
  const auto& p1 = g.players[0];
  const auto& p2 = g.players[1];
  if (p1.weight != p2.weight) {
    throw UnsupportedCase("band reduction is implemented for equal welfare weights only");
  }
  const bool first = p1.k_plus + p1.k_minus < p2.k_plus + p2.k_minus;
  ReducedProblem1D r;
  r.rho = g.rho;
  r.k_plus = p1.weight * (first ? p1.k_plus : p2.k_minus);
  r.k_minus = p1.weight * (first ? p1.k_minus : p2.k_plus);
  r.drift = p1.drift - p2.drift;
  const std::vector<std::vector<double>> rows{p1.sigma, p2.sigma};
  r.sigma_tilde = effective_volatility(rows, g.convention);
  const std::vector<RunningCost> costs{p1.cost, p2.cost};
  const std::vector<double> w{p1.weight, p2.weight};
  r.cost = RunningCost::weighted_sum(costs, w);
  r.x0 = x0[0] - x0[1];
  r.validate();
  return r;
}

bool nash_available(const GameSpec& g) {
  const auto& p1 = g.players[0];
  const auto& p2 = g.players[1];
  return p1.k_plus == p1.k_minus && p1.k_plus == p2.k_plus && p2.k_plus == p2.k_minus &&
         p1.drift == p2.drift && p1.cost.center() == 0.0 && p1.cost.is_quadratic() &&
         p2.cost.is_quadratic() && p1.cost.quad_curvature() == p2.cost.quad_curvature() &&
         p1.cost.quad_offset() == p2.cost.quad_offset() && p2.cost.center() == 0.0;
}

NashValue nash_value(const GameSpec& g, double tol) {
  const std::vector<std::vector<double>> rows{g.players[0].sigma, g.players[1].sigma};
  const Resolvent res(g.players[0].cost, effective_volatility(rows, g.convention), g.rho);
  ThresholdOptions opt;
  opt.tol = tol;
  return NashValue(res, g.players[0].k_plus, opt);
}

PiecewiseValue band_value(const ReducedProblem1D& p, double tol) {
  ThresholdOptions opt;
  opt.tol = tol;
  return PiecewiseValue::solve(Resolvent(p.cost, p.sigma_tilde, p.rho), p.k_plus, opt);
}

/// Smooth pasting and HJB complementarity of an analytic band value.
void band_diagnostics(const PiecewiseValue& pv, Report& rep, const std::string& prefix) {
  const double c = pv.threshold();
  const double k = pv.k_eff();
  const double h = 1e-5;
  const double d1 = (pv.interior(c + h).value - pv.interior(c - h).value) / (2.0 * h);
  const double d2 = (pv.interior(c + h).slope - pv.interior(c - h).slope) / (2.0 * h);
  rep.check(prefix + "smooth_pasting_slope", std::abs(d1 - k), 1e-8, std::abs(d1 - k) < 1e-8);
  rep.check(prefix + "smooth_pasting_curvature", std::abs(d2), 1e-6, std::abs(d2) < 1e-6);

  double interior = 0.0, gradient = 0.0, off = -std::numeric_limits<double>::infinity();
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    const double x = -3.0 * c + 6.0 * c * i / (n - 1);
    const auto r = hjb_residual_1d(pv, x);
    if (std::abs(x) < c) {
      interior = std::max(interior, std::abs(r.interior));
      off = std::max(off, r.gradient);
    } else if (std::abs(x) > c) {
      gradient = std::max(gradient, std::abs(r.gradient));
      off = std::max(off, r.interior);
    }
  }
  rep.check(prefix + "hjb_interior_residual", interior, 1e-8, interior < 1e-8);
  rep.check(prefix + "hjb_gradient_residual", gradient, 1e-10, gradient < 1e-10);
  rep.check(prefix + "hjb_off_branch_max", off, 1e-8, off <= 1e-8);
}

/// Solves a band problem: closed form when eligible, FD otherwise.
/// Returns the analytic value when available.
std::optional<PiecewiseValue> solve_band(const ReducedProblem1D& p, const RunConfig& cfg,
                                         Report& rep, const std::string& prefix,
                                         std::vector<std::pair<std::string, double>>& thresholds) {
  if (closed_form_eligible(p)) {
    auto pv = band_value(p, cfg.solver.tol);
    rep.results[prefix + "threshold"] = pv.threshold();
    rep.results[prefix + "k_eff"] = pv.k_eff();
    rep.results[prefix + "value_at_x0"] = pv.eval(p.x0).value;
    rep.results[prefix + "cosh_coefficient"] = pv.cosh_coefficient();
    thresholds.emplace_back(prefix + "threshold", pv.threshold());
    band_diagnostics(pv, rep, prefix);
    auto os = rep.open(prefix + "value_grid.csv");
    const double c = pv.threshold();
    write_value_grid_csv(os, pv, -3.0 * c, 3.0 * c, cfg.solver.grid);
    return pv;
  }
  if (!cfg.solver.fd_fallback) {
    throw UnsupportedCase("no closed form (asymmetric costs, drift or off-center cost) and "
                          "solver.fd_fallback is off");
  }
  const Axis axis{-cfg.solver.domain, cfg.solver.domain, cfg.solver.grid};
  const auto sol = solve_vi_1d(axis, p);
  const auto b = extract_free_boundary(sol);
  rep.results[prefix + "fd_upper_boundary"] = b.upper;
  rep.results[prefix + "fd_lower_boundary"] = b.lower;
  rep.results[prefix + "fd_iterations"] = sol.iterations;
  thresholds.emplace_back(prefix + "fd_upper_boundary", b.upper);
  thresholds.emplace_back(prefix + "fd_lower_boundary", b.lower);
  rep.check(prefix + "fd_residual", sol.residual, 1e-8, sol.residual < 1e-8);
  {
    auto os = rep.open(prefix + "fd_solution.csv");
    write_vi_csv(os, sol);
  }
  auto os = rep.open(prefix + "fd_boundary.csv");
  write_boundary_csv(os, b);
  return std::nullopt;
}

void mc_check(Report& rep, const std::string& name, const CostEstimate& e, double analytic) {
  if (std::isnan(analytic) || !e.has_std_error()) return;
  const double limit = 3.0 * e.std_error + 0.005 * std::abs(analytic);
  const double dev = std::abs(e.mean - analytic);
  rep.check(name, dev, limit, dev <= limit);
}

void write_stats(Report& rep, const std::vector<StatRow>& rows) {
  auto os = rep.open("stats.csv");
  write_stats_csv(os, rows);
}

double se_units(const CostEstimate& e, double analytic) {
  if (!e.has_std_error() || std::isnan(analytic) || e.std_error == 0.0) return kNaN;
  return (e.mean - analytic) / e.std_error;
}

// ---------------------------------------------------------------------------
// Commands

void cmd_solve(const RunConfig& cfg, Report& rep) {
  std::vector<std::pair<std::string, double>> th;
  if (const auto* tp = std::get_if<TwoPlayerConfig>(&cfg.problem)) {
    const auto g = tp->build();
    const auto ar = validate_assumptions(g);
    json a = json::array();
    for (const auto& c : ar.checks) {
      a.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"witness", c.witness}});
      rep.check("assumption_" + c.name, c.value, kNaN, c.passed);
    }
    rep.results["assumptions"] = a;
    const auto pareto = solve_band(two_player_band(g, tp->x0), cfg, rep, "pareto_", th);
    if (pareto && nash_available(g)) {
      const auto nv = nash_value(g, cfg.solver.tol);
      const double gap = nv.threshold() - pareto->threshold();
      rep.results["nash_threshold"] = nv.threshold();
      rep.results["threshold_gap"] = gap;
      th.emplace_back("nash_threshold", nv.threshold());
      th.emplace_back("threshold_gap", gap);
      rep.check("nash_band_wider", gap, 0.0, gap > 0.0);
    }
  } else if (const auto* sp = std::get_if<SingleConfig>(&cfg.problem)) {
    solve_band(sp->build(), cfg, rep, "", th);
  } else if (const auto* sep = std::get_if<SeparableConfig>(&cfg.problem)) {
    const auto inv = sep->build();
    ThresholdOptions opt;
    opt.tol = cfg.solver.tol;
    const auto ths = product_thresholds(inv, opt);
    const SeparableSolution sol(inv, opt);
    json prods = json::array();
    for (std::size_t j = 0; j < ths.size(); ++j) {
      const auto name = fmt::format("product_{}_threshold", j + 1);
      th.emplace_back(name, ths[j].c);
      prods.push_back({{"threshold", ths[j].c}, {"k_eff", ths[j].k_used}, {"residual", ths[j].residual}});
      rep.check(fmt::format("product_{}_residual", j + 1), std::abs(ths[j].residual), 1e-8,
                std::abs(ths[j].residual) < 1e-8);
      band_diagnostics(sol.products()[j], rep, fmt::format("product_{}_", j + 1));
    }
    rep.results["products"] = prods;
    rep.results["value_at_x0"] = sol.value(sol.initial_state());
    rep.results["demand_constant"] = demand_constant(inv);
  } else {
    const auto g = std::get<InterbankConfig>(cfg.problem).build();
    const auto ar = validate_assumptions(g);
    json a = json::array();
    for (const auto& c : ar.checks) {
      a.push_back({{"name", c.name}, {"passed", c.passed}, {"value", c.value}, {"witness", c.witness}});
      rep.check("assumption_" + c.name, c.value, kNaN, c.passed);
    }
    rep.results["assumptions"] = a;
    rep.results["note"] = "no closed form or grid solver for more than two banks; assumptions only";
  }
  write_thresholds(rep, th);
}

void cmd_simulate(const RunConfig& cfg, Report& rep) {
  const SimConfig sc = cfg.sim.build(cfg.seed);
  std::vector<StatRow> rows;
  if (const auto* tp = std::get_if<TwoPlayerConfig>(&cfg.problem)) {
    const auto g = tp->build();
    TwoPlayerPolicy pol;
    pol.kind = parse_policy(cfg.sim.policy);
    pol.c = cfg.sim.band;
    pol.split = cfg.sim.split == "single" ? ControlSplit::kSinglePlayer : ControlSplit::kPaper;
    const TwoPlayerPolicy pols[1] = {pol};
    const auto batch = simulate_two_player(g, pols, sc, {tp->x0[0], tp->x0[1]},
                                           cfg.sim.record_paths, cfg.sim.record_stride);
    const auto& s = batch.policies.front();
    double analytic = kNaN;
    if (pol.kind == PolicyKind::kPareto) {
      analytic = band_value(two_player_band(g, tp->x0), cfg.solver.tol).eval(tp->x0[0] - tp->x0[1]).value;
    } else if (pol.kind == PolicyKind::kNash) {
      const auto [v1, v2] = nash_value(g, cfg.solver.tol).eval(tp->x0[0], tp->x0[1]);
      analytic = g.players[0].weight * v1 + g.players[1].weight * v2;
    }
    rows = {{"band", s.band.c, kNaN},
            {"cost_player_1", s.player[0].mean, s.player[0].std_error},
            {"cost_player_2", s.player[1].mean, s.player[1].std_error},
            {"aggregate_cost", s.aggregate.mean, s.aggregate.std_error},
            {"analytic_value", analytic, kNaN},
            {"delta_in_se", se_units(s.aggregate, analytic), kNaN},
            {"max_abs_spread", s.max_abs_y, kNaN},
            {"max_control_player_1", s.max_xi[0], kNaN},
            {"max_control_player_2", s.max_xi[1], kNaN},
            {"spread_dispersion", s.dispersion.mean, s.dispersion.std_error},
            {"discount_truncation", sc.discount_truncation(g.rho), kNaN}};
    mc_check(rep, "mc_vs_analytic", s.aggregate, analytic);
    rep.results["policy"] = std::string(policy_name(pol.kind));
    auto os = rep.open("paths.csv");
    write_paths_csv(os, batch.samples);
  } else if (const auto* sp = std::get_if<SingleConfig>(&cfg.problem)) {
    const auto p = sp->build();
    double c = cfg.sim.band;
    double analytic = kNaN;
    if (parse_policy(cfg.sim.policy) != PolicyKind::kCustomBand) {
      if (!closed_form_eligible(p)) {
        throw UnsupportedCase("simulation of an optimal band needs a symmetric closed-form "
                              "problem; use policy \"custom\" with sim.band");
      }
      const auto pv = band_value(p, cfg.solver.tol);
      c = pv.threshold();
      analytic = pv.eval(p.x0).value;
    }
    const auto e = estimate_cost(sc, p, c);
    rows = {{"band", c, kNaN},
            {"cost", e.mean, e.std_error},
            {"analytic_value", analytic, kNaN},
            {"delta_in_se", se_units(e, analytic), kNaN},
            {"truncation_bound", e.truncation_bound, kNaN}};
    mc_check(rep, "mc_vs_analytic", e, analytic);
    auto os = rep.open("paths.csv");
    write_paths_csv(os, record_reflected_paths(sc, p, c, cfg.sim.record_paths, cfg.sim.record_stride));
  } else if (const auto* sep = std::get_if<SeparableConfig>(&cfg.problem)) {
    const auto inv = sep->build();
    ThresholdOptions opt;
    opt.tol = cfg.solver.tol;
    const SeparableSolution sol(inv, opt);
    std::vector<double> b;
    for (const auto& pv : sol.products()) b.push_back(pv.threshold());
    const auto batch = simulate_separable(inv, b, sc);
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double v = sol.products()[j].eval(sol.initial_state()[j]).value;
      const auto& e = batch.products[j];
      rows.push_back({fmt::format("product_{}_band", j + 1), b[j], kNaN});
      rows.push_back({fmt::format("product_{}_cost", j + 1), e.mean, e.std_error});
      rows.push_back({fmt::format("product_{}_analytic", j + 1), v, kNaN});
    }
    const double total = sol.value(sol.initial_state());
    rows.push_back({"total_cost", batch.total.mean, batch.total.std_error});
    rows.push_back({"total_analytic", total, kNaN});
    rows.push_back({"delta_in_se", se_units(batch.total, total), kNaN});
    rows.push_back({"truncation_bound", batch.total.truncation_bound, kNaN});
    mc_check(rep, "mc_vs_analytic", batch.total, total);
  } else {
    throw UnsupportedCase("simulation is not available for the interbank problem");
  }
  rep.results["n_paths"] = sc.n_paths;
  write_stats(rep, rows);
}

void cmd_compare(const RunConfig& cfg, Report& rep) {
  const auto* tp = std::get_if<TwoPlayerConfig>(&cfg.problem);
  if (!tp) throw ConfigError("compare needs a two_player problem");
  const auto g = tp->build();
  if (!nash_available(g)) {
    throw UnsupportedCase("the Nash band needs equal symmetric costs and equal drifts");
  }
  const auto band = two_player_band(g, tp->x0);
  const auto pv = band_value(band, cfg.solver.tol);
  const auto nv = nash_value(g, cfg.solver.tol);
  const double gap = nv.threshold() - pv.threshold();
  rep.results["pareto_threshold"] = pv.threshold();
  rep.results["nash_threshold"] = nv.threshold();
  rep.results["threshold_gap"] = gap;
  rep.check("nash_band_wider", gap, 0.0, gap > 0.0);
  write_thresholds(rep, {{"pareto_threshold", pv.threshold()},
                         {"nash_threshold", nv.threshold()},
                         {"threshold_gap", gap}});

  const SimConfig sc = cfg.sim.build(cfg.seed);
  const auto split = cfg.sim.split == "single" ? ControlSplit::kSinglePlayer : ControlSplit::kPaper;
  const TwoPlayerPolicy pols[2] = {{PolicyKind::kPareto, 0.0, split}, {PolicyKind::kNash, 0.0, split}};
  const auto batch = simulate_two_player(g, pols, sc, {tp->x0[0], tp->x0[1]},
                                         cfg.sim.record_paths, cfg.sim.record_stride);
  const auto& P = batch.policies[0];
  const auto& N = batch.policies[1];
  const double combined = std::hypot(P.aggregate.std_error, N.aggregate.std_error);
  const double diff = N.aggregate.mean - P.aggregate.mean;
  const double disp_se = std::hypot(P.dispersion.std_error, N.dispersion.std_error);
  const double disp_diff = N.dispersion.mean - P.dispersion.mean;
  std::vector<StatRow> rows{{"pareto_cost_player_1", P.player[0].mean, P.player[0].std_error},
                            {"pareto_cost_player_2", P.player[1].mean, P.player[1].std_error},
                            {"pareto_aggregate", P.aggregate.mean, P.aggregate.std_error},
                            {"nash_cost_player_1", N.player[0].mean, N.player[0].std_error},
                            {"nash_cost_player_2", N.player[1].mean, N.player[1].std_error},
                            {"nash_aggregate", N.aggregate.mean, N.aggregate.std_error},
                            {"aggregate_difference", diff, batch.paired_diff_std_error},
                            {"pareto_dispersion", P.dispersion.mean, P.dispersion.std_error},
                            {"nash_dispersion", N.dispersion.mean, N.dispersion.std_error},
                            {"pareto_max_abs_spread", P.max_abs_y, kNaN},
                            {"nash_max_abs_spread", N.max_abs_y, kNaN}};
  write_stats(rep, rows);
  if (P.aggregate.has_std_error()) {
    rep.check("pareto_below_nash_3se", diff, 3.0 * combined, diff > 3.0 * combined);
    rep.check("dispersion_pareto_below_nash_3se", disp_diff, 3.0 * disp_se, disp_diff > 3.0 * disp_se);
  }
  {
    auto os = rep.open("curves.csv");
    csv::Writer w(os);
    w.header({"y", "pareto", "nash_avg"});
    const double lim = 3.0 * nv.threshold();
    const std::size_t n = cfg.solver.grid;
    for (std::size_t i = 0; i < n; ++i) {
      const double y = -lim + 2.0 * lim * static_cast<double>(i) / static_cast<double>(n - 1);
      const auto [v1, v2] = nv.eval(0.5 * y, -0.5 * y);
      w.row(y, pv.eval(y).value, 0.5 * (v1 + v2));
    }
  }
  auto os = rep.open("paths.csv");
  write_paths_csv(os, batch.samples);
}

void cmd_verify(const RunConfig& cfg, Report& rep) {
  ReducedProblem1D p;
  if (const auto* tp = std::get_if<TwoPlayerConfig>(&cfg.problem)) {
    p = two_player_band(tp->build(), tp->x0);
  } else if (const auto* sp = std::get_if<SingleConfig>(&cfg.problem)) {
    p = sp->build();
  } else {
    throw ConfigError("verify needs a two_player or single problem");
  }
  std::optional<PiecewiseValue> pv;
  if (closed_form_eligible(p)) pv = band_value(p, cfg.solver.tol);

  auto os = rep.open("convergence.csv");
  csv::Writer w(os);
  w.header({"nodes", "dx", "sup_error", "upper_boundary", "lower_boundary", "boundary_error",
            "iterations", "residual"});
  double prev_err = kNaN;
  bool decreasing = true;
  json levels = json::array();
  for (std::size_t l = 0; l < cfg.solver.levels; ++l) {
    const std::size_t n = (cfg.solver.grid - 1) * (std::size_t{1} << l) + 1;
    const Axis axis{-cfg.solver.domain, cfg.solver.domain, n};
    const auto sol = solve_vi_1d(axis, p);
    const auto b = extract_free_boundary(sol);
    double err = kNaN, berr = kNaN;
    if (pv) {
      err = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        err = std::max(err, std::abs(sol.u[i] - pv->eval(axis.at(i)).value));
      }
      berr = std::max(std::abs(b.upper - pv->threshold()), std::abs(b.lower + pv->threshold()));
      if (!std::isnan(prev_err) && !(err < prev_err)) decreasing = false;
      prev_err = err;
    }
    w.row(n, axis.step(), err, b.upper, b.lower, berr, sol.iterations, sol.residual);
    levels.push_back({{"nodes", n}, {"sup_error", err}, {"boundary_error", berr}});
    rep.check(fmt::format("fd_residual_{}", n), sol.residual, 1e-8, sol.residual < 1e-8);
    if (l + 1 == cfg.solver.levels && pv) {
      rep.check("fd_boundary_within_2dx", berr, 2.0 * axis.step(), berr <= 2.0 * axis.step());
    }
  }
  rep.results["levels"] = levels;
  if (pv) {
    rep.results["analytic_threshold"] = pv->threshold();
    rep.check("fd_error_decreasing", decreasing ? 1.0 : 0.0, 1.0, decreasing);
  }
}

void cmd_sweep(const RunConfig& cfg, Report& rep) {
  const auto& ks = cfg.sweep.k;
  const std::size_t n = ks.size();
  std::vector<double> c1(n, kNaN), c2(n, kNaN);
  const auto* tp = std::get_if<TwoPlayerConfig>(&cfg.problem);
  const auto* sp = std::get_if<SingleConfig>(&cfg.problem);
  if (!tp && !sp) throw ConfigError("sweep needs a two_player or single problem");
  ReducedProblem1D base = tp ? two_player_band(tp->build(), tp->x0) : sp->build();
  if (!closed_form_eligible(base)) throw UnsupportedCase("sweep needs a closed-form band problem");
  const double weight = tp ? tp->weights[0] : 1.0;
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ii = 0; ii < static_cast<std::int64_t>(n); ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    try {
      ThresholdOptions opt;
      opt.tol = cfg.solver.tol;
      const Resolvent res(base.cost, base.sigma_tilde, base.rho);
      c1[i] = solve_threshold(res, weight * ks[i], opt).c;
      if (tp) c2[i] = solve_threshold(res, ks[i], opt).c;
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!errors[i].empty()) throw Error(fmt::format("sweep entry k = {}: {}", ks[i], errors[i]));
  }
  auto os = rep.open("sweep.csv");
  csv::Writer w(os);
  if (tp) {
    w.header({"k", "pareto_threshold", "nash_threshold", "gap"});
    for (std::size_t i = 0; i < n; ++i) {
      w.row(ks[i], c1[i], c2[i], c2[i] - c1[i]);
      rep.check(fmt::format("gap_positive_k_{}", csv::number(ks[i])), c2[i] - c1[i], 0.0,
                c2[i] > c1[i]);
    }
  } else {
    w.header({"k", "threshold"});
    for (std::size_t i = 0; i < n; ++i) w.row(ks[i], c1[i]);
  }
  rep.results["entries"] = n;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& log) {
  try {
    if (command != "solve" && command != "simulate" && command != "compare" &&
        command != "verify" && command != "sweep") {
      throw ConfigError(fmt::format("unknown command \"{}\"", command));
    }
    RunConfig resolved = cfg;
    resolved.task = command;
    resolved.validate();
    Report rep(command, resolved);
    if (command == "solve") {
      cmd_solve(resolved, rep);
    } else if (command == "simulate") {
      cmd_simulate(resolved, rep);
    } else if (command == "compare") {
      cmd_compare(resolved, rep);
    } else if (command == "verify") {
      cmd_verify(resolved, rep);
    } else {
      cmd_sweep(resolved, rep);
    }
    rep.finish(log);
    return rep.passed() ? kExitOk : kExitCheckFailed;
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    log << "solver error: " << e.what() << '\n';
    return kExitSolver;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitSolver;
  }
}

}  // namespace sck
