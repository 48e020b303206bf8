#include "sck/config.hpp"

#include "sck/errors.hpp"

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>
#include <type_traits>

namespace sck {

using nlohmann::json;

namespace {

template <class T>
struct is_vector : std::false_type {};
template <class T>
struct is_vector<std::vector<T>> : std::true_type {};

// Checks the JSON type of v against T recursively; nlohmann converts some
// mismatches (negative to unsigned, float to int) silently.
template <class T>
bool type_ok(const json& v) {
  if constexpr (std::is_same_v<T, bool>) {
    return v.is_boolean();
  } else if constexpr (std::is_same_v<T, std::string>) {
    return v.is_string();
  } else if constexpr (std::is_same_v<T, double>) {
    return v.is_number();
  } else if constexpr (std::is_unsigned_v<T>) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  } else if constexpr (is_vector<T>::value) {
    if (!v.is_array()) return false;
    for (const auto& e : v) {
      if (!type_ok<typename T::value_type>(e)) return false;
    }
    return true;
  } else {
    return false;
  }
}

template <class T>
const char* type_label() {
  if constexpr (std::is_same_v<T, bool>) return "a boolean";
  else if constexpr (std::is_same_v<T, std::string>) return "a string";
  else if constexpr (std::is_same_v<T, double>) return "a number";
  else if constexpr (std::is_unsigned_v<T>) return "a nonnegative integer";
  else if constexpr (is_vector<T>::value) return "an array";
  else return "a value";
}

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(fmt::format("{} must be an object", name()));
  }

  bool has(const char* key) const { return j_.contains(key); }

  template <class T>
  T req(const char* key) {
    if (!j_.contains(key)) throw ConfigError(fmt::format("missing required key {}", path(key)));
    return get<T>(key);
  }

  template <class T>
  T opt(const char* key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return get<T>(key);
  }

  Reader sub(const char* key) {
    if (!j_.contains(key)) throw ConfigError(fmt::format("missing required key {}", path(key)));
    used_.insert(key);
    return Reader(j_.at(key), path(key));
  }

  const json& raw(const char* key) {
    if (!j_.contains(key)) throw ConfigError(fmt::format("missing required key {}", path(key)));
    used_.insert(key);
    return j_.at(key);
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(fmt::format("unknown key {}", path(it.key())));
    }
  }

  std::string path(const std::string& key) const {
    return where_.empty() ? key : where_ + "." + key;
  }

 private:
  std::string name() const { return where_.empty() ? "config" : where_; }

  template <class T>
  T get(const char* key) {
    used_.insert(key);
    const json& v = j_.at(key);
    if (!type_ok<T>(v)) {
      throw ConfigError(fmt::format("{} must be {}", path(key), type_label<T>()));
    }
    return v.get<T>();
  }

  const json& j_;
  std::string where_;
  std::set<std::string> used_;
};

CostConfig read_cost(const json& j, const std::string& where) {
  Reader r(j, where);
  const auto type = r.opt<std::string>("type", "quadratic");
  if (type != "quadratic") {
    throw ConfigError(fmt::format("{}.type must be \"quadratic\", got \"{}\"", where, type));
  }
  CostConfig c;
  c.curvature = r.req<double>("curvature");
  c.center = r.opt<double>("center", 0.0);
  c.offset = r.opt<double>("offset", 0.0);
  r.finish();
  return c;
}

std::vector<CostConfig> read_costs(const json& j, const std::string& where) {
  if (!j.is_array()) throw ConfigError(fmt::format("{} must be an array", where));
  std::vector<CostConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_cost(j[i], fmt::format("{}[{}]", where, i)));
  return out;
}

json cost_json(const CostConfig& c) {
  return {{"type", "quadratic"}, {"curvature", c.curvature}, {"center", c.center}, {"offset", c.offset}};
}

json costs_json(const std::vector<CostConfig>& cs) {
  json a = json::array();
  for (const auto& c : cs) a.push_back(cost_json(c));
  return a;
}

VolatilityConvention convention_of(const std::string& s) {
  if (s == "joint") return VolatilityConvention::kJoint;
  if (s == "difference") return VolatilityConvention::kDifference;
  throw ConfigError(fmt::format("convention must be \"joint\" or \"difference\", got \"{}\"", s));
}

void require_len(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw ConfigError(fmt::format("problem.{} has {} entries, expected {}", what, got, want));
  }
}

ProblemConfig read_problem(Reader r) {
  const auto kind = r.req<std::string>("kind");
  using V = std::vector<double>;
  using M = std::vector<std::vector<double>>;
  if (kind == "two_player") {
    TwoPlayerConfig p;
    p.rho = r.req<double>("rho");
    p.convention = r.opt<std::string>("convention", "joint");
    p.sigma = r.req<M>("sigma");
    const std::size_t n = p.sigma.size();
    p.k_plus = r.req<V>("k_plus");
    p.k_minus = r.req<V>("k_minus");
    p.costs = read_costs(r.raw("costs"), r.path("costs"));
    p.drift = r.opt<V>("drift", V(n, 0.0));
    p.weights = r.opt<V>("weights", V(n, n ? 1.0 / static_cast<double>(n) : 0.0));
    p.x0 = r.opt<V>("x0", V(n, 0.0));
    r.finish();
    return p;
  }
  if (kind == "single") {
    SingleConfig p;
    p.rho = r.req<double>("rho");
    p.sigma_tilde = r.req<double>("sigma_tilde");
    p.k_plus = r.req<double>("k_plus");
    p.k_minus = r.req<double>("k_minus");
    p.cost = read_cost(r.raw("cost"), r.path("cost"));
    p.drift = r.opt<double>("drift", 0.0);
    p.x0 = r.opt<double>("x0", 0.0);
    r.finish();
    return p;
  }
  if (kind == "separable") {
    SeparableConfig p;
    p.discount = r.req<double>("discount");
    p.convention = r.opt<std::string>("convention", "joint");
    p.investors = r.req<std::size_t>("investors");
    p.products = r.req<std::size_t>("products");
    p.brownian_dim = r.req<std::size_t>("brownian_dim");
    p.y = r.req<M>("y");
    p.mu = r.req<M>("mu");
    p.sigma = r.req<std::vector<M>>("sigma");
    p.p = r.req<M>("p");
    p.q = r.req<M>("q");
    const auto& cj = r.raw("costs");
    if (!cj.is_array()) throw ConfigError("problem.costs must be an array of arrays");
    for (std::size_t i = 0; i < cj.size(); ++i) {
      p.costs.push_back(read_costs(cj[i], fmt::format("problem.costs[{}]", i)));
    }
    const V zeros(p.products, 0.0);
    p.profit = r.opt<V>("profit", zeros);
    p.demand_drift = r.opt<V>("demand_drift", zeros);
    p.demand_vol = r.opt<V>("demand_vol", zeros);
    p.demand0 = r.opt<V>("demand0", zeros);
    r.finish();
    return p;
  }
  if (kind == "interbank") {
    InterbankConfig p;
    p.rho = r.req<double>("rho");
    p.kappa = r.req<V>("kappa");
    const std::size_t n = p.kappa.size();
    p.nu = r.req<V>("nu");
    p.a = r.req<V>("a");
    p.sigma = r.req<M>("sigma");
    p.k_plus = r.req<V>("k_plus");
    p.k_minus = r.req<V>("k_minus");
    p.weights = r.opt<V>("weights", V(n, n ? 1.0 / static_cast<double>(n) : 0.0));
    p.drift = r.opt<V>("drift", V(n, 0.0));
    r.finish();
    return p;
  }
  throw ConfigError(fmt::format(
      "problem.kind must be one of two_player, single, separable, interbank; got \"{}\"", kind));
}

json problem_json(const ProblemConfig& pc) {
  return std::visit(
      [](const auto& p) -> json {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, TwoPlayerConfig>) {
          return {{"kind", "two_player"}, {"rho", p.rho},       {"convention", p.convention},
                  {"sigma", p.sigma},     {"k_plus", p.k_plus}, {"k_minus", p.k_minus},
                  {"costs", costs_json(p.costs)}, {"drift", p.drift}, {"weights", p.weights},
                  {"x0", p.x0}};
        } else if constexpr (std::is_same_v<T, SingleConfig>) {
          return {{"kind", "single"},   {"rho", p.rho},         {"sigma_tilde", p.sigma_tilde},
                  {"k_plus", p.k_plus}, {"k_minus", p.k_minus}, {"cost", cost_json(p.cost)},
                  {"drift", p.drift},   {"x0", p.x0}};
        } else if constexpr (std::is_same_v<T, SeparableConfig>) {
          json costs = json::array();
          for (const auto& row : p.costs) costs.push_back(costs_json(row));
          return {{"kind", "separable"},
                  {"discount", p.discount},
                  {"convention", p.convention},
                  {"investors", p.investors},
                  {"products", p.products},
                  {"brownian_dim", p.brownian_dim},
                  {"y", p.y},
                  {"mu", p.mu},
                  {"sigma", p.sigma},
                  {"p", p.p},
                  {"q", p.q},
                  {"costs", costs},
                  {"profit", p.profit},
                  {"demand_drift", p.demand_drift},
                  {"demand_vol", p.demand_vol},
                  {"demand0", p.demand0}};
        } else {
          return {{"kind", "interbank"}, {"rho", p.rho},         {"kappa", p.kappa},
                  {"nu", p.nu},          {"a", p.a},             {"sigma", p.sigma},
                  {"k_plus", p.k_plus},  {"k_minus", p.k_minus}, {"weights", p.weights},
                  {"drift", p.drift}};
        }
      },
      pc);
}

}  // namespace

// ---------------------------------------------------------------------------

RunningCost CostConfig::build() const { return RunningCost::quadratic(curvature, center, offset); }

GameSpec TwoPlayerConfig::build() const {
  const std::size_t n = sigma.size();
  if (n != 2) throw ConfigError(fmt::format("problem.sigma needs 2 rows (one per player), got {}", n));
  require_len(k_plus.size(), n, "k_plus");
  require_len(k_minus.size(), n, "k_minus");
  require_len(costs.size(), n, "costs");
  require_len(drift.size(), n, "drift");
  require_len(weights.size(), n, "weights");
  require_len(x0.size(), n, "x0");
  GameSpec g;
  g.rho = rho;
  g.convention = convention_of(convention);
  g.cost_form = CostForm::kDifference;
  for (std::size_t i = 0; i < n; ++i) {
    Player p;
    p.drift = drift[i];
    p.sigma = sigma[i];
    p.k_plus = k_plus[i];
    p.k_minus = k_minus[i];
    p.weight = weights[i];
    p.cost = costs[i].build();
    g.players.push_back(std::move(p));
  }
  g.validate();
  return g;
}

ReducedProblem1D SingleConfig::build() const {
  ReducedProblem1D p;
  p.rho = rho;
  p.sigma_tilde = sigma_tilde;
  p.k_plus = k_plus;
  p.k_minus = k_minus;
  p.drift = drift;
  p.cost = cost.build();
  p.x0 = x0;
  p.validate();
  return p;
}

InvestmentSpec SeparableConfig::build() const {
  InvestmentSpec inv;
  inv.investors = investors;
  inv.products = products;
  inv.brownian_dim = brownian_dim;
  inv.y = y;
  inv.mu = mu;
  inv.sigma = sigma;
  inv.p = p;
  inv.q = q;
  for (const auto& row : costs) {
    std::vector<RunningCost> r;
    for (const auto& c : row) r.push_back(c.build());
    inv.costs.push_back(std::move(r));
  }
  inv.profit = profit;
  inv.demand_drift = demand_drift;
  inv.demand_vol = demand_vol;
  inv.demand0 = demand0;
  inv.discount = discount;
  inv.convention = convention_of(convention);
  inv.validate();
  return inv;
}

GameSpec InterbankConfig::build() const {
  const std::size_t n = kappa.size();
  if (n < 2) throw ConfigError("problem.kappa needs one entry per bank (at least 2)");
  require_len(nu.size(), n, "nu");
  require_len(a.size(), n, "a");
  require_len(sigma.size(), n, "sigma");
  require_len(k_plus.size(), n, "k_plus");
  require_len(k_minus.size(), n, "k_minus");
  require_len(weights.size(), n, "weights");
  require_len(drift.size(), n, "drift");
  GameSpec g;
  g.rho = rho;
  g.cost_form = CostForm::kJoint;
  g.joint = interbank_running_cost(kappa, nu, a, weights);
  g.benchmark_weights = a;
  for (std::size_t i = 0; i < n; ++i) {
    Player p;
    p.drift = drift[i];
    p.sigma = sigma[i];
    p.k_plus = k_plus[i];
    p.k_minus = k_minus[i];
    p.weight = weights[i];
    g.players.push_back(std::move(p));
  }
  g.validate();
  return g;
}

SimConfig SimSection::build(std::uint64_t seed) const {
  SimConfig c;
  c.dt = dt;
  c.horizon = horizon;
  c.n_paths = paths;
  c.seed = seed;
  c.antithetic = antithetic;
  return c;
}

std::string problem_kind(const ProblemConfig& p) {
  switch (p.index()) {
    case 0: return "two_player";
    case 1: return "single";
    case 2: return "separable";
    default: return "interbank";
  }
}

void RunConfig::validate() const {
  static const std::set<std::string> tasks = {"solve", "simulate", "compare", "verify", "sweep"};
  if (!tasks.count(task)) throw ConfigError(fmt::format("unknown task \"{}\"", task));
  if (!(solver.tol > 0.0)) throw ConfigError("solver.tol must be > 0");
  if (solver.grid < 3) throw ConfigError("solver.grid must be >= 3");
  if (!(solver.domain > 0.0)) throw ConfigError("solver.domain must be > 0");
  if (solver.levels < 3) throw ConfigError("solver.levels must be >= 3");
  if (sim.split != "paper" && sim.split != "single") {
    throw ConfigError("sim.split must be \"paper\" or \"single\"");
  }
  if (sim.record_stride < 1) throw ConfigError("sim.record_stride must be >= 1");
  for (double k : sweep.k) {
    if (!(k > 0.0)) throw ConfigError("sweep.k entries must be > 0");
  }
  try {
    sim.build(seed).validate();
    const auto kind = parse_policy(sim.policy);
    if (kind == PolicyKind::kCustomBand && !(sim.band > 0.0)) {
      throw ConfigError("sim.band must be > 0 for the custom policy");
    }
    std::visit([](const auto& p) { (void)p.build(); }, problem);
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
}

RunConfig parse_config(const json& j) {
  Reader r(j, "");
  RunConfig c;
  c.task = r.opt<std::string>("task", c.task);
  c.seed = r.opt<std::uint64_t>("seed", c.seed);
  c.out = r.opt<std::string>("out", c.out);
  c.problem = read_problem(r.sub("problem"));
  if (r.has("solver")) {
    auto s = r.sub("solver");
    c.solver.tol = s.opt<double>("tol", c.solver.tol);
    c.solver.grid = s.opt<std::size_t>("grid", c.solver.grid);
    c.solver.domain = s.opt<double>("domain", c.solver.domain);
    c.solver.fd_fallback = s.opt<bool>("fd_fallback", c.solver.fd_fallback);
    c.solver.levels = s.opt<std::size_t>("levels", c.solver.levels);
    s.finish();
  }
  if (r.has("sim")) {
    auto s = r.sub("sim");
    c.sim.dt = s.opt<double>("dt", c.sim.dt);
    c.sim.horizon = s.opt<double>("horizon", c.sim.horizon);
    c.sim.paths = s.opt<std::size_t>("paths", c.sim.paths);
    c.sim.antithetic = s.opt<bool>("antithetic", c.sim.antithetic);
    c.sim.policy = s.opt<std::string>("policy", c.sim.policy);
    c.sim.split = s.opt<std::string>("split", c.sim.split);
    c.sim.band = s.opt<double>("band", c.sim.band);
    c.sim.record_paths = s.opt<std::size_t>("record_paths", c.sim.record_paths);
    c.sim.record_stride = s.opt<std::size_t>("record_stride", c.sim.record_stride);
    s.finish();
  }
  if (r.has("sweep")) {
    auto s = r.sub("sweep");
    c.sweep.k = s.opt<std::vector<double>>("k", c.sweep.k);
    s.finish();
  }
  r.finish();
  c.validate();
  return c;
}

RunConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(fmt::format("config is not valid JSON: {}", e.what()));
  }
  return parse_config(j);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file {}", path));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

json to_json(const RunConfig& c) {
  json j;
  j["task"] = c.task;
  j["seed"] = c.seed;
  j["out"] = c.out;
  j["problem"] = problem_json(c.problem);
  j["solver"] = {{"tol", c.solver.tol},
                 {"grid", c.solver.grid},
                 {"domain", c.solver.domain},
                 {"fd_fallback", c.solver.fd_fallback},
                 {"levels", c.solver.levels}};
  j["sim"] = {{"dt", c.sim.dt},
              {"horizon", c.sim.horizon},
              {"paths", c.sim.paths},
              {"antithetic", c.sim.antithetic},
              {"policy", c.sim.policy},
              {"split", c.sim.split},
              {"band", c.sim.band},
              {"record_paths", c.sim.record_paths},
              {"record_stride", c.sim.record_stride}};
  j["sweep"] = {{"k", c.sweep.k}};
  return j;
}

}  // namespace sck
