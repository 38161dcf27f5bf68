#include "eqalloc/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>

#include "eqalloc/error.hpp"
#include "eqalloc/io.hpp"
#include "eqalloc/rng.hpp"

namespace eqalloc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// Runs `body` and prefixes any parse failure with the field it came from.
template <class F>
auto in_field(const std::string& field, F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, "field '" + field + "': " + e.what());
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Parse) throw;
    throw Error(ErrorKind::Parse, "field '" + field + "': " + e.what());
  }
}

const json& require(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    throw Error(ErrorKind::Parse, "field '" + where + "': missing '" + key + "'");
  return j.at(key);
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) throw Error(ErrorKind::Parse, "field '" + field + "': expected a number");
  return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& field) {
  if (!j.is_number_integer() || j.get<long long>() < 0)
    throw Error(ErrorKind::Parse, "field '" + field + "': expected a nonnegative integer");
  return j.get<std::size_t>();
}

std::string lower_case(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

Profile equilibrium_state_rows(std::vector<CommunityModel>& models, const Profile& funding) {
  for (std::size_t i = 0; i < models.size(); ++i) {
    const Vector u0 = funding.row(static_cast<Eigen::Index>(i)).transpose();
    models[i].set_state(equilibrium_for(models[i], u0).x_bar);
  }
  return funding;
}

struct Population {
  std::vector<CommunityModel> models;
  Profile initial_funding;
  json data;  // the population data file, when one was read
  bool explicit_states = false;
  std::optional<CommunityModel> nominal;  // set when states start at the nominal equilibrium
};

Profile funding_from_json(const json& j, std::size_t n, Eigen::Index m, std::uint64_t seed, const std::string& field) {
  if (j.is_object()) {
    const Vector mean = vector_from_json(require(j, "mean", field), "mean");
    const double rel_std = j.value("rel_std", 0.0);
    if (mean.size() != m) throw Error(ErrorKind::Parse, "field '" + field + ".mean': expected " + std::to_string(m) + " entries");
    if (!(rel_std >= 0.0)) throw Error(ErrorKind::Parse, "field '" + field + ".rel_std': must be nonnegative");
    Profile out(static_cast<Eigen::Index>(n), m);
    for (std::size_t i = 0; i < n; ++i) {
      Rng rng = make_rng({seed, stream::kPopulation, i, 1});
      const Vector eps = draw_normal(rng, m, rel_std);
      out.row(static_cast<Eigen::Index>(i)) = mean.cwiseProduct((Vector::Ones(m) + eps)).cwiseMax(0.0).transpose();
    }
    return out;
  }
  Matrix f = matrix_from_json(j, field.c_str());
  if (f.rows() == 1 && n > 1 && f.cols() == m) f = f.replicate(static_cast<Eigen::Index>(n), 1);
  return f;
}

Population population_from_json(const json& j, const fs::path& base, std::uint64_t seed) {
  Population pop;
  const std::string kind = lower_case(j.value("kind", std::string("explicit")));
  if (kind == "explicit") {
    json doc = j;
    if (j.contains("path")) doc = read_json_file(resolve(base, j.at("path").get<std::string>()));
    pop.models = models_from_json(doc);
    const json& list = require(doc, "communities", "population");
    pop.explicit_states = std::any_of(list.begin(), list.end(), [](const json& c) { return c.contains("x0"); });
    if (doc.contains("initial_funding")) {
      pop.initial_funding = funding_from_json(doc.at("initial_funding"), pop.models.size(), pop.models.front().m(),
                                              seed, "population.initial_funding");
    }
  } else if (kind == "scalar_replicate") {
    pop.data = read_json_file(resolve(base, require(j, "data", "population").get<std::string>()));
    const json& list = require(pop.data, "communities", "population.data");
    std::vector<double> G;
    Profile funding(static_cast<Eigen::Index>(list.size()), 1);
    for (std::size_t i = 0; i < list.size(); ++i) {
      const std::string f = "population.data.communities[" + std::to_string(i) + "]";
      G.push_back(as_number(require(list[i], "G", f), f + ".G"));
      funding(static_cast<Eigen::Index>(i), 0) = as_number(require(list[i], "initial_funding", f), f + ".initial_funding");
    }
    const double a_mean = j.value("a_mean", pop.data.value("a_mean", 0.5));
    const double a_std = j.value("a_std", pop.data.value("a_std", 0.1));
    pop.models = scalar_population(G, a_mean, a_std, derive_seed({seed, stream::kPopulation}));
    pop.initial_funding = funding;
  } else if (kind == "generated") {
    json nominal_doc = require(j, "nominal", "population");
    if (nominal_doc.is_string()) nominal_doc = read_json_file(resolve(base, nominal_doc.get<std::string>()));
    const auto nominal_models = models_from_json(nominal_doc.contains("communities") ? nominal_doc
                                                                                    : json{{"communities", {nominal_doc}}});
    const CommunityModel& nominal = nominal_models.front();
    const std::size_t n = as_count(require(j, "n", "population"), "population.n");
    CoeffStds stds;
    if (j.contains("coeff_stds"))
      for (const auto& [name, value] : j.at("coeff_stds").items()) stds[name] = as_number(value, "population.coeff_stds." + name);
    pop.models = generate_population(nominal, n, stds, derive_seed({seed, stream::kPopulation}));
    const std::string start = lower_case(j.value("initial_state", std::string("equilibrium")));
    if (start == "nominal") {
      pop.nominal = nominal;
    } else if (start != "equilibrium") {
      throw Error(ErrorKind::Parse, "field 'population.initial_state': expected \"equilibrium\" or \"nominal\"");
    }
    if (j.contains("initial_funding"))
      pop.initial_funding = funding_from_json(j.at("initial_funding"), n, nominal.m(), seed, "population.initial_funding");
  } else {
    throw Error(ErrorKind::Parse, "field 'population.kind': unknown kind '" + kind + "'");
  }
  if (pop.initial_funding.size() == 0)
    pop.initial_funding = Profile::Zero(static_cast<Eigen::Index>(pop.models.size()), pop.models.front().m());
  return pop;
}

NeighborhoodGraph graph_from_json(const json& j, std::size_t n, const fs::path& base, std::uint64_t seed) {
  const std::string kind = lower_case(j.value("kind", std::string("complete")));
  if (kind == "edge_list") return load_edge_list(resolve(base, require(j, "path", "graph").get<std::string>()), n);
  if (kind == "edges") {
    std::vector<Edge> edges;
    for (const auto& e : require(j, "edges", "graph")) {
      if (!e.is_array() || e.size() != 2) throw Error(ErrorKind::Parse, "field 'graph.edges': expected [i, j] pairs");
      edges.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
    }
    return NeighborhoodGraph::from_edges(n, edges);
  }
  if (kind == "random") {
    const double p = as_number(require(j, "p", "graph"), "graph.p");
    const std::uint64_t graph_seed = j.value("seed", derive_seed({seed, stream::kGraph}));
    return random_graph(n, p, graph_seed);
  }
  if (kind == "complete") {
    NeighborhoodGraph g(n);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b) g.add_edge(a, b);
    return g;
  }
  throw Error(ErrorKind::Parse, "field 'graph.kind': unknown kind '" + kind + "'");
}

std::vector<double> weights_from_json(const json& j, std::size_t n, const std::string& field) {
  if (j.is_number()) return std::vector<double>(n, j.get<double>());
  if (!j.is_array()) throw Error(ErrorKind::Parse, "field '" + field + "': expected a number or an array");
  std::vector<double> out;
  for (const auto& v : j) out.push_back(as_number(v, field));
  return out;
}

void cost_from_json(const json& j, std::size_t n, ScenarioConfig& config) {
  CostSpec& cost = config.cost;
  const std::string metric = lower_case(j.value("metric", std::string("neqm")));
  if (metric == "neqm") {
    cost.metric = Metric::NEqM;
  } else if (metric == "wc-neqm" || metric == "wc_neqm" || metric == "wcneqm") {
    cost.metric = Metric::WcNEqM;
  } else {
    throw Error(ErrorKind::Parse, "field 'cost.metric': unknown metric '" + metric + "'");
  }
  cost.rho = j.value("rho", 0.0);
  cost.sigma = j.value("sigma", 0.0);
  if (j.contains("equity_weight")) {
    const json& w = j.at("equity_weight");
    if (w.is_string()) {
      if (w.get<std::string>() != "1-rho")
        throw Error(ErrorKind::Parse, "field 'cost.equity_weight': expected a number or \"1-rho\"");
      config.equity_weight_tracks_rho = true;
    } else {
      cost.equity_weight = as_number(w, "cost.equity_weight");
    }
  }
  if (j.contains("omega_u")) cost.omega_u = weights_from_json(j.at("omega_u"), n, "cost.omega_u");
  if (j.contains("omega_y")) cost.omega_y = weights_from_json(j.at("omega_y"), n, "cost.omega_y");
  if (j.contains("omega_split")) {
    const json& s = j.at("omega_split");
    const std::size_t first = as_count(require(s, "count", "cost.omega_split"), "cost.omega_split.count");
    const json& head = require(s, "first", "cost.omega_split");
    const json& tail = require(s, "rest", "cost.omega_split");
    cost.omega_u.assign(n, 0.0);
    cost.omega_y.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      const json& w = i < first ? head : tail;
      cost.omega_u[i] = w.value("omega_u", 0.0);
      cost.omega_y[i] = w.value("omega_y", 0.0);
    }
  }
  config.set_rho(cost.rho);
}

void budget_from_json(const json& j, const Profile& funding, std::size_t horizon, ScenarioConfig& config) {
  const std::string kind = lower_case(j.value("kind", std::string("cap")));
  if (kind == "cap") {
    config.budget_kind = BudgetKind::Cap;
  } else if (kind == "exact") {
    config.budget_kind = BudgetKind::Exact;
  } else {
    throw Error(ErrorKind::Parse, "field 'budget.kind': unknown kind '" + kind + "'");
  }
  const Eigen::Index m = funding.cols();
  if (j.contains("lower")) {
    const json& lower = j.at("lower");
    if (lower.is_string()) {
      if (lower == "initial_funding") {
        config.lower = funding;
      } else if (lower != "zero") {
        throw Error(ErrorKind::Parse, "field 'budget.lower': expected \"initial_funding\", \"zero\" or a matrix");
      }
    } else {
      config.lower = matrix_from_json(lower, "budget.lower");
    }
  }
  const json s0 = j.value("s0", json("initial_total"));
  if (s0.is_string()) {
    if (s0 != "initial_total") throw Error(ErrorKind::Parse, "field 'budget.s0': expected \"initial_total\" or a vector");
    config.schedule.s0 = funding.colwise().sum().transpose();
  } else {
    config.schedule.s0 = vector_from_json(s0, "budget.s0");
  }
  const double s0_scale = in_field("budget.s0_scale", [&] { return j.value("s0_scale", 1.0); });
  if (!(s0_scale > 0.0) || !std::isfinite(s0_scale))
    throw Error(ErrorKind::Parse, "field 'budget.s0_scale': must be positive");
  config.schedule.s0 *= s0_scale;
  const json growth = j.value("growth", json(0.0));
  config.schedule.growth =
      growth.is_number() ? Vector::Constant(m, growth.get<double>()) : vector_from_json(growth, "budget.growth");
  config.schedule.horizon = horizon;
}

EstimateSpec estimate_from_json(const json& j, const fs::path& base) {
  EstimateSpec spec;
  const std::string source = lower_case(j.value("source", std::string("exact")));
  if (source == "exact") {
    spec.source = EstimateSource::Exact;
  } else if (source == "perturbed") {
    spec.source = EstimateSource::Perturbed;
  } else if (source == "history") {
    spec.source = EstimateSource::History;
    spec.history = ingest_history(resolve(base, require(j, "path", "estimate").get<std::string>()));
  } else {
    throw Error(ErrorKind::Parse, "field 'estimate.source': unknown source '" + source + "'");
  }
  spec.rel_std = j.value("rel_std", 0.0);
  if (j.contains("window") && !j.at("window").is_null()) spec.window = as_count(j.at("window"), "estimate.window");
  return spec;
}

DriftSpec drift_from_json(const json& j, std::size_t n, Eigen::Index p, Eigen::Index m, const json& data) {
  DriftSpec drift;
  drift.horizon = as_count(require(j, "horizon", "drift"), "drift.horizon");
  const json& target = require(j, "target_G", "drift");
  if (target.is_string()) {
    if (target != "data" || !data.contains("drift_target_G"))
      throw Error(ErrorKind::Parse, "field 'drift.target_G': \"data\" needs a population data file with drift_target_G");
    drift.target_G.assign(n, Matrix::Constant(p, m, as_number(data.at("drift_target_G"), "drift_target_G")));
  } else if (target.is_number()) {
    drift.target_G.assign(n, Matrix::Constant(p, m, target.get<double>()));
  } else {
    for (const auto& t : target) drift.target_G.push_back(matrix_from_json(t, "drift.target_G"));
  }
  return drift;
}

}  // namespace

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Parse, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t offset = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n');
    const auto last_nl = text.rfind('\n', offset == 0 ? 0 : offset - 1);
    const std::size_t column = last_nl == std::string::npos ? offset + 1 : offset - last_nl;
    throw Error(ErrorKind::Parse, path.string() + ":" + std::to_string(line) + ":" + std::to_string(column) +
                                      ": malformed JSON");
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw Error(ErrorKind::Parse, "override '" + assignment + "': expected key=value");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw Error(ErrorKind::Parse, "override '" + assignment + "': empty path segment");
    const bool index = std::all_of(part.begin(), part.end(), [](unsigned char c) { return std::isdigit(c); });
    json* child = nullptr;
    if (node->is_array() && index) {
      const auto at = std::stoul(part);
      if (at >= node->size()) throw Error(ErrorKind::Parse, "override '" + assignment + "': index out of range");
      child = &(*node)[at];
    } else {
      if (node->is_null()) *node = json::object();
      if (!node->is_object()) throw Error(ErrorKind::Parse, "override '" + assignment + "': '" + part + "' is not an object");
      child = &(*node)[part];
    }
    node = child;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  *node = std::move(value);
}

PolicyConfig policy_from_json(const json& j, const std::string& field) {
  return in_field(field, [&] {
    PolicyConfig config;
    if (j.is_string()) {
      config.kind = policy_kind_from_string(j.get<std::string>());
      return config;
    }
    if (j.contains("kind")) config.kind = policy_kind_from_string(j.at("kind").get<std::string>());
    config.name = j.value("name", std::string());
    if (j.contains("gamma")) {
      const json& g = j.at("gamma");
      if (g.is_string()) {
        if (g != "auto") throw Error(ErrorKind::Parse, "gamma: expected a number or \"auto\"");
        config.auto_gamma = true;
      } else {
        config.gamma = as_number(g, field + ".gamma");
        config.auto_gamma = false;
      }
    }
    config.gamma_scale = j.value("gamma_scale", config.gamma_scale);
    if (j.contains("l_max")) config.l_max = as_count(j.at("l_max"), field + ".l_max");
    config.stop_tol = j.value("stop_tol", config.stop_tol);
    if (j.contains("relearn_window") && !j.at("relearn_window").is_null())
      config.relearn_window = as_count(j.at("relearn_window"), field + ".relearn_window");
    return config;
  });
}

json to_json(const PolicyConfig& config) {
  json j{{"kind", to_string(config.kind)}, {"l_max", config.l_max}, {"stop_tol", config.stop_tol}};
  if (!config.name.empty()) j["name"] = config.name;
  if (config.auto_gamma) {
    j["gamma"] = "auto";
    j["gamma_scale"] = config.gamma_scale;
  } else {
    j["gamma"] = config.gamma;
  }
  if (config.relearn_window) j["relearn_window"] = *config.relearn_window;
  return j;
}

ScenarioConfig scenario_from_json(const json& doc, const fs::path& base_dir) {
  if (!doc.is_object()) throw Error(ErrorKind::Parse, "scenario: expected a JSON object");
  const int version = in_field("schema_version", [&] { return doc.value("schema_version", 0); });
  if (version != kSchemaVersion)
    throw Error(ErrorKind::Parse, "field 'schema_version': expected " + std::to_string(kSchemaVersion) + ", got " +
                                      std::to_string(version));

  ScenarioConfig config;
  in_field("scenario", [&] {
    config.name = doc.value("name", std::string("scenario"));
    config.seed = doc.value("seed", std::uint64_t{0});
    config.horizon = doc.contains("horizon") ? as_count(doc.at("horizon"), "horizon") : config.horizon;
    config.realizations = doc.contains("realizations") ? as_count(doc.at("realizations"), "realizations") : 1;
    config.threads = doc.contains("threads") ? as_count(doc.at("threads"), "threads") : 0;
    config.track_reference = doc.value("track_reference", false);
  });

  Population pop = in_field("population", [&] {
    return population_from_json(require(doc, "population", "scenario"), base_dir, config.seed);
  });
  config.models = std::move(pop.models);
  config.initial_funding = pop.initial_funding;
  const std::size_t n = config.models.size();
  const Eigen::Index m = config.models.front().m();
  const Eigen::Index p = config.models.front().p();
  if (config.initial_funding.rows() != static_cast<Eigen::Index>(n) || config.initial_funding.cols() != m)
    throw Error(ErrorKind::Validation, "initial funding must be " + std::to_string(n) + "x" + std::to_string(m));
  if (pop.nominal) {
    for (std::size_t i = 0; i < n; ++i)
      config.models[i].set_state(
          equilibrium_for(*pop.nominal, config.initial_funding.row(static_cast<Eigen::Index>(i)).transpose()).x_bar);
  } else if (!pop.explicit_states) {
    equilibrium_state_rows(config.models, config.initial_funding);
  }

  config.graph = in_field("graph", [&] { return graph_from_json(doc.value("graph", json::object()), n, base_dir, config.seed); });
  in_field("cost", [&] { cost_from_json(doc.value("cost", json::object()), n, config); });
  in_field("budget", [&] { budget_from_json(doc.value("budget", json::object()), config.initial_funding, config.horizon, config); });

  if (doc.contains("policies")) {
    const json& list = doc.at("policies");
    if (!list.is_array()) throw Error(ErrorKind::Parse, "field 'policies': expected an array");
    for (std::size_t i = 0; i < list.size(); ++i)
      config.policies.push_back(policy_from_json(list[i], "policies[" + std::to_string(i) + "]"));
  } else {
    config.policies = {PolicyConfig{}};
  }
  config.solver = doc.contains("solver") ? policy_from_json(doc.at("solver"), "solver") : PolicyConfig{};
  config.solver.kind = PolicyKind::SOL;

  config.noise = in_field("noise", [&] { return noise_from_json(doc.value("noise", json())); });
  config.estimate = in_field("estimate", [&] { return estimate_from_json(doc.value("estimate", json::object()), base_dir); });
  if (doc.contains("drift") && !doc.at("drift").is_null())
    config.drift = in_field("drift", [&] { return drift_from_json(doc.at("drift"), n, p, m, pop.data); });

  config.validate();
  return config;
}

ScenarioConfig load_scenario(const fs::path& path, std::span<const std::string> overrides) {
  json doc = read_json_file(path);
  for (const auto& o : overrides) apply_override(doc, o);
  return scenario_from_json(doc, path.parent_path());
}

SweepGrid sweep_from_json(const json& doc) {
  SweepGrid grid;
  if (!doc.contains("sweep")) return grid;
  return in_field("sweep", [&] {
    const json& s = doc.at("sweep");
    auto list = [&](const char* key, std::vector<double>& out) {
      if (!s.contains(key)) return;
      out.clear();
      for (const auto& v : s.at(key)) out.push_back(as_number(v, std::string("sweep.") + key));
    };
    list("rho", grid.rho);
    list("sigma", grid.sigma);
    return grid;
  });
}

}  // namespace eqalloc
