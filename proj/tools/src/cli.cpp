#include "eqalloc/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eqalloc/config.hpp"
#include "eqalloc/error.hpp"
#include "eqalloc/estimation.hpp"
#include "eqalloc/feasible_set.hpp"
#include "eqalloc/io.hpp"
#include "eqalloc/scenarios.hpp"

namespace eqalloc::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string to_text(const json& j) { return j.dump(2) + "\n"; }

ScenarioConfig load(const Invocation& inv) {
  if (inv.config_path.empty()) throw Error(ErrorKind::InvalidInput, "--config is required");
  std::vector<std::string> overrides = inv.overrides;
  if (inv.seed_override) overrides.push_back("seed=" + std::to_string(*inv.seed_override));
  return load_scenario(inv.config_path, overrides);
}

json config_doc(const Invocation& inv) {
  json doc = read_json_file(inv.config_path);
  for (const auto& o : inv.overrides) apply_override(doc, o);
  return doc;
}

int simulate(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig config = load(inv);
  const RunResult result = run_scenario(config);
  const RunTable table = tabulate(result);
  std::ostringstream csv;
  write_run_csv(csv, table);
  const fs::path dir(inv.output_dir);
  write_text_file(dir / "runs.csv", csv.str());
  write_text_file(dir / "summary.json", to_text(summary_json(result, aggregate(table))));
  out << config.name << ": " << result.realizations << " realization(s), " << result.policies.size()
      << " policy(ies), K=" << result.horizon << ", seed " << result.seed << "\n";
  for (std::size_t p = 0; p < result.policies.size(); ++p)
    out << "  " << result.policies[p] << "  equitability " << format_double(result.normalized_end(p, &PeriodMetrics::equitability))
        << "  equal allocation " << format_double(result.normalized_end(p, &PeriodMetrics::equal_allocation)) << "\n";
  out << "wrote " << (dir / "runs.csv").string() << "\n";
  return 0;
}

int sweep(const Invocation& inv, std::ostream& out, bool pareto) {
  const ScenarioConfig config = load(inv);
  SweepGrid grid = sweep_from_json(config_doc(inv));
  if (!inv.rho_values.empty()) grid.rho = inv.rho_values;
  if (!inv.sigma_values.empty()) grid.sigma = inv.sigma_values;
  const fs::path dir(inv.output_dir);
  std::ostringstream csv;
  if (pareto) {
    const auto rows = pareto_sweep(config, grid.rho, grid.sigma);
    write_csv(csv, rows);
    write_text_file(dir / "pareto.csv", csv.str());
    write_text_file(dir / "pareto.json", to_text(json{{"name", config.name}, {"seed", config.seed}, {"rows", to_json(rows)}}));
    for (const auto& r : rows)
      out << "sigma " << r.sigma << " rho " << r.rho << "  " << format_double(r.equitability_ratio) << " "
          << format_double(r.equal_allocation_ratio) << "  " << to_string(r.quadrant) << "\n";
  } else {
    const auto rows = rho_sweep(config, grid.rho);
    write_csv(csv, rows);
    write_text_file(dir / "rho_sweep.csv", csv.str());
    write_text_file(dir / "rho_sweep.json", to_text(json{{"name", config.name}, {"seed", config.seed}, {"rows", to_json(rows)}}));
    for (const auto& r : rows)
      out << "rho " << r.rho << "  " << format_double(r.equitability_ratio) << " " << format_double(r.equal_allocation_ratio)
          << "\n";
  }
  return 0;
}

int learn(const Invocation& inv, std::ostream& out) {
  if (inv.history_path.empty()) throw Error(ErrorKind::InvalidInput, "--history is required");
  const auto records = ingest_history(inv.history_path);
  std::size_t n = 0;
  for (const auto& r : records) n = std::max(n, r.community + 1);
  std::vector<std::vector<IoRecord>> per(n);
  for (const auto& r : records) per[r.community].push_back(r);
  std::vector<MapEstimate> estimates;
  for (std::size_t i = 0; i < n; ++i) {
    if (per[i].empty()) throw Error(ErrorKind::NoData, "no records for community " + std::to_string(i));
    estimates.push_back(fit_linear(per[i], inv.window));
  }
  const fs::path path = fs::path(inv.output_dir) / "estimates.json";
  write_text_file(path, to_text(estimates_json(estimates)));
  out << records.size() << " records, " << n << " communities; wrote " << path.string() << "\n";
  return 0;
}

// Input: { "u": [[...]], "budget": { "kind": "cap"|"exact", "s_max": [...], "lower": [[...]] } }
int project_cmd(const Invocation& inv, std::ostream& out) {
  if (inv.input_path.empty()) throw Error(ErrorKind::InvalidInput, "--input is required");
  const json doc = read_json_file(inv.input_path);
  if (!doc.contains("u") || !doc.contains("budget")) throw Error(ErrorKind::Parse, "project input needs 'u' and 'budget'");
  const Profile u = matrix_from_json(doc.at("u"), "u");
  const json& b = doc.at("budget");
  BudgetSet set;
  const std::string kind = b.value("kind", std::string("cap"));
  if (kind != "cap" && kind != "exact") throw Error(ErrorKind::Parse, "budget.kind: expected cap or exact");
  set.kind = kind == "exact" ? BudgetKind::Exact : BudgetKind::Cap;
  if (!b.contains("s_max")) throw Error(ErrorKind::Parse, "budget: missing 's_max'");
  set.s_max = vector_from_json(b.at("s_max"), "budget.s_max");
  if (b.contains("lower")) set.lower = matrix_from_json(b.at("lower"), "budget.lower");
  set.validate(static_cast<std::size_t>(u.rows()));
  out << to_text(json{{"u", to_json(Matrix(project(set, u)))}});
  return 0;
}

int validate_cmd(const Invocation& inv, std::ostream& out) {
  const ScenarioConfig config = load(inv);
  out << "ok: " << config.name << ", " << config.communities() << " communities, " << config.graph.edge_count()
      << " edges, " << config.policies.size() << " policy(ies), K=" << config.horizon << ", " << config.realizations
      << " realization(s), seed " << config.seed << "\n";
  return 0;
}

}  // namespace

std::string default_output_dir() {
  const char* env = std::getenv("EQALLOC_OUTPUT_DIR");
  return env && *env ? env : "out";
}

int run(const Invocation& inv, std::ostream& out, std::ostream& err) {
  try {
    switch (inv.subcommand) {
      case Subcommand::Simulate: return simulate(inv, out);
      case Subcommand::SweepRho: return sweep(inv, out, false);
      case Subcommand::SweepPareto: return sweep(inv, out, true);
      case Subcommand::Learn: return learn(inv, out);
      case Subcommand::Project: return project_cmd(inv, out);
      case Subcommand::Validate: return validate_cmd(inv, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
  return 1;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Equitable subsidy allocation experiments"};
  app.require_subcommand(1);
  Invocation inv;
  inv.output_dir = default_output_dir();

  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("-c,--config", inv.config_path, "Scenario JSON file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("-o,--output-dir", inv.output_dir, "Output directory (default $EQALLOC_OUTPUT_DIR or out)");
    sub->add_option("--set", inv.overrides, "Config override key=value (dotted path), repeatable");
    sub->add_option("--seed", inv.seed_override, "Master seed override");
  };
  auto* simulate_app = app.add_subcommand("simulate", "Run a scenario and write runs.csv and summary.json");
  add_common(simulate_app, true);
  auto* rho_app = app.add_subcommand("sweep-rho", "SOL sweep over rho");
  add_common(rho_app, true);
  rho_app->add_option("--rho", inv.rho_values, "rho values")->delimiter(',');
  auto* pareto_app = app.add_subcommand("sweep-pareto", "SOL grid over rho and sigma");
  add_common(pareto_app, true);
  pareto_app->add_option("--rho", inv.rho_values, "rho values")->delimiter(',');
  pareto_app->add_option("--sigma", inv.sigma_values, "sigma values")->delimiter(',');
  auto* learn_app = app.add_subcommand("learn", "Fit static maps from a history CSV");
  add_common(learn_app, false);
  learn_app->add_option("--history", inv.history_path, "History CSV")->required()->check(CLI::ExistingFile);
  learn_app->add_option("--window", inv.window, "Use only the last N records per community");
  auto* project_app = app.add_subcommand("project", "Project an allocation onto a budget set");
  add_common(project_app, false);
  project_app->add_option("--input", inv.input_path, "JSON with u and budget")->required()->check(CLI::ExistingFile);
  auto* validate_app = app.add_subcommand("validate", "Check a scenario config without running it");
  add_common(validate_app, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    std::ostringstream o;
    std::ostringstream e2;
    const int code = app.exit(e, o, e2);
    out << o.str();
    err << e2.str();
    return code;
  }
  if (simulate_app->parsed()) inv.subcommand = Subcommand::Simulate;
  else if (rho_app->parsed()) inv.subcommand = Subcommand::SweepRho;
  else if (pareto_app->parsed()) inv.subcommand = Subcommand::SweepPareto;
  else if (learn_app->parsed()) inv.subcommand = Subcommand::Learn;
  else if (project_app->parsed()) inv.subcommand = Subcommand::Project;
  else inv.subcommand = Subcommand::Validate;
  return run(inv, out, err);
}

}  // namespace eqalloc::cli
