#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rngccs/generator.hpp"
#include "rngccs/instance_io.hpp"
#include "rngccs/report.hpp"
#include "rngccs/scenario.hpp"
#include "rngccs/util.hpp"

namespace {

using namespace rngccs;

struct SolveFlags {
  std::string instance_dir;
  std::string scenario;
  double gap = 0.10;
  double time_limit = 600.0;
  long node_limit = 1000000;
  uint64_t seed = 0;
  std::string outdir = "out";
  bool dump_model = false;
  bool strict_mass_balance = false;
  std::string branching = "most_fractional";
  std::string node_selection = "best_bound";
};

void add_solver_flags(CLI::App* cmd, SolveFlags& f) {
  cmd->add_option("--instance", f.instance_dir, "instance bundle directory")
      ->required();
  cmd->add_option("--gap", f.gap, "relative optimality gap tolerance");
  cmd->add_option("--time-limit", f.time_limit, "solver time limit, seconds");
  cmd->add_option("--node-limit", f.node_limit, "branch-and-bound node limit");
  cmd->add_option("--seed", f.seed, "tie-breaking seed");
  cmd->add_option("--outdir", f.outdir, "output directory");
  cmd->add_flag("--strict-mass-balance", f.strict_mass_balance,
                "require all captured CO2 to be sequestered (no venting)");
  cmd->add_option("--branching", f.branching,
                  "most_fractional | pseudo_cost");
  cmd->add_option("--node-selection", f.node_selection,
                  "best_bound | depth_first_dive");
}

SolverConfig solver_config(const SolveFlags& f) {
  SolverConfig cfg;
  cfg.gap_tolerance = f.gap;
  cfg.time_limit_seconds = f.time_limit;
  cfg.node_limit = f.node_limit;
  cfg.seed = f.seed;
  if (f.branching == "most_fractional") cfg.branching = BranchingRule::MostFractional;
  else if (f.branching == "pseudo_cost") cfg.branching = BranchingRule::PseudoCost;
  else throw InputError("unknown branching rule '" + f.branching + "'");
  if (f.node_selection == "best_bound") cfg.node_selection = NodeSelection::BestBound;
  else if (f.node_selection == "depth_first_dive")
    cfg.node_selection = NodeSelection::DepthFirstDive;
  else throw InputError("unknown node selection '" + f.node_selection + "'");
  cfg.progress = [](const std::string& line) { std::cout << line << "\n"; };
  return cfg;
}

// --scenario replaces the bundle policy with a builtin; the bundle's
// [policy.overrides] keys still apply on top.
PolicyScenario resolve_scenario(const NetworkInstance& inst,
                                const std::string& dir,
                                const std::string& scenario_flag) {
  if (scenario_flag.empty()) return inst.policy;
  PolicyScenario s = builtin_scenario(scenario_flag);
  auto kv = read_keyvalue_file(std::filesystem::path(dir) / "params.txt");
  for (const auto& [key, value] : kv)
    if (key.rfind("policy.overrides.", 0) == 0)
      apply_policy_key(s, key.substr(17), value);
  return s;
}

uint64_t config_hash(const NetworkInstance& inst, const PolicyScenario& pol,
                     const SolveFlags& f) {
  std::string blob;
  for (const auto& [k, v] : params_echo(inst.params)) blob += k + "=" + v + ";";
  for (const auto& [k, v] : policy_echo(pol)) blob += k + "=" + v + ";";
  blob += "gap=" + format_number(f.gap) + ";seed=" + std::to_string(f.seed) +
          ";strict=" + (f.strict_mass_balance ? "1" : "0") +
          ";branching=" + f.branching + ";node_selection=" + f.node_selection;
  return fnv1a64(blob);
}

void write_provenance(const std::filesystem::path& file,
                      const NetworkInstance& inst, const PolicyScenario& pol,
                      const SolveFlags& f, const NetworkSolution& sol) {
  nlohmann::ordered_json j;
  j["scenario"] = pol.name;
  char hex[32];
  std::snprintf(hex, sizeof(hex), "%016llx",
                static_cast<unsigned long long>(config_hash(inst, pol, f)));
  j["config_hash"] = hex;
  j["solver"] = {{"gap_tolerance", f.gap},
                 {"seed", f.seed},
                 {"branching", f.branching},
                 {"node_selection", f.node_selection},
                 {"strict_mass_balance", f.strict_mass_balance}};
  j["result"] = {{"status", to_string(sol.status)},
                 {"objective", sol.objective},
                 {"bound", sol.bound},
                 {"gap", sol.gap},
                 {"nodes", sol.nodes}};
  nlohmann::ordered_json params;
  for (const auto& [k, v] : params_echo(inst.params)) params[k] = v;
  j["technoeconomics"] = params;
  nlohmann::ordered_json policy;
  for (const auto& [k, v] : policy_echo(pol)) policy[k] = v;
  j["policy"] = policy;
  write_file_atomic(file, j.dump(2) + "\n");
}

int exit_code_for(const NetworkSolution& sol, double gap_tolerance) {
  if (sol.status == SolveStatus::NoIncumbent) return 2;
  return sol.gap <= gap_tolerance + 1e-12 ? 0 : 2;
}

int cmd_generate(uint64_t seed, const GeneratorSpec& spec, const std::string& out) {
  NetworkInstance inst = generate_synthetic(seed, spec);
  write_instance(inst, out);
  std::cout << "wrote instance bundle to " << out << " (" << inst.sources.size()
            << " sources, " << inst.facilities.size() << " facilities, "
            << inst.sinks.size() << " sinks, "
            << inst.dist_source_facility.size() + inst.dist_facility_sink.size()
            << " arcs)\n";
  return 0;
}

int cmd_solve(const SolveFlags& f) {
  NetworkInstance inst = load_instance(f.instance_dir);
  PolicyScenario pol = resolve_scenario(inst, f.instance_dir, f.scenario);
  for (const auto& warn : policy_warnings(pol))
    std::cerr << "warning: " << warn << "\n";

  RunOptions opts;
  opts.build.strict_mass_balance = f.strict_mass_balance;
  SolverConfig cfg = solver_config(f);
  RunResult run = run_scenario(inst, pol, cfg, opts);

  NetworkInstance scoped = inst;
  scoped.policy = pol;
  std::filesystem::create_directories(f.outdir);
  if (f.dump_model) {
    MilpModel model = build_model(scoped, opts.build);
    std::ofstream lp(std::filesystem::path(f.outdir) / "model.lp");
    write_lp_format(model, lp);
  }
  emit_reports(run.solution, scoped, f.outdir);
  write_provenance(std::filesystem::path(f.outdir) / "provenance.json", inst, pol,
                   f, run.solution);

  std::cout << "status=" << to_string(run.solution.status)
            << " objective=" << format_number(run.solution.objective)
            << " bound=" << format_number(run.solution.bound)
            << " gap=" << format_number(run.solution.gap)
            << " nodes=" << run.solution.nodes << "\n";
  std::cout << "reports in " << f.outdir << "\n";
  return exit_code_for(run.solution, f.gap);
}

int cmd_scenarios(const SolveFlags& f) {
  NetworkInstance inst = load_instance(f.instance_dir);
  RunOptions opts;
  opts.build.strict_mass_balance = f.strict_mass_balance;
  SolverConfig cfg = solver_config(f);

  std::vector<RunMetrics> rows;
  int worst = 0;
  for (const auto& scenario : builtin_scenarios()) {
    RunResult run = run_scenario(inst, scenario, cfg, opts);
    NetworkInstance scoped = inst;
    scoped.policy = scenario;
    std::filesystem::path subdir = std::filesystem::path(f.outdir) / scenario.name;
    emit_reports(run.solution, scoped, subdir);
    rows.push_back(run.metrics);
    worst = std::max(worst, exit_code_for(run.solution, f.gap));
    std::cout << scenario.name << ": objective="
              << format_number(run.solution.objective)
              << " gap=" << format_number(run.solution.gap) << "\n";
  }
  std::filesystem::create_directories(f.outdir);
  write_metrics_csv(std::filesystem::path(f.outdir) / "scenarios.csv", rows);
  std::cout << "wrote " << (std::filesystem::path(f.outdir) / "scenarios.csv").string()
            << "\n";
  return worst;
}

int cmd_sweep(const SolveFlags& f, const std::string& param,
              const std::string& values_csv) {
  NetworkInstance inst = load_instance(f.instance_dir);
  SweepSpec sweep;
  sweep.parameter = sweep_parameter_from_string(param);
  for (const auto& tok : split(values_csv, ',')) {
    std::string t = trim(tok);
    if (t.empty()) continue;
    try {
      size_t pos = 0;
      sweep.values.push_back(std::stod(t, &pos));
      if (pos != t.size()) throw std::invalid_argument(t);
    } catch (const std::exception&) {
      throw InputError("--values entry '" + t + "' is not a number");
    }
  }
  sweep.base_scenario = resolve_scenario(inst, f.instance_dir, f.scenario);

  RunOptions opts;
  opts.build.strict_mass_balance = f.strict_mass_balance;
  SolverConfig cfg = solver_config(f);
  auto results = run_sweep(inst, sweep, cfg, opts);

  std::vector<RunMetrics> rows;
  int worst = 0;
  for (const auto& r : results) {
    rows.push_back(r.metrics);
    worst = std::max(worst, exit_code_for(r.solution, f.gap));
  }
  std::filesystem::create_directories(f.outdir);
  write_metrics_csv(std::filesystem::path(f.outdir) / "scenarios.csv", rows);
  std::cout << "wrote " << (std::filesystem::path(f.outdir) / "scenarios.csv").string()
            << " (" << rows.size() << " runs)\n";
  return worst;
}

int cmd_dump_model(const SolveFlags& f, const std::string& out_file) {
  NetworkInstance inst = load_instance(f.instance_dir);
  inst.policy = resolve_scenario(inst, f.instance_dir, f.scenario);
  BuildOptions build;
  build.strict_mass_balance = f.strict_mass_balance;
  MilpModel model = build_model(inst, build);
  if (out_file.empty()) {
    write_lp_format(model, std::cout);
  } else {
    std::ofstream out(out_file);
    if (!out) throw InputError("cannot write " + out_file);
    write_lp_format(model, out);
    std::cout << "wrote " << out_file << "\n";
  }
  return 0;
}

int cmd_validate(const std::string& dir) {
  NetworkInstance inst = load_instance(dir);  // throws with details when invalid
  std::cout << "instance ok: " << inst.sources.size() << " sources, "
            << inst.facilities.size() << " facilities, " << inst.sinks.size()
            << " sinks\n";
  for (const auto& warn : policy_warnings(inst.policy))
    std::cout << "warning: " << warn << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"renewable natural gas + CO2 capture network optimizer"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "write a synthetic instance bundle");
  uint64_t gen_seed = 1;
  GeneratorSpec spec;
  std::string gen_out = "instance";
  bool demo = false;
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--sources", spec.n_sources, "number of feedstock sources");
  gen->add_option("--facilities", spec.n_facilities, "number of facilities");
  gen->add_option("--sinks", spec.n_sinks, "number of sequestration sites");
  gen->add_option("--clusters", spec.urban_cluster_count, "urban centroid count");
  gen->add_option("--supply-scale", spec.supply_scale, "scales all supplies");
  gen->add_option("--out", gen_out, "output bundle directory");
  gen->add_flag("--demo", demo, "use the bundled demo seed and spec");

  SolveFlags sf;
  auto* solve = app.add_subcommand("solve", "solve one policy scenario");
  add_solver_flags(solve, sf);
  solve->add_option("--scenario", sf.scenario,
                    "builtin scenario name (default: bundle policy)");
  solve->add_flag("--dump-model", sf.dump_model, "also write model.lp");

  SolveFlags scf;
  auto* scen = app.add_subcommand("scenarios", "run all five builtin scenarios");
  add_solver_flags(scen, scf);

  SolveFlags swf;
  std::string sweep_param, sweep_values;
  auto* sweep = app.add_subcommand("sweep", "one-at-a-time parameter sweep");
  add_solver_flags(sweep, swf);
  sweep->add_option("--scenario", swf.scenario, "base scenario name");
  sweep->add_option("--param", sweep_param, "swept parameter")->required();
  sweep->add_option("--values", sweep_values, "comma-separated values")->required();

  SolveFlags dmf;
  std::string dump_out;
  auto* dump = app.add_subcommand("dump-model", "export the model in LP format");
  dump->add_option("--instance", dmf.instance_dir, "instance bundle directory")
      ->required();
  dump->add_option("--scenario", dmf.scenario, "builtin scenario name");
  dump->add_flag("--strict-mass-balance", dmf.strict_mass_balance,
                 "require all captured CO2 to be sequestered");
  dump->add_option("--out", dump_out, "output file (default stdout)");

  std::string validate_dir;
  auto* val = app.add_subcommand("validate", "check an instance bundle");
  val->add_option("--instance", validate_dir, "instance bundle directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      if (demo) {
        spec = demo_spec();
        gen_seed = kDemoSeed;
      }
      return cmd_generate(gen_seed, spec, gen_out);
    }
    if (solve->parsed()) return cmd_solve(sf);
    if (scen->parsed()) return cmd_scenarios(scf);
    if (sweep->parsed()) return cmd_sweep(swf, sweep_param, sweep_values);
    if (dump->parsed()) return cmd_dump_model(dmf, dump_out);
    if (val->parsed()) return cmd_validate(validate_dir);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
