// rwre: command-line front end.
//
//   rwre classify --env F [--tol T]
//   rwre simulate --env F --stop {steps|returns|hitgen}:N [--grid dyadic:J0:J1] --replicas R --seed S --out PATH
//   rwre exact    --env F --depth D --m M --seed S [--oracle]
//   rwre verify   --env F --suite {biggins|martingale|maxpot} ...
//   rwre sweep    --env-dir DIR [--tol T]
//
// Exit status: 0 success, 2 usage or configuration error, 3 resource limit, 1 anything else.

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "rwre/brw.hpp"
#include "rwre/env_io.hpp"
#include "rwre/errors.hpp"
#include "rwre/exact.hpp"
#include "rwre/harness.hpp"
#include "rwre/json_out.hpp"
#include "rwre/regime.hpp"

namespace fs = std::filesystem;
using namespace rwre;

namespace {

constexpr std::size_t kOracleVertexLimit = 20000;

std::string regime_json(const RegimeReport& r) {
  JsonObject pred;
  pred.real("r_limit", r.predicted.r_limit)
      .real("rtilde_limit", r.predicted.rtilde_limit)
      .real("root_local_time_exponent", r.predicted.root_local_time_exponent);
  if (r.predicted.xstar_scaling) {
    pred.string("xstar_scaling", to_string(*r.predicted.xstar_scaling));
  } else {
    pred.null("xstar_scaling");
  }
  pred.real("nu", r.predicted.nu).real("nu_prime", r.predicted.nu_prime);

  JsonObject o;
  o.real("psi0", r.psi0).real("psi1", r.psi1).real("chi", r.chi).real("psi_prime_1", r.psi_prime_1);
  if (!r.kappa) {
    o.null("kappa");
  } else if (std::isinf(*r.kappa)) {
    o.string("kappa", "inf");
  } else {
    o.real("kappa", *r.kappa);
  }
  o.real("gamma_tilde", r.gamma_tilde).string("regime", to_string(r.regime)).raw("predicted", pred.str());
  return o.str();
}

EnvironmentSpec load_valid(const std::string& path) {
  EnvironmentSpec spec = load_environment(path);
  require_valid(spec);
  return spec;
}

StopRule parse_stop(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw UsageError("--stop expects KIND:N, got " + text);
  const std::string kind = text.substr(0, colon);
  std::uint64_t n = 0;
  try {
    std::size_t used = 0;
    n = std::stoull(text.substr(colon + 1), &used);
    if (used != text.size() - colon - 1) throw std::invalid_argument(text);
  } catch (const std::exception&) {
    throw UsageError("--stop: bad count in " + text);
  }
  if (n == 0) throw UsageError("--stop: N must be positive");
  if (kind == "steps") return StopRule::steps(n);
  if (kind == "returns") return StopRule::root_returns(n);
  if (kind == "hitgen") return StopRule::hit_generation(n);
  throw UsageError("--stop: kind must be steps, returns or hitgen, got " + kind);
}

std::vector<std::uint64_t> parse_grid(const std::string& text) {
  unsigned j0 = 0;
  unsigned j1 = 0;
  char tail = 0;
  if (std::sscanf(text.c_str(), "dyadic:%u:%u%c", &j0, &j1, &tail) != 2)
    throw UsageError("--grid expects dyadic:J0:J1, got " + text);
  return dyadic_grid(j0, j1);
}

struct ClassifyArgs {
  std::string env;
  double tol = kDefaultRegimeTolerance;
};

struct SimulateArgs {
  std::string env;
  std::string stop;
  std::string grid;
  std::size_t replicas = 1;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
  std::uint64_t step_cap = 0;
  std::uint32_t max_resamples = 64;
};

struct ExactArgs {
  std::string env;
  std::uint32_t depth = 0;
  std::uint32_t m = 0;
  std::uint64_t seed = 0;
  bool oracle = false;
};

struct VerifyArgs {
  std::string env;
  std::string suite;
  int n = 4;
  std::optional<double> c;
  std::string which = "W";
  std::vector<std::uint32_t> levels{15, 20};
  std::size_t replicas = 100000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct SweepArgs {
  std::string dir;
  double tol = kDefaultRegimeTolerance;
};

int cmd_classify(const ClassifyArgs& a) {
  const EnvironmentSpec spec = load_valid(a.env);
  std::cout << regime_json(classify(spec, a.tol)) << '\n';
  return 0;
}

int cmd_simulate(const SimulateArgs& a) {
  const StopRule stop = parse_stop(a.stop);
  ExperimentPlan plan;
  plan.spec = load_valid(a.env);
  plan.kind = stop.kind;
  plan.grid = a.grid.empty() ? std::vector<std::uint64_t>{stop.value} : parse_grid(a.grid);
  plan.stop_value = stop.value;
  plan.replicas = a.replicas;
  plan.master_seed = a.seed;
  plan.max_resamples_per_replica = a.max_resamples;
  plan.step_cap = a.step_cap;
  plan.threads = std::max(1u, a.threads);
  if (plan.grid.back() > stop.value) throw UsageError("--grid extends beyond the --stop count");

  const PlanResult result = run_plan(plan);

  std::ofstream jsonl(a.out, std::ios::binary);
  if (!jsonl) throw ConfigError("cannot write " + a.out);
  write_jsonl(result, jsonl);
  const std::string summary_path = a.out + ".summary.csv";
  std::ofstream csv(summary_path, std::ios::binary);
  if (!csv) throw ConfigError("cannot write " + summary_path);
  write_summary_csv(result.records, csv);
  std::vector<std::string> plots;
  for (Observable o : {Observable::kR, Observable::kRTilde, Observable::kXStar, Observable::kLRoot,
                       Observable::kLogLRoot}) {
    if (std::none_of(result.records.begin(), result.records.end(),
                     [o](const EstimateRecord& r) { return r.observable == o; }))
      continue;
    const std::string path = a.out + "." + std::string(to_string(o)) + ".dat";
    std::ofstream dat(path, std::ios::binary);
    if (!dat) throw ConfigError("cannot write " + path);
    write_plot_data(result.records, o, dat);
    plots.push_back(path);
  }

  if (result.truncated_replicas > 0) {
    std::cerr << "warning: " << result.truncated_replicas << " of " << plan.replicas
              << " replicas hit the step cap; their later checkpoints are excluded\n";
  }
  if (result.failed_replicas > 0) {
    std::cerr << "warning: " << result.failed_replicas << " replicas went extinct on every attempt\n";
  }
  std::string plot_list = "[";
  for (std::size_t i = 0; i < plots.size(); ++i) plot_list += (i ? "," : "") + json_quote(plots[i]);
  plot_list += "]";
  std::cout << JsonObject()
                   .integer("replicas", static_cast<std::int64_t>(plan.replicas))
                   .integer("extinct_resamples", static_cast<std::int64_t>(result.extinct_resamples))
                   .integer("failed_replicas", static_cast<std::int64_t>(result.failed_replicas))
                   .integer("truncated_replicas", static_cast<std::int64_t>(result.truncated_replicas))
                   .string("jsonl", a.out)
                   .string("summary", summary_path)
                   .raw("plots", plot_list)
                   .str()
            << '\n';
  return 0;
}

int cmd_exact(const ExactArgs& a) {
  const EnvironmentSpec spec = load_valid(a.env);
  if (a.m < 1 || a.m > a.depth) throw UsageError("--m must lie in [1, depth]");
  const FrozenTree tree = freeze(spec, a.depth, a.seed);
  const ExactQuantities q = compute_exact(tree, a.m);

  JsonObject o;
  o.integer("depth", a.depth)
      .integer("m", a.m)
      .integer("vertices", static_cast<std::int64_t>(tree.vertex_count()))
      .boolean("extinct", tree.extinct)
      .real("rho", q.rho)
      .real("gamma_root", q.gamma[kRoot])
      .real("expected_hit_time_paper", q.expected_hit_time)
      .real("expected_hit_time_with_root_term", q.expected_hit_time_with_root_term);
  if (a.oracle) {
    if (tree.vertex_count() > kOracleVertexLimit) {
      throw ResourceError("--oracle is limited to " + std::to_string(kOracleVertexLimit) + " vertices, tree has " +
                          std::to_string(tree.vertex_count()));
    }
    const TreeArena& arena = tree.arena;
    const StateSet target = StateSet::generation(tree, a.m);
    double max_err = 0.0;
    for (VertexId x = 0; x < tree.vertex_count(); ++x) {
      if (tree.generation(x) >= a.m) continue;
      const VertexId par = x == kRoot ? kVirtualParent : arena.parent(x);
      const double o_beta = oracle_hit_prob(tree, x, target, StateSet::single(tree, par));
      max_err = std::max(max_err, std::abs(o_beta - q.beta[x]));
    }
    o.real("expected_hit_time_oracle", q.rho > 0 ? oracle_expected_time(tree, kRoot, a.m)
                                                 : std::numeric_limits<double>::quiet_NaN())
        .real("max_abs_beta_error", max_err);
  } else {
    o.null("expected_hit_time_oracle").null("max_abs_beta_error");
  }
  std::cout << o.str() << '\n';
  return 0;
}

std::string suite_report(std::string_view suite, int n, std::optional<double> c, double lhs, double se, double rhs,
                         double z) {
  JsonObject o;
  o.string("suite", suite).integer("n", n).real("c", c).real("lhs", lhs).real("stderr", se).real("rhs", rhs);
  if (std::isinf(z)) {
    o.string("z", z > 0 ? "inf" : "-inf");
  } else {
    o.real("z", z);
  }
  return o.str();
}

int cmd_verify(const VerifyArgs& a) {
  const EnvironmentSpec spec = load_valid(a.env);
  const unsigned threads = std::max(1u, a.threads);
  if (a.suite == "biggins") {
    const double c = a.c ? *a.c : sn_median(spec, a.n);
    const ManyToOneReport r = verify_many_to_one(spec, a.n, c, a.replicas, a.seed, threads);
    std::cout << suite_report("biggins", r.n, r.c, r.lhs_estimate, r.lhs_stderr, r.rhs_exact, r.z_score) << '\n';
  } else if (a.suite == "martingale") {
    if (a.which != "W" && a.which != "M") throw UsageError("--which must be W or M");
    const MeanEstimate e =
        martingale_mean(spec, a.which == "W" ? Martingale::kW : Martingale::kM, a.n, a.replicas, a.seed, threads);
    const double z = e.std_error > 0 ? (e.mean - 1.0) / e.std_error
                     : std::abs(e.mean - 1.0) <= 1e-12 ? 0.0
                                                       : std::copysign(std::numeric_limits<double>::infinity(), e.mean - 1.0);
    std::cout << suite_report(a.which == "W" ? "martingale_W" : "martingale_M", a.n, std::nullopt, e.mean, e.std_error,
                              1.0, z)
              << '\n';
  } else if (a.suite == "maxpot") {
    const RegimeReport rep = classify(spec);
    if (!rep.gamma_tilde) throw ConfigError("maxpot needs a recurrent environment");
    const double gt = *rep.gamma_tilde;
    for (const auto& agg : max_potential_profile(spec, a.levels, a.replicas, a.seed, threads)) {
      const double z = agg.stderr_max_v > 0 ? (agg.mean_max_v - gt) / agg.stderr_max_v : 0.0;
      JsonObject o;
      o.string("suite", "maxpot")
          .integer("n", agg.level)
          .null("c")
          .real("lhs", agg.mean_max_v)
          .real("stderr", agg.stderr_max_v)
          .real("rhs", gt)
          .real("z", z)
          .integer("count", static_cast<std::int64_t>(agg.count))
          .real("min_max_v", agg.min_max_v)
          .real("mean_max_bar_v", agg.mean_max_bar_v)
          .real("max_max_bar_v", agg.max_max_bar_v);
      std::cout << o.str() << '\n';
    }
  } else {
    throw UsageError("--suite must be biggins, martingale or maxpot");
  }
  return 0;
}

int cmd_sweep(const SweepArgs& a) {
  if (!fs::is_directory(a.dir)) throw ConfigError("not a directory: " + a.dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(a.dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  int status = 0;
  for (const auto& f : files) {
    try {
      const EnvironmentSpec spec = load_valid(f.string());
      std::cout << JsonObject().string("env", f.filename().string()).raw("report", regime_json(classify(spec, a.tol))).str()
                << '\n';
    } catch (const ConfigError& e) {
      std::cout << JsonObject().string("env", f.filename().string()).string("error", e.what()).str() << '\n';
      status = 2;
    }
  }
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random walks in random environment on Galton-Watson trees"};
  app.require_subcommand(1);

  ClassifyArgs ca;
  auto* classify_cmd = app.add_subcommand("classify", "Compute psi-derived constants and the regime");
  classify_cmd->add_option("--env", ca.env, "Environment JSON file")->required();
  classify_cmd->add_option("--tol", ca.tol, "Regime threshold tolerance")->check(CLI::PositiveNumber);

  SimulateArgs sa;
  auto* sim_cmd = app.add_subcommand("simulate", "Run replicas of the walk and write JSONL, CSV and plot data");
  sim_cmd->add_option("--env", sa.env, "Environment JSON file")->required();
  sim_cmd->add_option("--stop", sa.stop, "steps:N, returns:N or hitgen:M")->required();
  sim_cmd->add_option("--grid", sa.grid, "Checkpoints dyadic:J0:J1 (default: the stop count only)");
  sim_cmd->add_option("--replicas", sa.replicas, "Number of replicas")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--seed", sa.seed, "Master seed");
  sim_cmd->add_option("--out", sa.out, "JSONL output path")->required();
  sim_cmd->add_option("--threads", sa.threads, "Worker threads");
  sim_cmd->add_option("--step-cap", sa.step_cap, "Per-replica step budget (0: default)");
  sim_cmd->add_option("--max-resamples", sa.max_resamples, "Extinction retries per replica");

  ExactArgs ea;
  auto* exact_cmd = app.add_subcommand("exact", "Exact hitting quantities on a frozen tree");
  exact_cmd->add_option("--env", ea.env, "Environment JSON file")->required();
  exact_cmd->add_option("--depth", ea.depth, "Depth of the frozen window")->required()->check(CLI::Range(1u, 64u));
  exact_cmd->add_option("--m", ea.m, "Target generation")->required();
  exact_cmd->add_option("--seed", ea.seed, "Tree seed");
  exact_cmd->add_flag("--oracle", ea.oracle, "Also solve the chain directly");

  VerifyArgs va;
  auto* verify_cmd = app.add_subcommand("verify", "Branching random walk checks");
  verify_cmd->add_option("--env", va.env, "Environment JSON file")->required();
  verify_cmd->add_option("--suite", va.suite, "biggins, martingale or maxpot")->required();
  verify_cmd->add_option("--n", va.n, "Generation for biggins and martingale");
  verify_cmd->add_option("--c", va.c, "Threshold (biggins; default: median of S_n)");
  verify_cmd->add_option("--which", va.which, "W or M (martingale)");
  verify_cmd->add_option("--levels", va.levels, "Levels for maxpot")->delimiter(',');
  verify_cmd->add_option("--replicas", va.replicas, "Number of trees")->check(CLI::PositiveNumber);
  verify_cmd->add_option("--seed", va.seed, "Master seed");
  verify_cmd->add_option("--threads", va.threads, "Worker threads");

  SweepArgs wa;
  auto* sweep_cmd = app.add_subcommand("sweep", "Classify every *.json in a directory");
  sweep_cmd->add_option("--env-dir", wa.dir, "Directory of environment files")->required();
  sweep_cmd->add_option("--tol", wa.tol, "Regime threshold tolerance")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*classify_cmd) return cmd_classify(ca);
    if (*sim_cmd) return cmd_simulate(sa);
    if (*exact_cmd) return cmd_exact(ea);
    if (*verify_cmd) return cmd_verify(va);
    if (*sweep_cmd) return cmd_sweep(wa);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
