#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dpnash/audit.hpp"
#include "dpnash/emit.hpp"
#include "dpnash/monte_carlo.hpp"
#include "dpnash/scenario.hpp"

namespace fs = std::filesystem;
using namespace dpnash;

namespace {

struct CommonArgs {
  std::string scenario_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  int jobs = 1;
};

void add_common(CLI::App* cmd, CommonArgs& args, bool with_jobs) {
  cmd->add_option("--scenario", args.scenario_path, "Scenario JSON file")
      ->required();
  cmd->add_option("--out", args.out_dir, "Output directory (created if missing)");
  cmd->add_option("--seed", args.seed, "Override the scenario seed");
  if (with_jobs)
    cmd->add_option("--jobs", args.jobs, "Worker threads")
        ->check(CLI::PositiveNumber);
}

Scenario load(const CommonArgs& args) {
  Scenario sc = load_scenario(args.scenario_path);
  if (args.seed) sc = sc.with_seed(*args.seed);
  return sc;
}

fs::path out_file(const CommonArgs& args, const char* name) {
  fs::create_directories(args.out_dir);
  return fs::path(args.out_dir) / name;
}

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t pos = text.find(',', start);
    const std::string cell = text.substr(
        start, pos == std::string::npos ? std::string::npos : pos - start);
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (end == cell.c_str() || *end != '\0')
      throw ValidationError(std::string(what) + ": '" + cell +
                            "' is not a number");
    out.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (out.empty()) throw ValidationError(std::string(what) + " is empty");
  return out;
}

int cmd_run(const CommonArgs& args) {
  const Scenario sc = load(args);
  RunOptions opts;
  opts.record_full = true;
  const NoiseStream noise(sc.noise, sc.seed, 0);
  const Trace tr =
      sc.time_varying()
          ? run_time_varying(sc.game, *sc.schedule(), sc.algorithm, noise,
                             sc.x0, opts)
          : run(sc.game, *sc.fixed_topology(), sc.algorithm, noise, sc.x0, opts);
  const fs::path path = out_file(args, "trace.csv");
  write_text_file(path.string(), trace_csv(tr));

  const Eigen::VectorXd xstar = sc.game.solve_nash();
  std::printf("wrote %s (%ld iterations, %d players)\n", path.string().c_str(),
              sc.algorithm.k_max, sc.game.players());
  std::printf("terminal distance to equilibrium: %.6g\n",
              (tr.final_state.x - xstar).norm());
  return 0;
}

int cmd_mc(const CommonArgs& args, bool check_bounds) {
  const Scenario sc = load(args);
  const McSummary summary = run_monte_carlo(sc, args.jobs);
  write_text_file(out_file(args, "mc_summary.csv").string(), mc_summary_csv(summary));
  write_text_file(out_file(args, "mc_summary.json").string(), mc_summary_json(summary));
  std::printf("replicas: %d   terminal E||x - x*||^2: %.6g (se %.2g)\n",
              summary.replicas, summary.terminal_aggregate_mse(),
              summary.terminal_aggregate_mse_se());

  if (!check_bounds) return 0;
  const BoundSet bounds = bounds_for(sc);
  const DominanceVerdict verdict = compare_to_bounds(summary, bounds);
  write_text_file(out_file(args, "dominance.json").string(), dominance_json(verdict));
  std::printf("bound dominance: %s (%zu checks, min margin %.6g)\n",
              verdict.pass ? "pass" : "FAIL", verdict.checks.size(),
              verdict.min_margin);
  return verdict.pass ? 0 : 3;
}

int cmd_sweep(const CommonArgs& args, const std::string& d_values) {
  const Scenario sc = load(args);
  const std::vector<double> ds = parse_list(d_values, "--d-values");
  const std::vector<SweepPoint> points = sweep_noise_scale(sc, ds, args.jobs);
  write_text_file(out_file(args, "sweep.csv").string(), sweep_csv(points));
  write_text_file(out_file(args, "sweep.json").string(), sweep_json(points));
  for (const auto& p : points)
    std::printf("d=%-8g terminal mse %.6g (se %.2g)\n", p.d, p.terminal_mse,
                p.std_error);
  return 0;
}

int cmd_dist(const CommonArgs& args, int replicas) {
  Scenario sc = load(args);
  if (replicas > 0) sc = sc.with_replicas(replicas);
  const McSummary summary = run_monte_carlo(sc, args.jobs);
  const std::vector<Histogram> hs = terminal_distribution(summary);
  write_text_file(out_file(args, "dist.csv").string(), histograms_csv(hs));
  write_text_file(out_file(args, "dist.json").string(), histograms_json(hs));
  const Eigen::VectorXd xstar = sc.game.solve_nash();
  for (const auto& h : hs)
    if (h.variable == 'x')
      std::printf("player %d terminal action mode %.4f (x* %.4f)\n",
                  h.player + 1, h.mode(), xstar[h.player]);
  return 0;
}

int cmd_bounds(const CommonArgs& args) {
  const Scenario sc = load(args);
  const BoundSet bounds = bounds_for(sc);
  write_text_file(out_file(args, "bounds.json").string(),
                  bound_report_json(bounds, sc.probe_iterations));
  const BoundReport& r = bounds.report;
  std::printf("initial error term   %.6g\n", r.initial_error_term);
  std::printf("stepsize term        %.6g\n", r.stepsize_term);
  std::printf("estimation lag term  %.6g\n", r.estimation_lag_term);
  std::printf("noise term           %.6g\n", r.noise_term);
  std::printf("limiting mse bound   %.6g\n", r.mse_limit);
  if (std::isfinite(r.epsilon))
    std::printf("privacy budget       %.6g\n", r.epsilon);
  else
    std::printf("privacy budget       inf (d = 0)\n");
  return 0;
}

int cmd_tune(const CommonArgs& args, double epsilon, const std::string& grid_text,
             double q_bar) {
  const Scenario sc = load(args);
  TuneGrid grid;
  if (!grid_text.empty()) {
    const std::vector<double> g = parse_list(grid_text, "--grid");
    if (g.size() != 6)
      throw ValidationError("--grid needs c_lo,c_hi,c_points,q_lo,q_hi,q_points");
    grid.c_lo = g[0];
    grid.c_hi = g[1];
    grid.c_points = int(g[2]);
    grid.q_lo = g[3];
    grid.q_hi = g[4];
    grid.q_points = int(g[5]);
  }
  const TuneResult best = tune_parameters(bound_inputs_for(sc), epsilon, grid, q_bar);

  nlohmann::ordered_json j;
  j["epsilon"] = epsilon;
  j["q_bar"] = q_bar;
  j["c"] = best.c;
  j["q"] = best.q;
  j["mse_limit"] = best.report.mse_limit;
  j["noise_scale"] = best.report.noise_scale;
  j["initial_error_term"] = best.report.initial_error_term;
  j["stepsize_term"] = best.report.stepsize_term;
  j["estimation_lag_term"] = best.report.estimation_lag_term;
  j["noise_term"] = best.report.noise_term;
  write_text_file(out_file(args, "tune.json").string(), j.dump(2) + "\n");

  std::printf("best (c, q) = (%.6g, %.6g)   mse bound %.6g   noise scale %.6g\n",
              best.c, best.q, best.report.mse_limit, best.report.noise_scale);
  return 0;
}

int cmd_audit(const CommonArgs& args, int player, double delta) {
  const Scenario sc = load(args);
  if (sc.time_varying())
    throw ValidationError("the sensitivity audit requires a fixed-topology scenario");
  if (player < 1 || player > sc.game.players())
    throw ValidationError("--player must be in 1..n_players");
  if (delta == 0.0)
    throw ValidationError("--delta must be nonzero (the pair must differ)");

  Eigen::VectorXd targets = sc.game.targets();
  targets[player - 1] += delta;
  const QuadraticAggregativeGame variant(targets, sc.game.slope(), sc.game.offset());

  Box hull = sc.bound_box;
  const Box vbox = variant.default_bound_box(sc.x0);
  hull.expand_to(vbox.lower);
  hull.expand_to(vbox.upper);
  const double C = std::max(estimate_constants(sc.game, hull).gradient_bound,
                            estimate_constants(variant, hull).gradient_bound);

  const AdjacentPair pair = make_adjacent_pair(sc.game, variant, hull);
  const SensitivityAudit audit = sensitivity_audit(
      pair, sc.algorithm, sc.noise, *sc.fixed_topology(), sc.x0, sc.seed, C);
  write_text_file(out_file(args, "audit.json").string(), audit_json(audit));

  std::printf("budget epsilon %.6g, spent %.6g (margin %.6g)\n", audit.epsilon,
              audit.budget_sum, audit.budget_margin);
  std::printf("observations identical: %s   min per-step margin: %.6g\n",
              audit.observations_identical ? "yes" : "no", audit.min_step_margin);
  std::printf("audit: %s\n", audit.pass ? "pass" : "FAIL");
  return audit.pass ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Privacy-preserving distributed Nash equilibrium seeking"};
  app.require_subcommand(1);

  CommonArgs run_args, mc_args, sweep_args, dist_args, bounds_args, tune_args,
      audit_args;

  CLI::App* run_cmd = app.add_subcommand("run", "Single trajectory, full trace");
  add_common(run_cmd, run_args, false);

  bool check_bounds = false;
  CLI::App* mc_cmd = app.add_subcommand("mc", "Monte Carlo error statistics");
  add_common(mc_cmd, mc_args, true);
  mc_cmd->add_flag("--check-bounds", check_bounds,
                   "Verify every statistic sits under its bound curve");

  std::string d_values = "0,0.5,1,1.5,2,2.5,3";
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "Terminal error vs noise scale");
  add_common(sweep_cmd, sweep_args, true);
  sweep_cmd->add_option("--d-values", d_values, "Comma-separated noise scales");

  int dist_replicas = 20000;
  CLI::App* dist_cmd =
      app.add_subcommand("dist", "Terminal-value histograms");
  add_common(dist_cmd, dist_args, true);
  dist_cmd->add_option("--replicas", dist_replicas,
                       "Replica count for the histograms")
      ->check(CLI::PositiveNumber);

  CLI::App* bounds_cmd =
      app.add_subcommand("bounds", "Closed-form convergence and privacy bounds");
  add_common(bounds_cmd, bounds_args, false);

  double tune_epsilon = 0.0, tune_q_bar = 0.999;
  std::string tune_grid;
  CLI::App* tune_cmd = app.add_subcommand(
      "tune", "Grid-minimize the mse bound at a fixed privacy budget");
  add_common(tune_cmd, tune_args, false);
  tune_cmd->add_option("--epsilon", tune_epsilon, "Privacy budget")
      ->required()
      ->check(CLI::PositiveNumber);
  tune_cmd->add_option("--grid", tune_grid,
                       "c_lo,c_hi,c_points,q_lo,q_hi,q_points");
  tune_cmd->add_option("--q-bar", tune_q_bar, "Noise decay rate during tuning");

  int audit_player = 1;
  double audit_delta = 1.0;
  CLI::App* audit_cmd = app.add_subcommand(
      "audit", "Verify the privacy budget on a coupled execution pair");
  add_common(audit_cmd, audit_args, false);
  audit_cmd->add_option("--player", audit_player,
                        "1-based player whose cost the variant changes");
  audit_cmd->add_option("--delta", audit_delta, "Target shift for the variant");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (run_cmd->parsed()) return cmd_run(run_args);
    if (mc_cmd->parsed()) return cmd_mc(mc_args, check_bounds);
    if (sweep_cmd->parsed()) return cmd_sweep(sweep_args, d_values);
    if (dist_cmd->parsed()) return cmd_dist(dist_args, dist_replicas);
    if (bounds_cmd->parsed()) return cmd_bounds(bounds_args);
    if (tune_cmd->parsed()) return cmd_tune(tune_args, tune_epsilon, tune_grid, tune_q_bar);
    if (audit_cmd->parsed()) return cmd_audit(audit_args, audit_player, audit_delta);
  } catch (const ValidationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "error: %s (iteration %ld, replica %ld)\n", e.what(),
                 e.iteration, e.replica);
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
