#include <omp.h>

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "qwloc/experiment.hpp"
#include "qwloc/io.hpp"

namespace {

using qwloc::ExperimentConfig;
using qwloc::RunManifest;

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void print_error(const std::string& type, const std::string& message) {
  nlohmann::json j;
  j["error"] = {{"type", type}, {"message", message}};
  std::cout << j.dump(2) << "\n";
}

void print_success(const RunManifest& man) {
  nlohmann::json j;
  j["experiment"] = man.experiment;
  j["manifest"] = man.manifest_path.string();
  j["files"] = man.files.size();
  j["warnings"] = man.warnings;
  j["duration_seconds"] = man.duration_seconds;
  std::cout << j.dump(2) << "\n";
}

// Per-subcommand option holder; values are applied over the config-file
// baseline only when the flag was actually passed.
struct CommonOpts {
  std::string config_path;
  int n = 0;
  double gamma = 0.0;
  std::vector<double> delta;
  std::string family;
  std::vector<std::string> families;
  std::uint64_t seed = 0;
  int seeds = 0;
  std::vector<double> times;
  double grid_dt = 0.0;
  double horizon = 0.0;
  double quantile = 0.0;
  std::vector<int> n_list;
  long long steps = 0;
  double e_min = 0.0;
  double e_max = 0.0;
  double e_step = 0.0;
  std::string out;
  bool overwrite = false;
};

void add_common_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path,
                  "key=value config file; flags override its entries");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--overwrite", o.overwrite, "replace existing outputs");
}

ExperimentConfig base_config(const CommonOpts& o) {
  ExperimentConfig cfg;
  if (!o.config_path.empty())
    cfg = ExperimentConfig::from_text(read_file(o.config_path));
  return cfg;
}

void apply_common(const CLI::App* cmd, const CommonOpts& o,
                  ExperimentConfig& cfg) {
  if (cmd->count("--seed")) cfg.seed = o.seed;
  if (cmd->count("--out")) cfg.out = o.out;
  if (cmd->count("--overwrite")) cfg.overwrite = true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qwloc: continuous-time quantum walks on glued trees under "
               "diagonal disorder"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "OpenMP thread count (0 = runtime default)");

  CommonOpts o_fig4, o_scal, o_hit, o_cross, o_thou;

  CLI::App* fig4 = app.add_subcommand(
      "fig4", "wave-packet spreading profiles and extents vs disorder");
  add_common_flags(fig4, o_fig4);
  fig4->add_option("--n", o_fig4.n, "tree depth (default 1000)");
  fig4->add_option("--gamma", o_fig4.gamma, "hopping rate (default 1)");
  fig4->add_option("--delta", o_fig4.delta, "disorder strengths, comma list")
      ->delimiter(',');
  fig4->add_option("--family", o_fig4.family, "disorder family (default cauchy)");
  fig4->add_option("--seeds", o_fig4.seeds, "realizations per delta (default 1)");
  fig4->add_option("--times", o_fig4.times, "snapshot times, comma list")
      ->delimiter(',');
  fig4->add_option("--quantile", o_fig4.quantile,
                   "extent quantile (default 0.99)");

  CLI::App* scal = app.add_subcommand(
      "scaling", "band-centre localization length vs disorder strength");
  add_common_flags(scal, o_scal);
  scal->add_option("--gamma", o_scal.gamma, "hopping rate (default 1)");
  scal->add_option("--delta", o_scal.delta, "delta grid, comma list")
      ->delimiter(',');
  scal->add_option("--family", o_scal.families,
                   "disorder families, comma list (default all three)")
      ->delimiter(',');
  scal->add_option("--seeds", o_scal.seeds, "runs per grid point (default 12)");
  scal->add_option("--steps", o_scal.steps,
                   "transfer-matrix steps per run (default 4e6)");

  CLI::App* hit = app.add_subcommand(
      "hitting", "peak transmission to the far root vs tree depth");
  add_common_flags(hit, o_hit);
  hit->add_option("--gamma", o_hit.gamma, "hopping rate (default 1)");
  hit->add_option("--delta", o_hit.delta, "disorder strength (default 0.2)")
      ->delimiter(',');
  hit->add_option("--family", o_hit.family, "disorder family (default cauchy)");
  hit->add_option("--seeds", o_hit.seeds, "realizations per depth (default 10)");
  hit->add_option("--n-list", o_hit.n_list, "tree depths, comma list")
      ->delimiter(',');
  hit->add_option("--grid-dt", o_hit.grid_dt,
                  "time-grid spacing (default 0.1/gamma)");
  hit->add_option("--horizon", o_hit.horizon,
                  "scan horizon (default 4n/gamma)");

  CLI::App* cross = app.add_subcommand(
      "crosscheck", "reduced models vs dense full-graph oracles");
  add_common_flags(cross, o_cross);
  cross->add_option("--n", o_cross.n, "tree depth <= 8 (default 6)");
  cross->add_option("--gamma", o_cross.gamma, "hopping rate (default 1)");
  cross->add_option("--times", o_cross.times, "comparison times, comma list")
      ->delimiter(',');

  CLI::App* thou = app.add_subcommand(
      "thouless", "closed-form localization length over an energy grid");
  add_common_flags(thou, o_thou);
  thou->add_option("--gamma", o_thou.gamma, "hopping rate (default 1)");
  thou->add_option("--delta", o_thou.delta, "Cauchy half-width (default 0.03)")
      ->delimiter(',');
  thou->add_option("--emin", o_thou.e_min, "grid start (default -3*gamma)");
  thou->add_option("--emax", o_thou.e_max, "grid end (default 9*gamma)");
  thou->add_option("--estep", o_thou.e_step, "grid step (default 0.01*gamma)");

  CLI11_PARSE(app, argc, argv);
  if (threads > 0) omp_set_num_threads(threads);

  try {
    RunManifest man;
    if (fig4->parsed()) {
      ExperimentConfig cfg = base_config(o_fig4);
      apply_common(fig4, o_fig4, cfg);
      if (fig4->count("--n")) cfg.n = o_fig4.n;
      if (fig4->count("--gamma")) cfg.gamma = o_fig4.gamma;
      if (fig4->count("--delta")) cfg.deltas = o_fig4.delta;
      if (fig4->count("--family")) cfg.family = o_fig4.family;
      if (fig4->count("--seeds")) cfg.seeds = o_fig4.seeds;
      if (fig4->count("--times")) cfg.times = o_fig4.times;
      if (fig4->count("--quantile")) cfg.quantile = o_fig4.quantile;
      man = qwloc::run_fig4(cfg);
    } else if (scal->parsed()) {
      ExperimentConfig cfg = base_config(o_scal);
      apply_common(scal, o_scal, cfg);
      if (scal->count("--gamma")) cfg.gamma = o_scal.gamma;
      if (scal->count("--delta")) cfg.deltas = o_scal.delta;
      if (scal->count("--family")) cfg.families = o_scal.families;
      if (scal->count("--seeds")) cfg.seeds = o_scal.seeds;
      if (scal->count("--steps")) cfg.steps = o_scal.steps;
      man = qwloc::run_scaling(cfg);
    } else if (hit->parsed()) {
      ExperimentConfig cfg = base_config(o_hit);
      apply_common(hit, o_hit, cfg);
      if (hit->count("--gamma")) cfg.gamma = o_hit.gamma;
      if (hit->count("--delta")) {
        if (o_hit.delta.size() != 1)
          throw std::invalid_argument("hitting: --delta takes one value");
        cfg.delta = o_hit.delta[0];
      }
      if (hit->count("--family")) cfg.family = o_hit.family;
      if (hit->count("--seeds")) cfg.seeds = o_hit.seeds;
      if (hit->count("--n-list")) cfg.n_list = o_hit.n_list;
      if (hit->count("--grid-dt")) cfg.grid_dt = o_hit.grid_dt;
      if (hit->count("--horizon")) cfg.horizon = o_hit.horizon;
      man = qwloc::run_hitting(cfg);
    } else if (cross->parsed()) {
      ExperimentConfig cfg = base_config(o_cross);
      if (o_cross.config_path.empty()) cfg.n = 6;  // dense-oracle default
      apply_common(cross, o_cross, cfg);
      if (cross->count("--n")) cfg.n = o_cross.n;
      if (cross->count("--gamma")) cfg.gamma = o_cross.gamma;
      if (cross->count("--times")) cfg.times = o_cross.times;
      man = qwloc::run_crosscheck(cfg);
      if (!man.passed) {
        print_error("crosscheck_failed",
                    "reduced models deviate from the full-graph oracles; see " +
                        (man.manifest_path.parent_path() / "crosscheck_report.json")
                            .string());
        return 3;
      }
    } else if (thou->parsed()) {
      ExperimentConfig cfg = base_config(o_thou);
      apply_common(thou, o_thou, cfg);
      if (thou->count("--gamma")) cfg.gamma = o_thou.gamma;
      if (thou->count("--delta")) {
        if (o_thou.delta.size() != 1)
          throw std::invalid_argument("thouless: --delta takes one value");
        cfg.delta = o_thou.delta[0];
      }
      if (thou->count("--emin")) cfg.e_min = o_thou.e_min;
      if (thou->count("--emax")) cfg.e_max = o_thou.e_max;
      if (thou->count("--estep")) cfg.e_step = o_thou.e_step;
      man = qwloc::run_thouless(cfg);
    }
    print_success(man);
    return 0;
  } catch (const qwloc::PathCollisionError& e) {
    print_error("path_collision", e.what());
    return 2;
  } catch (const std::invalid_argument& e) {
    print_error("invalid_argument", e.what());
    return 1;
  } catch (const std::exception& e) {
    print_error("runtime_error", e.what());
    return 1;
  }
}
