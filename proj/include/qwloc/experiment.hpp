#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qwloc {

inline constexpr const char* kCodeVersion = "1.0.0";

// Flat key=value configuration shared by all experiment runners. Lists are
// comma-separated. The text form round-trips losslessly; doubles are
// printed with shortest round-trip precision.
struct ExperimentConfig {
  std::string experiment;
  int n = 1000;
  double gamma = 1.0;
  std::string family = "cauchy";
  std::vector<std::string> families;  // scaling: which families to sweep
  std::vector<double> deltas;         // fig4 / scaling grids
  double delta = -1.0;                // hitting / thouless strength; -1 = default
  std::uint64_t seed = 1;
  int seeds = 0;                      // repetitions per grid point; 0 = default
  std::vector<double> times;          // empty = experiment default
  double grid_dt = 0.0;               // 0 = default 0.1/gamma
  double horizon = 0.0;               // hitting: 0 = default 4n/gamma
  double quantile = 0.99;
  std::vector<int> n_list;            // hitting sizes
  std::int64_t steps = 0;             // Lyapunov steps; 0 = default
  double e_min = 0.0;                 // thouless energy grid; 0s = default
  double e_max = 0.0;
  double e_step = 0.0;
  std::string out = "out";
  bool overwrite = false;

  std::string to_text() const;
  static ExperimentConfig from_text(std::string_view text);

  bool operator==(const ExperimentConfig&) const = default;
};

struct RunManifest {
  std::string experiment;
  std::string config_text;  // resolved configuration, canonical form
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, std::string>> files;  // name, fnv1a-64
  std::vector<std::string> warnings;
  double duration_seconds = 0.0;
  bool passed = true;  // crosscheck only; true elsewhere
  std::filesystem::path manifest_path;

  std::string json() const;
};

// Wave-packet spreading under increasing disorder (profiles + extents).
RunManifest run_fig4(const ExperimentConfig& cfg);
// Band-centre localization length vs disorder strength, log-log fit.
RunManifest run_scaling(const ExperimentConfig& cfg);
// Peak transmission probability to the far root vs tree depth.
RunManifest run_hitting(const ExperimentConfig& cfg);
// Reduced line and lumped chain vs the full-graph oracles.
RunManifest run_crosscheck(const ExperimentConfig& cfg);
// Closed-form localization length tabulated over energy.
RunManifest run_thouless(const ExperimentConfig& cfg);

}  // namespace qwloc
