#include "qwloc/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "qwloc/dynamics.hpp"
#include "qwloc/graph.hpp"
#include "qwloc/io.hpp"
#include "qwloc/line.hpp"
#include "qwloc/localization.hpp"
#include "qwloc/rng.hpp"

namespace qwloc {

namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

std::vector<std::string> split_list(std::string_view v) {
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = v.find(',', start);
    out.emplace_back(trim(v.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

double parse_double(std::string_view v, const std::string& key) {
  v = trim(v);
  double x = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::invalid_argument("config: bad number for " + key + ": " + std::string(v));
  return x;
}

template <typename Int>
Int parse_int(std::string_view v, const std::string& key) {
  v = trim(v);
  Int x = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), x);
  if (res.ec != std::errc{} || res.ptr != v.data() + v.size())
    throw std::invalid_argument("config: bad integer for " + key + ": " + std::string(v));
  return x;
}

bool parse_bool(std::string_view v, const std::string& key) {
  v = trim(v);
  if (v == "0" || v == "false") return false;
  if (v == "1" || v == "true") return true;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + std::string(v));
}

template <typename T, typename F>
std::string join_mapped(const std::vector<T>& xs, F f) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ',';
    out += f(xs[i]);
  }
  return out;
}

// ---- output bookkeeping -------------------------------------------------

class Collector {
 public:
  Collector(const ExperimentConfig& cfg, const std::string& manifest_name)
      : dir_(cfg.out), overwrite_(cfg.overwrite), manifest_name_(manifest_name) {
    // Fail fast on the common collision before any computation runs.
    if (!overwrite_ && std::filesystem::exists(dir_ / manifest_name_))
      throw PathCollisionError((dir_ / manifest_name_).string());
    start_ = std::chrono::steady_clock::now();
  }

  void add(const std::string& name, const std::string& body) {
    write_file_checked(dir_ / name, body, overwrite_);
    man_.files.emplace_back(name, hex64(fnv1a64(body)));
  }

  void warn(std::string msg) { man_.warnings.push_back(std::move(msg)); }
  void set_passed(bool p) { man_.passed = p; }

  RunManifest finish(const ExperimentConfig& cfg) {
    man_.experiment = cfg.experiment;
    man_.seed = cfg.seed;
    man_.config_text = cfg.to_text();
    man_.duration_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
            .count();
    man_.manifest_path = dir_ / manifest_name_;
    write_file_checked(man_.manifest_path, man_.json(), overwrite_);
    return man_;
  }

 private:
  std::filesystem::path dir_;
  bool overwrite_;
  std::string manifest_name_;
  RunManifest man_;
  std::chrono::steady_clock::time_point start_;
};

std::vector<double> fig4_default_times(int n, double gamma) {
  // {50,100,...,350} at n = 1000, gamma = 1; scaled for other sizes so the
  // last snapshot still sits short of the far boundary.
  std::vector<double> t(7);
  const double scale = (static_cast<double>(n) / 1000.0) / gamma;
  for (int k = 1; k <= 7; ++k) t[k - 1] = 50.0 * k * scale;
  return t;
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

json manifest_config_json(const std::string& text) {
  json obj = json::object();
  std::istringstream in{text};
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    obj[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return obj;
}

}  // namespace

// ---- ExperimentConfig ----------------------------------------------------

std::string ExperimentConfig::to_text() const {
  std::string s;
  auto kv = [&s](std::string_view k, const std::string& v) {
    s += k;
    s += '=';
    s += v;
    s += '\n';
  };
  kv("experiment", experiment);
  kv("n", std::to_string(n));
  kv("gamma", format_double(gamma));
  kv("family", family);
  kv("families", join_mapped(families, [](const std::string& f) { return f; }));
  kv("deltas", join_mapped(deltas, format_double));
  kv("delta", format_double(delta));
  kv("seed", std::to_string(seed));
  kv("seeds", std::to_string(seeds));
  kv("times", join_mapped(times, format_double));
  kv("grid_dt", format_double(grid_dt));
  kv("horizon", format_double(horizon));
  kv("quantile", format_double(quantile));
  kv("n_list", join_mapped(n_list, [](int v) { return std::to_string(v); }));
  kv("steps", std::to_string(steps));
  kv("e_min", format_double(e_min));
  kv("e_max", format_double(e_max));
  kv("e_step", format_double(e_step));
  kv("out", out);
  kv("overwrite", overwrite ? "1" : "0");
  return s;
}

ExperimentConfig ExperimentConfig::from_text(std::string_view text) {
  ExperimentConfig cfg;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty() || line.front() == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw std::invalid_argument("config: expected key=value, got: " +
                                  std::string(line));
    const std::string key{trim(line.substr(0, eq))};
    const std::string_view val = trim(line.substr(eq + 1));
    if (key == "experiment") cfg.experiment = std::string(val);
    else if (key == "n") cfg.n = parse_int<int>(val, key);
    else if (key == "gamma") cfg.gamma = parse_double(val, key);
    else if (key == "family") cfg.family = std::string(val);
    else if (key == "families") cfg.families = split_list(val);
    else if (key == "deltas") {
      cfg.deltas.clear();
      for (const auto& item : split_list(val))
        cfg.deltas.push_back(parse_double(item, key));
    } else if (key == "delta") cfg.delta = parse_double(val, key);
    else if (key == "seed") cfg.seed = parse_int<std::uint64_t>(val, key);
    else if (key == "seeds") cfg.seeds = parse_int<int>(val, key);
    else if (key == "times") {
      cfg.times.clear();
      for (const auto& item : split_list(val))
        cfg.times.push_back(parse_double(item, key));
    } else if (key == "grid_dt") cfg.grid_dt = parse_double(val, key);
    else if (key == "horizon") cfg.horizon = parse_double(val, key);
    else if (key == "quantile") cfg.quantile = parse_double(val, key);
    else if (key == "n_list") {
      cfg.n_list.clear();
      for (const auto& item : split_list(val))
        cfg.n_list.push_back(parse_int<int>(item, key));
    } else if (key == "steps") cfg.steps = parse_int<std::int64_t>(val, key);
    else if (key == "e_min") cfg.e_min = parse_double(val, key);
    else if (key == "e_max") cfg.e_max = parse_double(val, key);
    else if (key == "e_step") cfg.e_step = parse_double(val, key);
    else if (key == "out") cfg.out = std::string(val);
    else if (key == "overwrite") cfg.overwrite = parse_bool(val, key);
    else throw std::invalid_argument("config: unknown key: " + key);
  }
  return cfg;
}

std::string RunManifest::json() const {
  nlohmann::json j;
  j["experiment"] = experiment;
  j["version"] = kCodeVersion;
  j["seed"] = seed;
  j["config"] = manifest_config_json(config_text);
  j["config_text"] = config_text;
  nlohmann::json files_j = nlohmann::json::array();
  for (const auto& [name, sum] : files)
    files_j.push_back({{"name", name}, {"fnv1a64", sum}});
  j["files"] = files_j;
  j["warnings"] = warnings;
  j["duration_seconds"] = duration_seconds;
  j["passed"] = passed;
  return j.dump(2) + "\n";
}

// ---- fig4 ------------------------------------------------------------------

RunManifest run_fig4(const ExperimentConfig& cfg0) {
  ExperimentConfig cfg = cfg0;
  cfg.experiment = "fig4";
  if (cfg.deltas.empty()) cfg.deltas = {0.0, 0.03, 0.06};
  if (cfg.times.empty()) cfg.times = fig4_default_times(cfg.n, cfg.gamma);
  if (cfg.seeds == 0) cfg.seeds = 1;
  require(cfg.n >= 1 && 2 * static_cast<std::int64_t>(cfg.n) + 1 <= kMaxEigenDim,
          "fig4: n out of range");
  require(cfg.gamma > 0.0, "fig4: gamma must be positive");
  require(cfg.quantile > 0.0 && cfg.quantile < 1.0,
          "fig4: quantile must be in (0,1)");
  require(cfg.seeds >= 1, "fig4: seeds must be >= 1");
  for (double d : cfg.deltas) require(d >= 0.0, "fig4: deltas must be >= 0");
  for (double t : cfg.times)
    require(std::isfinite(t) && t >= 0.0, "fig4: times must be >= 0");
  const DisorderSpec::Family fam = family_from_name(cfg.family);

  Collector col(cfg, "fig4_manifest.json");

  const LineHamiltonian clean = reduced_hamiltonian(cfg.n, cfg.gamma);
  std::vector<double> start(static_cast<std::size_t>(clean.length()), 0.0);
  start[0] = 1.0;

  std::string extent_csv;
  extent_csv += "# fig4 packet extents v1\n";
  extent_csv += "# quantile=" + format_double(cfg.quantile) + " n=" +
                std::to_string(cfg.n) + " gamma=" + format_double(cfg.gamma) +
                " family=" + cfg.family + "\n";
  extent_csv += "family,delta,rep,time,extent\n";

  for (std::size_t di = 0; di < cfg.deltas.size(); ++di) {
    const double delta = cfg.deltas[di];
    const int reps = delta == 0.0 ? 1 : cfg.seeds;
    for (int rep = 0; rep < reps; ++rep) {
      const std::uint64_t child =
          child_seed(cfg.seed, static_cast<std::uint64_t>(di),
                     static_cast<std::uint64_t>(rep));
      const LineHamiltonian h =
          delta == 0.0 ? clean : apply_disorder(clean, {fam, delta}, child);
      const SpectralDecomposition es = eigendecompose(h);
      const std::vector<EvolvedState> states =
          evolve_quantum(es, std::span<const double>(start), cfg.times);

      std::string prof;
      prof += "# fig4 probability profiles v1 (columns 0..n-1)\n";
      prof += "# n=" + std::to_string(cfg.n) + " gamma=" + format_double(cfg.gamma) +
              " family=" + cfg.family + " delta=" + format_double(delta) +
              " child_seed=" + std::to_string(child) + "\n";
      prof += "time,column,probability\n";
      for (const EvolvedState& st : states) {
        const ProbabilityProfile pr = st.profile();
        const std::string ts = format_double(st.time);
        for (int j = 0; j < cfg.n; ++j) {
          prof += ts;
          prof += ',';
          prof += std::to_string(j);
          prof += ',';
          prof += format_double(std::max(0.0, pr.p[j]));  // clip rounding dust
          prof += '\n';
        }
        const std::int64_t ext = packet_extent(pr, cfg.quantile);
        extent_csv += cfg.family + "," + format_double(delta) + "," +
                      std::to_string(rep) + "," + ts + "," +
                      std::to_string(ext) + "\n";
      }
      col.add("fig4_profiles_d" + std::to_string(di) + "_r" +
                  std::to_string(rep) + ".csv",
              prof);

      if (delta > 0.0) {
        std::string dis;
        dis += "# fig4 disorder realization v1\n";
        dis += "# family=" + cfg.family + " delta=" + format_double(delta) +
               " child_seed=" + std::to_string(child) + "\n";
        dis += "site,epsilon\n";
        const std::vector<double>& eps = h.epsilon();
        for (std::size_t j = 0; j < eps.size(); ++j)
          dis += std::to_string(j) + "," + format_double(eps[j]) + "\n";
        col.add("fig4_disorder_d" + std::to_string(di) + "_r" +
                    std::to_string(rep) + ".csv",
                dis);
      }
    }
  }
  col.add("fig4_extent.csv", extent_csv);
  return col.finish(cfg);
}

// ---- scaling ----------------------------------------------------------------

RunManifest run_scaling(const ExperimentConfig& cfg0) {
  ExperimentConfig cfg = cfg0;
  cfg.experiment = "scaling";
  if (cfg.families.empty()) cfg.families = {"cauchy", "gaussian", "uniform"};
  if (cfg.deltas.empty()) {
    cfg.deltas.resize(8);
    for (int i = 0; i < 8; ++i)
      cfg.deltas[i] = 0.01 * std::pow(10.0, static_cast<double>(i) / 7.0);
  }
  if (cfg.steps == 0) cfg.steps = 4000000;
  if (cfg.seeds == 0) cfg.seeds = 12;
  require(cfg.gamma > 0.0, "scaling: gamma must be positive");
  require(cfg.seeds >= 1, "scaling: seeds must be >= 1");

  Collector col(cfg, "scaling_manifest.json");

  std::string csv;
  csv += "# scaling localization lengths v1\n";
  csv += "# gamma=" + format_double(cfg.gamma) + " steps=" +
         std::to_string(cfg.steps) + " seeds=" + std::to_string(cfg.seeds) +
         "\n";
  csv += "family,delta,length,std_error,cauchy_reference\n";

  json fits = json::array();
  for (std::size_t fi = 0; fi < cfg.families.size(); ++fi) {
    const DisorderSpec::Family fam = family_from_name(cfg.families[fi]);
    const std::uint64_t master =
        child_seed(cfg.seed, 1000 + static_cast<std::uint64_t>(fi), 0);
    const ScalingResult sr = scaling_exponent(fam, cfg.gamma, cfg.deltas,
                                              cfg.steps, cfg.seeds, master);
    for (std::size_t i = 0; i < sr.delta.size(); ++i) {
      const LocalizationLength ref =
          max_localization_length(cfg.gamma, sr.delta[i]);
      csv += cfg.families[fi] + "," + format_double(sr.delta[i]) + "," +
             format_double(sr.length[i]) + "," + format_double(sr.std_error[i]) +
             "," + (ref.finite ? format_double(ref.sites) : "inf") + "\n";
    }
    fits.push_back({{"family", cfg.families[fi]},
                    {"slope", sr.slope},
                    {"intercept", sr.intercept},
                    {"r_squared", sr.r_squared},
                    {"monotone_within_noise", sr.monotone_within_noise}});
    if (!sr.monotone_within_noise)
      col.warn("length vs delta not monotone beyond noise for family " +
               cfg.families[fi]);
  }
  col.add("scaling_lengths.csv", csv);

  json fitdoc;
  fitdoc["experiment"] = "scaling";
  fitdoc["gamma"] = cfg.gamma;
  fitdoc["steps"] = cfg.steps;
  fitdoc["seeds"] = cfg.seeds;
  fitdoc["fits"] = fits;
  col.add("scaling_fit.json", fitdoc.dump(2) + "\n");
  return col.finish(cfg);
}

// ---- hitting ------------------------------------------------------------------

RunManifest run_hitting(const ExperimentConfig& cfg0) {
  ExperimentConfig cfg = cfg0;
  cfg.experiment = "hitting";
  if (cfg.n_list.empty()) cfg.n_list = {20, 30, 40, 50, 60};
  if (cfg.delta < 0.0) cfg.delta = 0.2;
  if (cfg.seeds == 0) cfg.seeds = 10;
  require(cfg.gamma > 0.0, "hitting: gamma must be positive");
  require(cfg.delta >= 0.0, "hitting: delta must be >= 0");
  for (int n : cfg.n_list)
    require(n >= 1 && 2 * static_cast<std::int64_t>(n) + 1 <= kMaxEigenDim,
            "hitting: n out of range");
  const DisorderSpec::Family fam = family_from_name(cfg.family);
  const double dt = cfg.grid_dt > 0.0 ? cfg.grid_dt : 0.1 / cfg.gamma;

  Collector col(cfg, "hitting_manifest.json");

  std::string csv;
  csv += "# hitting peaks v1\n";
  csv += "# gamma=" + format_double(cfg.gamma) + " family=" + cfg.family +
         " delta=" + format_double(cfg.delta) + " grid_dt=" + format_double(dt) +
         "\n";
  csv += "n,rep,max_probability,argmax_time\n";

  std::vector<double> xs;
  std::vector<double> ys;
  json medians = json::array();
  for (int n : cfg.n_list) {
    const double horizon =
        cfg.horizon > 0.0 ? cfg.horizon : 4.0 * static_cast<double>(n) / cfg.gamma;
    // Ballistic crossing takes ~ 2n / (2*sqrt(2)*gamma); warn if the grid
    // cannot even contain one crossing.
    if (horizon < static_cast<double>(n) / (std::numbers::sqrt2 * cfg.gamma))
      col.warn("horizon " + format_double(horizon) +
               " is shorter than the ballistic crossing time for n=" +
               std::to_string(n));
    const std::vector<double> grid = uniform_grid(0.0, horizon, dt);
    const LineHamiltonian clean = reduced_hamiltonian(n, cfg.gamma);
    std::vector<double> start(static_cast<std::size_t>(clean.length()), 0.0);
    start[0] = 1.0;
    std::vector<double> peaks;
    for (int rep = 0; rep < cfg.seeds; ++rep) {
      const std::uint64_t child =
          child_seed(cfg.seed, static_cast<std::uint64_t>(n),
                     static_cast<std::uint64_t>(rep));
      const LineHamiltonian h =
          cfg.delta == 0.0 ? clean
                           : apply_disorder(clean, {fam, cfg.delta}, child);
      const SpectralDecomposition es = eigendecompose(h);
      const HittingResult hit = hitting_probability(
          es, std::span<const double>(start), clean.length() - 1, grid);
      peaks.push_back(hit.max_probability);
      csv += std::to_string(n) + "," + std::to_string(rep) + "," +
             format_double(hit.max_probability) + "," +
             format_double(hit.argmax_time) + "\n";
    }
    const double med = median_of(peaks);
    medians.push_back({{"n", n}, {"median_peak", med}});
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(med));
  }
  col.add("hitting_peaks.csv", csv);

  json fitdoc;
  fitdoc["experiment"] = "hitting";
  fitdoc["delta"] = cfg.delta;
  fitdoc["family"] = cfg.family;
  fitdoc["medians"] = medians;
  if (xs.size() >= 2) {
    const LinearFit fit = fit_line(xs, ys);
    fitdoc["log_median_slope"] = fit.slope;
    fitdoc["log_median_intercept"] = fit.intercept;
    fitdoc["r_squared"] = fit.r_squared;
    fitdoc["suppression_ratio_last_over_first"] =
        std::exp(ys.back() - ys.front());
  }
  col.add("hitting_fit.json", fitdoc.dump(2) + "\n");
  return col.finish(cfg);
}

// ---- crosscheck ------------------------------------------------------------

RunManifest run_crosscheck(const ExperimentConfig& cfg0) {
  ExperimentConfig cfg = cfg0;
  cfg.experiment = "crosscheck";
  if (cfg.times.empty()) cfg.times = {1.0, 3.0, 10.0};
  require(cfg.n >= 1 && cfg.n <= kMaxDenseDepth,
          "crosscheck: n must be in [1, " + std::to_string(kMaxDenseDepth) + "]");
  require(cfg.gamma > 0.0, "crosscheck: gamma must be positive");
  for (double t : cfg.times)
    require(std::isfinite(t) && t >= 0.0, "crosscheck: times must be >= 0");

  Collector col(cfg, "crosscheck_manifest.json");

  const GluedTreeGraph g = build_glued_tree(cfg.n);
  const int cols = g.num_columns();

  // 1. The column subspace is closed under the full Hamiltonian.
  const double closure = verify_subspace_closure(g, cfg.gamma);

  // 2. Compression reproduces the reduced chain entrywise.
  const std::vector<double> comp = compressed_hamiltonian(g, cfg.gamma);
  const LineHamiltonian line = reduced_hamiltonian(cfg.n, cfg.gamma);
  const SymTridiag tri = line.matrix();
  double comp_dev = 0.0;
  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j < cols; ++j) {
      double expect = 0.0;
      if (i == j) expect = tri.diag[i];
      else if (std::abs(i - j) == 1) expect = tri.off[std::min(i, j)];
      comp_dev = std::max(comp_dev,
                          std::abs(comp[static_cast<std::size_t>(i) * cols + j] -
                                   expect));
    }
  }

  // 3. Reduced quantum dynamics against the dense full-graph walk.
  const DenseGenerator hfull = quantum_hamiltonian_full(g, cfg.gamma);
  std::vector<std::complex<double>> psi0(static_cast<std::size_t>(g.num_vertices()),
                                         0.0);
  psi0[0] = 1.0;
  const auto full_states = quantum_evolve_full(hfull, psi0, cfg.times);
  const SpectralDecomposition es = eigendecompose(line, Exec::serial);
  std::vector<double> start(static_cast<std::size_t>(cols), 0.0);
  start[0] = 1.0;
  const auto line_states =
      evolve_quantum(es, std::span<const double>(start), cfg.times);
  double qdev = 0.0;
  for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
    const std::vector<double> colp = column_prob_sums(g, full_states[ti]);
    const ProbabilityProfile pr = line_states[ti].profile();
    for (int j = 0; j < cols; ++j)
      qdev = std::max(qdev, std::abs(colp[j] - pr.p[j]));
  }

  // 4. Lumped classical chain against the dense full-graph relaxation.
  const DenseGenerator mfull = classical_generator(g, cfg.gamma);
  std::vector<double> p0(static_cast<std::size_t>(g.num_vertices()), 0.0);
  p0[0] = 1.0;
  const auto full_ps = classical_evolve_full(mfull, p0, cfg.times);
  const ClassicalChain chain = lumped_classical_chain(cfg.n, cfg.gamma);
  std::vector<double> p0c(static_cast<std::size_t>(cols), 0.0);
  p0c[0] = 1.0;
  const auto lumped = evolve_classical(chain, p0c, cfg.times, Exec::serial);
  double cdev = 0.0;
  for (std::size_t ti = 0; ti < cfg.times.size(); ++ti) {
    const std::vector<double> colp = column_sums(g, full_ps[ti]);
    for (int j = 0; j < cols; ++j)
      cdev = std::max(cdev, std::abs(colp[j] - lumped[ti].p[j]));
  }

  constexpr double kClosureTol = 1e-10;
  constexpr double kCompTol = 1e-12;
  constexpr double kQuantumTol = 1e-8;
  constexpr double kClassicalTol = 1e-8;
  const bool pass = closure <= kClosureTol && comp_dev <= kCompTol &&
                    qdev <= kQuantumTol && cdev <= kClassicalTol;

  json rep;
  rep["experiment"] = "crosscheck";
  rep["n"] = cfg.n;
  rep["gamma"] = cfg.gamma;
  rep["times"] = cfg.times;
  rep["closure_residual"] = closure;
  rep["compression_max_dev"] = comp_dev;
  rep["quantum_max_dev"] = qdev;
  rep["classical_max_dev"] = cdev;
  rep["thresholds"] = {{"closure", kClosureTol},
                       {"compression", kCompTol},
                       {"quantum", kQuantumTol},
                       {"classical", kClassicalTol}};
  rep["pass"] = {{"closure", closure <= kClosureTol},
                 {"compression", comp_dev <= kCompTol},
                 {"quantum", qdev <= kQuantumTol},
                 {"classical", cdev <= kClassicalTol}};
  rep["overall_pass"] = pass;
  col.add("crosscheck_report.json", rep.dump(2) + "\n");
  col.set_passed(pass);
  return col.finish(cfg);
}

// ---- thouless ----------------------------------------------------------------

RunManifest run_thouless(const ExperimentConfig& cfg0) {
  ExperimentConfig cfg = cfg0;
  cfg.experiment = "thouless";
  if (cfg.delta < 0.0) cfg.delta = 0.03;
  require(cfg.gamma > 0.0, "thouless: gamma must be positive");
  require(cfg.delta >= 0.0, "thouless: delta must be >= 0");
  if (cfg.e_step <= 0.0) {
    cfg.e_min = -3.0 * cfg.gamma;
    cfg.e_max = 9.0 * cfg.gamma;
    cfg.e_step = 0.01 * cfg.gamma;
  }
  require(cfg.e_max >= cfg.e_min, "thouless: e_max must be >= e_min");

  Collector col(cfg, "thouless_manifest.json");

  std::string csv;
  csv += "# thouless curve v1\n";
  csv += "# gamma=" + format_double(cfg.gamma) + " delta=" +
         format_double(cfg.delta) + "\n";
  csv += "energy,inverse_length,length\n";
  for (double e = cfg.e_min; e <= cfg.e_max + 0.5 * cfg.e_step; e += cfg.e_step) {
    const LocalizationLength l = thouless_length(e, cfg.gamma, cfg.delta);
    csv += format_double(e) + ",";
    if (l.finite)
      csv += format_double(1.0 / l.sites) + "," + format_double(l.sites);
    else
      csv += "0,inf";
    csv += "\n";
  }
  col.add("thouless_curve.csv", csv);

  const LocalizationLength lmax = max_localization_length(cfg.gamma, cfg.delta);
  json sum;
  sum["experiment"] = "thouless";
  sum["gamma"] = cfg.gamma;
  sum["delta"] = cfg.delta;
  sum["band_center_energy"] = 3.0 * cfg.gamma;
  sum["max_length_finite"] = lmax.finite;
  if (lmax.finite) sum["max_length_sites"] = lmax.sites;
  if (cfg.delta > 0.0)
    sum["asymptote_sites"] = thouless_asymptote(cfg.gamma, cfg.delta);
  sum["argmax_energy"] =
      thouless_argmax_energy(cfg.gamma, cfg.delta, cfg.e_min, cfg.e_max, cfg.e_step);
  col.add("thouless_summary.json", sum.dump(2) + "\n");
  return col.finish(cfg);
}

}  // namespace qwloc
