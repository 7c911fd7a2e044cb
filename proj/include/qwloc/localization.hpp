#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qwloc/dynamics.hpp"
#include "qwloc/line.hpp"

namespace qwloc {

// A localization length in sites; band-centre / zero-disorder cases are
// genuinely infinite and carry an explicit flag instead of a sentinel.
struct LocalizationLength {
  bool finite = false;
  double sites = 0.0;  // meaningful only when finite

  static LocalizationLength infinite() { return {false, 0.0}; }
  static LocalizationLength of(double s) { return {true, s}; }
};

// Closed-form inverse localization length for Cauchy on-site disorder of
// half-width delta on the bulk chain (diagonal 3*gamma, hopping
// -sqrt(2)*gamma), evaluated at energy E. Exact for Cauchy; delta = 0
// reduces to the clean chain, infinite inside the band.
LocalizationLength thouless_length(double energy, double gamma, double delta);

// thouless_length at the band centre E = 3*gamma, where it is maximal;
// ~ sqrt(8)*gamma/delta for small delta.
LocalizationLength max_localization_length(double gamma, double delta);
double thouless_asymptote(double gamma, double delta);  // sqrt(8)*gamma/delta

// Energy of the largest length over a uniform scan grid.
double thouless_argmax_energy(double gamma, double delta, double e_lo,
                              double e_hi, double step);

struct LyapunovEstimate {
  double exponent = 0.0;   // 1/localization length, per site
  double std_error = 0.0;  // from 32 batch means
  std::int64_t steps = 0;
};

// Transfer-matrix Lyapunov exponent at fixed energy for the bulk chain with
// the given disorder. Renormalizes every 16 steps (earlier under a 1e100
// magnitude guard, which Cauchy tails can hit). Deterministic in `seed`.
LyapunovEstimate lyapunov_exponent(double energy, double gamma,
                                   const DisorderSpec& spec,
                                   std::int64_t steps, std::uint64_t seed);

struct EnvelopeFit {
  bool reliable = false;
  std::string reason;      // set when unreliable
  std::int64_t center = 0; // peak site
  double length = 0.0;     // sites, mean of the two flank fits
  double prefactor = 0.0;
  double residual = 0.0;   // RMS of log-amplitude residuals
  double energy = 0.0;
};

// Fit log|psi_j| ~ log(A) - |j - j0| / l on both flanks of eigenvector
// `index`, over sites with |amplitude| > 1e-13. States without a decade of
// decay per flank, or peaked within 2l of a chain end, are unreliable.
EnvelopeFit eigenstate_envelope(const SpectralDecomposition& es,
                                std::int64_t index);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LinearFit fit_line(std::span<const double> x, std::span<const double> y);

struct ScalingResult {
  DisorderSpec::Family family;
  std::vector<double> delta;
  std::vector<double> length;     // 1 / mean Lyapunov exponent per delta
  std::vector<double> std_error;  // propagated over seeds
  double slope = 0.0;             // of log(length) vs log(delta)
  double intercept = 0.0;
  double r_squared = 0.0;
  bool monotone_within_noise = true;
};

// Band-centre localization length vs disorder strength with a log-log fit.
// delta_grid must ascend and span at least a decade; steps >= 10^6 per
// Lyapunov run; `seeds` independent runs per grid point (child seeds derived
// from `master_seed`). The (delta, seed) tasks run under `exec`.
ScalingResult scaling_exponent(DisorderSpec::Family family, double gamma,
                               std::span<const double> delta_grid,
                               std::int64_t steps, int seeds,
                               std::uint64_t master_seed,
                               Exec exec = Exec::parallel);

}  // namespace qwloc
