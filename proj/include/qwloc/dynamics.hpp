#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "qwloc/eigensolve.hpp"
#include "qwloc/line.hpp"

namespace qwloc {

// The eigendecomposition reused across evolution calls.
using SpectralDecomposition = EigenSystem;

SpectralDecomposition eigendecompose(const LineHamiltonian& h,
                                     Exec exec = Exec::parallel);

enum class ProfileKind { quantum, classical };

struct ProbabilityProfile {
  double time = 0.0;
  ProfileKind kind = ProfileKind::quantum;
  std::vector<double> p;  // per column
};

struct EvolvedState {
  double time = 0.0;
  std::vector<std::complex<double>> amplitude;

  ProbabilityProfile profile() const;
};

// exp(-iHt) applied via the spectral decomposition, one output per entry of
// `times` (negative times run the reversed evolution). The initial state
// must be normalized to 1e-9.
std::vector<EvolvedState> evolve_quantum(const SpectralDecomposition& es,
                                         std::span<const std::complex<double>> initial,
                                         std::span<const double> times,
                                         Exec exec = Exec::parallel);
std::vector<EvolvedState> evolve_quantum(const SpectralDecomposition& es,
                                         std::span<const double> initial,
                                         std::span<const double> times,
                                         Exec exec = Exec::parallel);

// exp(-Mt) for the lumped chain via uniformization (a Poisson-weighted sum
// of powers of a column-stochastic matrix). Every term is nonnegative, so
// probability is conserved to rounding at any supported depth.
std::vector<ProbabilityProfile> evolve_classical(const ClassicalChain& chain,
                                                 std::span<const double> p0,
                                                 std::span<const double> times,
                                                 Exec exec = Exec::parallel);

// Cost guard for the chain size; the evolution itself is stable at any depth.
inline constexpr int kMaxClassicalDepth = 2000;

// Smallest column index c with sum_{j<=c} p_j >= quantile.
std::int64_t packet_extent(const ProbabilityProfile& profile, double quantile);

struct HittingResult {
  double max_probability = 0.0;
  double argmax_time = 0.0;
};

// max over the time grid of |<target|psi(t)>|^2, with the earliest argmax.
HittingResult hitting_probability(const SpectralDecomposition& es,
                                  std::span<const double> initial,
                                  std::int64_t target,
                                  std::span<const double> time_grid,
                                  Exec exec = Exec::parallel);

std::vector<double> uniform_grid(double t0, double t1, double dt);

// <psi|H|psi> for a chain state (real because H is symmetric).
double energy_expectation(const LineHamiltonian& h,
                          std::span<const std::complex<double>> psi);

}  // namespace qwloc
