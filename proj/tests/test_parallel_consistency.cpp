#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <omp.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <vector>

#include "doctest.h"
#include "qwloc/dynamics.hpp"
#include "qwloc/eigensolve.hpp"
#include "qwloc/line.hpp"
#include "qwloc/localization.hpp"

using namespace qwloc;

// Every parallel kernel partitions its output so each element is written by
// one thread with a fixed operation order; the two execution policies must
// agree bit for bit even when threads outnumber cores.

namespace {

LineHamiltonian disordered_chain(int depth, double delta, std::uint64_t seed) {
  const LineHamiltonian clean = reduced_hamiltonian(depth, 1.0);
  return apply_disorder(clean, DisorderSpec{DisorderSpec::Family::cauchy, delta},
                        seed);
}

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

}  // namespace

TEST_CASE("tridiagonal eigensolve is bit-identical across policies") {
  omp_set_num_threads(4);
  const LineHamiltonian h = disordered_chain(400, 0.25, 12);
  const EigenSystem serial = tridiag_eigensolve(h.matrix(), Exec::serial);
  const EigenSystem parallel = tridiag_eigensolve(h.matrix(), Exec::parallel);
  CHECK(serial.dim == parallel.dim);
  CHECK(bits_equal(serial.values, parallel.values));
  CHECK(bits_equal(serial.vectors, parallel.vectors));
}

TEST_CASE("quantum evolution is bit-identical across policies") {
  omp_set_num_threads(4);
  const LineHamiltonian h = disordered_chain(300, 0.2, 21);
  const SpectralDecomposition es = eigendecompose(h, Exec::serial);
  std::vector<double> psi0(static_cast<std::size_t>(h.length()), 0.0);
  psi0[300] = 1.0;
  const std::vector<double> times = {3.7, 12.1};
  const auto a = evolve_quantum(es, psi0, times, Exec::serial);
  const auto b = evolve_quantum(es, psi0, times, Exec::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t ti = 0; ti < a.size(); ++ti) {
    for (std::int64_t j = 0; j < h.length(); ++j) {
      CHECK(a[ti].amplitude[j].real() == b[ti].amplitude[j].real());
      CHECK(a[ti].amplitude[j].imag() == b[ti].amplitude[j].imag());
    }
  }
}

TEST_CASE("classical evolution is bit-identical across policies") {
  omp_set_num_threads(4);
  const ClassicalChain chain = lumped_classical_chain(200, 1.0);
  std::vector<double> p0(static_cast<std::size_t>(chain.length()), 0.0);
  p0[0] = 1.0;
  const std::vector<double> times = {0.5, 4.0};
  const auto a = evolve_classical(chain, p0, times, Exec::serial);
  const auto b = evolve_classical(chain, p0, times, Exec::parallel);
  REQUIRE(a.size() == b.size());
  for (std::size_t ti = 0; ti < a.size(); ++ti) CHECK(bits_equal(a[ti].p, b[ti].p));
}

TEST_CASE("hitting scans are bit-identical across policies") {
  omp_set_num_threads(4);
  const LineHamiltonian h = reduced_hamiltonian(80, 1.0);
  const SpectralDecomposition es = eigendecompose(h, Exec::serial);
  std::vector<double> psi0(static_cast<std::size_t>(h.length()), 0.0);
  psi0[0] = 1.0;
  const std::vector<double> grid = uniform_grid(0.0, 40.0, 0.01);
  const HittingResult a =
      hitting_probability(es, psi0, h.length() - 1, grid, Exec::serial);
  const HittingResult b =
      hitting_probability(es, psi0, h.length() - 1, grid, Exec::parallel);
  CHECK(a.max_probability == b.max_probability);
  CHECK(a.argmax_time == b.argmax_time);
}

TEST_CASE("scaling sweeps are bit-identical across policies") {
  omp_set_num_threads(4);
  const std::vector<double> grid = {0.05, 0.5};
  const ScalingResult a = scaling_exponent(DisorderSpec::Family::gaussian, 1.0,
                                           grid, 1'000'000, 2, 99, Exec::serial);
  const ScalingResult b = scaling_exponent(DisorderSpec::Family::gaussian, 1.0,
                                           grid, 1'000'000, 2, 99, Exec::parallel);
  CHECK(bits_equal(a.length, b.length));
  CHECK(bits_equal(a.std_error, b.std_error));
  CHECK(a.slope == b.slope);
  CHECK(a.intercept == b.intercept);
  CHECK(a.r_squared == b.r_squared);
  CHECK(a.monotone_within_noise == b.monotone_within_noise);
}
