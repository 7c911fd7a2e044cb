// Serial vs OpenMP timings for the hot kernels, verifying on the way that
// both execution policies produce identical bits.

#include <omp.h>

#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include "qwloc/dynamics.hpp"
#include "qwloc/eigensolve.hpp"
#include "qwloc/line.hpp"
#include "qwloc/localization.hpp"

using namespace qwloc;

namespace {

double now() { return omp_get_wtime(); }

bool bits_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() &&
         std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

struct Row {
  const char* name;
  double t_serial;
  double t_parallel;
  bool identical;
};

void print(const Row& r) {
  std::printf("%-28s %10.3fs %10.3fs %8.2fx   %s\n", r.name, r.t_serial,
              r.t_parallel, r.t_serial / r.t_parallel,
              r.identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int depth = 600;  // chain length 2*depth+1
  long long steps = 4000000;
  for (int i = 1; i + 1 < argc; i += 2) {
    const std::string k = argv[i];
    if (k == "--n") depth = std::atoi(argv[i + 1]);
    else if (k == "--steps") steps = std::atoll(argv[i + 1]);
    else if (k == "--threads") omp_set_num_threads(std::atoi(argv[i + 1]));
  }
  std::printf("depth n=%d (chain length %d), threads=%d\n", depth,
              2 * depth + 1, omp_get_max_threads());
  std::printf("%-28s %11s %11s %9s\n", "kernel", "serial", "parallel",
              "speedup");

  const LineHamiltonian clean = reduced_hamiltonian(depth, 1.0);
  const LineHamiltonian h =
      apply_disorder(clean, {DisorderSpec::Family::cauchy, 0.06}, 42);

  // Eigensolve: rotation application dominates.
  double t0 = now();
  const EigenSystem es_s = tridiag_eigensolve(h.matrix(), Exec::serial);
  double t1 = now();
  const EigenSystem es_p = tridiag_eigensolve(h.matrix(), Exec::parallel);
  double t2 = now();
  print({"tridiag eigensolve", t1 - t0, t2 - t1,
         bits_equal(es_s.values, es_p.values) &&
             bits_equal(es_s.vectors, es_p.vectors)});

  // Multi-time spectral synthesis.
  std::vector<double> start(static_cast<std::size_t>(h.length()), 0.0);
  start[0] = 1.0;
  std::vector<double> times;
  for (int k = 1; k <= 14; ++k) times.push_back(5.0 * k);
  t0 = now();
  const auto st_s = evolve_quantum(es_s, std::span<const double>(start), times,
                                   Exec::serial);
  t1 = now();
  const auto st_p = evolve_quantum(es_s, std::span<const double>(start), times,
                                   Exec::parallel);
  t2 = now();
  bool same = true;
  for (std::size_t i = 0; i < st_s.size(); ++i)
    same = same && std::memcmp(st_s[i].amplitude.data(), st_p[i].amplitude.data(),
                               st_s[i].amplitude.size() *
                                   sizeof(std::complex<double>)) == 0;
  print({"quantum evolve (14 times)", t1 - t0, t2 - t1, same});

  // Hitting-probability time scan.
  const auto grid = uniform_grid(0.0, 400.0, 0.05);
  t0 = now();
  const HittingResult hit_s = hitting_probability(
      es_s, std::span<const double>(start), h.length() - 1, grid, Exec::serial);
  t1 = now();
  const HittingResult hit_p = hitting_probability(
      es_s, std::span<const double>(start), h.length() - 1, grid, Exec::parallel);
  t2 = now();
  print({"hitting scan (8001 pts)", t1 - t0, t2 - t1,
         hit_s.max_probability == hit_p.max_probability &&
             hit_s.argmax_time == hit_p.argmax_time});

  // Lyapunov sweep over (delta, seed) tasks.
  std::vector<double> deltas = {0.01, 0.02, 0.05, 0.1};
  t0 = now();
  const ScalingResult sc_s =
      scaling_exponent(DisorderSpec::Family::gaussian, 1.0, deltas, steps, 2,
                       99, Exec::serial);
  t1 = now();
  const ScalingResult sc_p =
      scaling_exponent(DisorderSpec::Family::gaussian, 1.0, deltas, steps, 2,
                       99, Exec::parallel);
  t2 = now();
  print({"lyapunov sweep (8 tasks)", t1 - t0, t2 - t1,
         bits_equal(sc_s.length, sc_p.length) && sc_s.slope == sc_p.slope});

  return 0;
}
