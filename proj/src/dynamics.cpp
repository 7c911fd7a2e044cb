#include "qwloc/dynamics.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qwloc {

namespace {

struct Range {
  std::int64_t lo;
  std::int64_t hi;
};

Range thread_range(std::int64_t n) {
  const int nt = omp_get_num_threads();
  const int tid = omp_get_thread_num();
  const std::int64_t chunk = (n + nt - 1) / nt;
  const std::int64_t lo = tid * chunk;
  return {std::min(lo, n), std::min(lo + chunk, n)};
}

// out[j] = sum_alpha coeff[alpha] * W[alpha*dim + j] over j in [lo,hi).
// Element-owned accumulation in fixed alpha order: the parallel split over
// j ranges reproduces the serial result bit for bit.
void synthesize(const double* W, std::int64_t dim, const double* coeff,
                double* out, std::int64_t lo, std::int64_t hi) {
  for (std::int64_t j = lo; j < hi; ++j) out[j] = 0.0;
  for (std::int64_t a = 0; a < dim; ++a) {
    const double w = coeff[a];
    const double* __restrict row = W + a * dim;
    double* __restrict o = out;
    for (std::int64_t j = lo; j < hi; ++j) o[j] += w * row[j];
  }
}

void synthesize_exec(const double* W, std::int64_t dim, const double* coeff,
                     double* out, Exec exec) {
  if (exec == Exec::parallel && dim >= 64) {
#pragma omp parallel
    {
      const Range r = thread_range(dim);
      if (r.lo < r.hi) synthesize(W, dim, coeff, out, r.lo, r.hi);
    }
  } else {
    synthesize(W, dim, coeff, out, 0, dim);
  }
}

std::vector<double> analyze(const EigenSystem& es, std::span<const double> x) {
  const std::int64_t n = es.dim;
  std::vector<double> a(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const double* row = es.vectors.data() + k * n;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += row[j] * x[j];
    a[k] = acc;
  }
  return a;
}

// One uniformized hop of the lumped chain: out[i] picks up the stay weight
// plus the arrivals from both neighbours. Element-owned like synthesize, so
// the parallel split reproduces the serial result bit for bit.
void chain_hop(const double* stay, const double* from_left,
               const double* from_right, const double* v, double* out,
               std::int64_t n, std::int64_t lo, std::int64_t hi) {
  for (std::int64_t i = lo; i < hi; ++i) {
    double acc = stay[i] * v[i];
    if (i > 0) acc += from_left[i] * v[i - 1];
    if (i + 1 < n) acc += from_right[i] * v[i + 1];
    out[i] = acc;
  }
}

void chain_hop_exec(const double* stay, const double* from_left,
                    const double* from_right, const double* v, double* out,
                    std::int64_t n, Exec exec) {
  if (exec == Exec::parallel && n >= 64) {
#pragma omp parallel
    {
      const Range r = thread_range(n);
      if (r.lo < r.hi)
        chain_hop(stay, from_left, from_right, v, out, n, r.lo, r.hi);
    }
  } else {
    chain_hop(stay, from_left, from_right, v, out, n, 0, n);
  }
}

void check_times_finite(std::span<const double> times, const char* who) {
  for (double t : times)
    if (!std::isfinite(t))
      throw std::invalid_argument(std::string(who) + ": times must be finite");
}

std::vector<EvolvedState> evolve_quantum_impl(const SpectralDecomposition& es,
                                              std::span<const double> re0,
                                              std::span<const double> im0,
                                              std::span<const double> times,
                                              Exec exec) {
  const std::int64_t n = es.dim;
  check_times_finite(times, "evolve_quantum");
  double norm = 0.0;
  for (std::int64_t j = 0; j < n; ++j)
    norm += re0[j] * re0[j] + (im0.empty() ? 0.0 : im0[j] * im0[j]);
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("evolve_quantum: initial state not normalized");

  const std::vector<double> ar = analyze(es, re0);
  std::vector<double> ai;
  if (!im0.empty()) ai = analyze(es, im0);

  std::vector<EvolvedState> out(times.size());
  std::vector<double> cr(static_cast<std::size_t>(n));
  std::vector<double> ci(static_cast<std::size_t>(n));
  std::vector<double> outr(static_cast<std::size_t>(n));
  std::vector<double> outi(static_cast<std::size_t>(n));
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const double t = times[ti];
    for (std::int64_t k = 0; k < n; ++k) {
      const double ph = -es.values[k] * t;
      const double c = std::cos(ph);
      const double s = std::sin(ph);
      const double xr = ar[k];
      const double xi = ai.empty() ? 0.0 : ai[k];
      cr[k] = xr * c - xi * s;
      ci[k] = xr * s + xi * c;
    }
    synthesize_exec(es.vectors.data(), n, cr.data(), outr.data(), exec);
    synthesize_exec(es.vectors.data(), n, ci.data(), outi.data(), exec);
    EvolvedState st;
    st.time = t;
    st.amplitude.resize(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j)
      st.amplitude[j] = {outr[j], outi[j]};
    out[ti] = std::move(st);
  }
  return out;
}

}  // namespace

SpectralDecomposition eigendecompose(const LineHamiltonian& h, Exec exec) {
  return tridiag_eigensolve(h.matrix(), exec);
}

ProbabilityProfile EvolvedState::profile() const {
  ProbabilityProfile pr;
  pr.time = time;
  pr.kind = ProfileKind::quantum;
  pr.p.resize(amplitude.size());
  for (std::size_t j = 0; j < amplitude.size(); ++j)
    pr.p[j] = std::norm(amplitude[j]);
  return pr;
}

std::vector<EvolvedState> evolve_quantum(const SpectralDecomposition& es,
                                         std::span<const std::complex<double>> initial,
                                         std::span<const double> times,
                                         Exec exec) {
  if (static_cast<std::int64_t>(initial.size()) != es.dim)
    throw std::invalid_argument("evolve_quantum: dimension mismatch");
  std::vector<double> re(initial.size());
  std::vector<double> im(initial.size());
  for (std::size_t j = 0; j < initial.size(); ++j) {
    re[j] = initial[j].real();
    im[j] = initial[j].imag();
  }
  return evolve_quantum_impl(es, re, im, times, exec);
}

std::vector<EvolvedState> evolve_quantum(const SpectralDecomposition& es,
                                         std::span<const double> initial,
                                         std::span<const double> times,
                                         Exec exec) {
  if (static_cast<std::int64_t>(initial.size()) != es.dim)
    throw std::invalid_argument("evolve_quantum: dimension mismatch");
  return evolve_quantum_impl(es, initial, {}, times, exec);
}

std::vector<ProbabilityProfile> evolve_classical(const ClassicalChain& chain,
                                                 std::span<const double> p0,
                                                 std::span<const double> times,
                                                 Exec exec) {
  const std::int64_t n = chain.length();
  if (chain.depth() > kMaxClassicalDepth)
    throw std::invalid_argument("evolve_classical: depth exceeds supported cap");
  if (static_cast<std::int64_t>(p0.size()) != n)
    throw std::invalid_argument("evolve_classical: dimension mismatch");
  check_times_finite(times, "evolve_classical");
  for (double t : times)
    if (t < 0.0)
      throw std::invalid_argument("evolve_classical: times must be >= 0");
  double sum = 0.0;
  for (double v : p0) {
    if (v < -1e-12)
      throw std::invalid_argument("evolve_classical: negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("evolve_classical: probabilities must sum to 1");

  // Uniformization: exp(-Mt) = sum_k Poisson(k; Lambda t) P^k with
  // P = I - M / Lambda and Lambda the largest total exit rate. Every term
  // is nonnegative and P is column-stochastic, so there is no cancellation
  // and the total mass survives to rounding at any depth. (A similarity
  // transform by the stationary weights is exact in real arithmetic but
  // amplifies eigenbasis roundoff by the weight spread, which grows like
  // 2^(depth/2).)
  double lambda = 0.0;
  for (std::int64_t j = 0; j < n; ++j)
    lambda = std::max(lambda, chain.rate_left(j) + chain.rate_right(j));

  std::vector<double> stay(static_cast<std::size_t>(n), 1.0);
  std::vector<double> from_left(static_cast<std::size_t>(n), 0.0);
  std::vector<double> from_right(static_cast<std::size_t>(n), 0.0);
  if (lambda > 0.0) {
    for (std::int64_t i = 0; i < n; ++i) {
      stay[i] = 1.0 - (chain.rate_left(i) + chain.rate_right(i)) / lambda;
      if (i > 0) from_left[i] = chain.rate_right(i - 1) / lambda;
      if (i + 1 < n) from_right[i] = chain.rate_left(i + 1) / lambda;
    }
  }

  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });

  std::vector<double> state(p0.begin(), p0.end());
  std::vector<double> acc(static_cast<std::size_t>(n));
  std::vector<double> cur(static_cast<std::size_t>(n));
  std::vector<double> nxt(static_cast<std::size_t>(n));
  std::vector<ProbabilityProfile> out(times.size());
  double t_now = 0.0;
  for (std::size_t idx : order) {
    double remaining = times[idx] - t_now;
    while (lambda > 0.0 && remaining > 0.0) {
      // Cap the Poisson mean per substep so the leading weight e^-mu stays
      // far from underflow and the term count stays short.
      const double step = std::min(remaining, 32.0 / lambda);
      const double mu = lambda * step;
      double coeff = std::exp(-mu);
      double weight_sum = coeff;
      cur = state;
      for (std::int64_t i = 0; i < n; ++i) acc[i] = coeff * cur[i];
      const int k_max =
          static_cast<int>(mu + 14.0 * std::sqrt(mu + 1.0) + 32.0);
      for (int k = 1; k <= k_max && weight_sum < 1.0 - 1e-15; ++k) {
        chain_hop_exec(stay.data(), from_left.data(), from_right.data(),
                       cur.data(), nxt.data(), n, exec);
        cur.swap(nxt);
        coeff *= mu / static_cast<double>(k);
        weight_sum += coeff;
        for (std::int64_t i = 0; i < n; ++i) acc[i] += coeff * cur[i];
      }
      state = acc;
      remaining -= step;
    }
    t_now = times[idx];
    ProbabilityProfile pr;
    pr.time = t_now;
    pr.kind = ProfileKind::classical;
    pr.p = state;
    out[idx] = std::move(pr);
  }
  return out;
}

std::int64_t packet_extent(const ProbabilityProfile& profile, double quantile) {
  if (!(quantile > 0.0 && quantile < 1.0))
    throw std::invalid_argument("packet_extent: quantile must be in (0,1)");
  if (profile.p.empty())
    throw std::invalid_argument("packet_extent: empty profile");
  double acc = 0.0;
  const std::int64_t n = static_cast<std::int64_t>(profile.p.size());
  for (std::int64_t j = 0; j < n; ++j) {
    acc += profile.p[j];
    if (acc >= quantile) return j;
  }
  return n - 1;
}

HittingResult hitting_probability(const SpectralDecomposition& es,
                                  std::span<const double> initial,
                                  std::int64_t target,
                                  std::span<const double> time_grid,
                                  Exec exec) {
  const std::int64_t n = es.dim;
  if (static_cast<std::int64_t>(initial.size()) != n)
    throw std::invalid_argument("hitting_probability: dimension mismatch");
  if (target < 0 || target >= n)
    throw std::invalid_argument("hitting_probability: target out of range");
  if (time_grid.empty())
    throw std::invalid_argument("hitting_probability: empty time grid");
  check_times_finite(time_grid, "hitting_probability");
  double norm = 0.0;
  for (double v : initial) norm += v * v;
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("hitting_probability: initial state not normalized");

  // w_k = <target|k><k|initial>: the scan only needs these weights.
  std::vector<double> w(static_cast<std::size_t>(n));
  const std::vector<double> a = analyze(es, initial);
  for (std::int64_t k = 0; k < n; ++k)
    w[k] = a[k] * es.vectors[k * n + target];

  const std::int64_t g = static_cast<std::int64_t>(time_grid.size());
  std::vector<double> prob(static_cast<std::size_t>(g));
  auto scan = [&](std::int64_t lo, std::int64_t hi) {
    for (std::int64_t i = lo; i < hi; ++i) {
      const double t = time_grid[i];
      double re = 0.0;
      double im = 0.0;
      for (std::int64_t k = 0; k < n; ++k) {
        const double ph = -es.values[k] * t;
        re += w[k] * std::cos(ph);
        im += w[k] * std::sin(ph);
      }
      prob[i] = re * re + im * im;
    }
  };
  if (exec == Exec::parallel && g >= 16) {
#pragma omp parallel
    {
      const Range r = thread_range(g);
      if (r.lo < r.hi) scan(r.lo, r.hi);
    }
  } else {
    scan(0, g);
  }

  HittingResult res;
  res.max_probability = prob[0];
  res.argmax_time = time_grid[0];
  for (std::int64_t i = 1; i < g; ++i) {
    if (prob[i] > res.max_probability) {
      res.max_probability = prob[i];
      res.argmax_time = time_grid[i];
    }
  }
  return res;
}

std::vector<double> uniform_grid(double t0, double t1, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("uniform_grid: dt must be positive");
  if (!(t1 >= t0)) throw std::invalid_argument("uniform_grid: t1 must be >= t0");
  std::vector<double> g;
  const std::int64_t steps = static_cast<std::int64_t>(std::floor((t1 - t0) / dt + 1e-9));
  g.reserve(static_cast<std::size_t>(steps) + 1);
  for (std::int64_t i = 0; i <= steps; ++i) g.push_back(t0 + static_cast<double>(i) * dt);
  return g;
}

double energy_expectation(const LineHamiltonian& h,
                          std::span<const std::complex<double>> psi) {
  const std::int64_t n = h.length();
  if (static_cast<std::int64_t>(psi.size()) != n)
    throw std::invalid_argument("energy_expectation: dimension mismatch");
  const double hop = h.hopping();
  double acc = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    acc += h.diagonal(j) * std::norm(psi[j]);
    if (j + 1 < n)
      acc += 2.0 * hop * (psi[j].real() * psi[j + 1].real() +
                          psi[j].imag() * psi[j + 1].imag());
  }
  return acc;
}

}  // namespace qwloc
