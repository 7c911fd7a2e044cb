#include "qwloc/localization.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qwloc/rng.hpp"

namespace qwloc {

namespace {
constexpr double kSqrt8 = 2.0 * std::numbers::sqrt2;
constexpr double kSqrt32 = 4.0 * std::numbers::sqrt2;
}  // namespace

LocalizationLength thouless_length(double energy, double gamma, double delta) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("thouless_length: gamma must be positive");
  if (!(delta >= 0.0))
    throw std::invalid_argument("thouless_length: delta must be >= 0");
  if (!std::isfinite(energy))
    throw std::invalid_argument("thouless_length: energy must be finite");
  const double ehat = energy - 3.0 * gamma;
  const double band = kSqrt8 * gamma;
  const double rhs =
      (std::hypot(band + ehat, delta) + std::hypot(band - ehat, delta)) /
      (kSqrt32 * gamma);
  if (rhs <= 1.0 + 1e-15) return LocalizationLength::infinite();
  return LocalizationLength::of(1.0 / std::acosh(rhs));
}

LocalizationLength max_localization_length(double gamma, double delta) {
  if (!(delta >= 0.0))
    throw std::invalid_argument("max_localization_length: delta must be >= 0");
  if (delta == 0.0) return LocalizationLength::infinite();
  return thouless_length(3.0 * gamma, gamma, delta);
}

double thouless_asymptote(double gamma, double delta) {
  if (!(delta > 0.0))
    throw std::invalid_argument("thouless_asymptote: delta must be positive");
  return kSqrt8 * gamma / delta;
}

double thouless_argmax_energy(double gamma, double delta, double e_lo,
                              double e_hi, double step) {
  if (!(step > 0.0) || !(e_hi >= e_lo))
    throw std::invalid_argument("thouless_argmax_energy: bad grid");
  double best_e = e_lo;
  LocalizationLength best = thouless_length(e_lo, gamma, delta);
  for (double e = e_lo + step; e <= e_hi + 0.5 * step; e += step) {
    const LocalizationLength l = thouless_length(e, gamma, delta);
    const bool better = (!l.finite && best.finite) ||
                        (l.finite && best.finite && l.sites > best.sites);
    if (better) {
      best = l;
      best_e = e;
    }
  }
  return best_e;
}

LyapunovEstimate lyapunov_exponent(double energy, double gamma,
                                   const DisorderSpec& spec,
                                   std::int64_t steps, std::uint64_t seed) {
  if (steps < 10000)
    throw std::invalid_argument("lyapunov_exponent: steps must be >= 10000");
  if (!(gamma > 0.0))
    throw std::invalid_argument("lyapunov_exponent: gamma must be positive");
  if (!(spec.delta >= 0.0))
    throw std::invalid_argument("lyapunov_exponent: delta must be >= 0");

  constexpr int kRenorm = 16;
  constexpr int kBatches = 32;
  constexpr double kGuard = 1e100;
  const double inv_hop = 1.0 / (std::numbers::sqrt2 * gamma);
  const double base = 3.0 * gamma - energy;

  double psi_prev = 0.0;
  double psi = 1.0;
  double batch_mean[kBatches];
  double total_log = 0.0;
  std::int64_t done = 0;
  for (int b = 0; b < kBatches; ++b) {
    const std::int64_t b_start = done;
    const std::int64_t b_end = steps * (b + 1) / kBatches;
    double blog = 0.0;
    while (done < b_end) {
      const std::int64_t chunk_end = std::min<std::int64_t>(done + kRenorm, b_end);
      for (; done < chunk_end; ++done) {
        const double eps = disorder_draw(spec, seed, static_cast<std::uint64_t>(done));
        const double next = (base + eps) * inv_hop * psi - psi_prev;
        psi_prev = psi;
        psi = next;
        if (std::abs(psi) > kGuard) {  // heavy tails: renormalize early
          ++done;
          break;
        }
      }
      const double r = std::hypot(psi, psi_prev);
      if (!(r > 0.0))
        throw std::runtime_error("lyapunov_exponent: transfer vector vanished");
      blog += std::log(r);
      psi /= r;
      psi_prev /= r;
    }
    batch_mean[b] = blog / static_cast<double>(b_end - b_start);
    total_log += blog;
  }

  LyapunovEstimate est;
  est.steps = steps;
  est.exponent = total_log / static_cast<double>(steps);
  double var = 0.0;
  for (int b = 0; b < kBatches; ++b) {
    const double d = batch_mean[b] - est.exponent;
    var += d * d;
  }
  var /= static_cast<double>(kBatches - 1);
  est.std_error = std::sqrt(var / static_cast<double>(kBatches));
  return est;
}

namespace {

struct FlankFit {
  bool ok = false;
  double inv_length = 0.0;  // -slope
  double intercept = 0.0;
  double rss = 0.0;
  std::int64_t points = 0;
  std::string reason;
};

FlankFit fit_flank(std::span<const double> v, std::int64_t j0, int dir,
                   std::int64_t last) {
  constexpr double kFloor = 1e-13;
  constexpr std::int64_t kMinPoints = 8;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::int64_t j = j0 + dir; j >= 0 && j <= last; j += dir) {
    const double a = std::abs(v[j]);
    if (a > kFloor) {
      xs.push_back(static_cast<double>(std::abs(j - j0)));
      ys.push_back(std::log(a));
    }
  }
  FlankFit f;
  f.points = static_cast<std::int64_t>(xs.size());
  if (f.points < kMinPoints) {
    f.reason = "flank has too few sites above the amplitude floor";
    return f;
  }
  const double lo = *std::min_element(ys.begin(), ys.end());
  const double hi = *std::max_element(ys.begin(), ys.end());
  if (hi - lo < std::numbers::ln10) {
    f.reason = "no decade of decay along the flank";
    return f;
  }
  const LinearFit fit = fit_line(xs, ys);
  if (!(fit.slope < 0.0)) {
    f.reason = "flank amplitude does not decay";
    return f;
  }
  f.ok = true;
  f.inv_length = -fit.slope;
  f.intercept = fit.intercept;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (fit.intercept + fit.slope * xs[i]);
    f.rss += r * r;
  }
  return f;
}

}  // namespace

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2)
    throw std::invalid_argument("fit_line: need at least two matched points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_line: x values all equal");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

EnvelopeFit eigenstate_envelope(const SpectralDecomposition& es,
                                std::int64_t index) {
  if (index < 0 || index >= static_cast<std::int64_t>(es.values.size()))
    throw std::invalid_argument("eigenstate_envelope: index out of range");
  const std::span<const double> v = es.vector(index);
  const std::int64_t n = es.dim;

  EnvelopeFit out;
  out.energy = es.values[index];
  std::int64_t j0 = 0;
  double amax = 0.0;
  for (std::int64_t j = 0; j < n; ++j) {
    const double a = std::abs(v[j]);
    if (a > amax) {
      amax = a;
      j0 = j;
    }
  }
  out.center = j0;

  const FlankFit left = fit_flank(v, j0, -1, n - 1);
  const FlankFit right = fit_flank(v, j0, +1, n - 1);
  if (!left.ok || !right.ok) {
    out.reason = !left.ok ? "left flank: " + left.reason
                          : "right flank: " + right.reason;
    return out;
  }
  const double l = 0.5 * (1.0 / left.inv_length + 1.0 / right.inv_length);
  if (static_cast<double>(j0) < 2.0 * l ||
      static_cast<double>(n - 1 - j0) < 2.0 * l) {
    out.reason = "peak within two localization lengths of a chain end";
    out.length = l;
    return out;
  }
  out.reliable = true;
  out.length = l;
  out.prefactor = std::exp(0.5 * (left.intercept + right.intercept));
  out.residual = std::sqrt((left.rss + right.rss) /
                           static_cast<double>(left.points + right.points));
  return out;
}

ScalingResult scaling_exponent(DisorderSpec::Family family, double gamma,
                               std::span<const double> delta_grid,
                               std::int64_t steps, int seeds,
                               std::uint64_t master_seed, Exec exec) {
  if (delta_grid.size() < 2)
    throw std::invalid_argument("scaling_exponent: need at least two grid points");
  for (std::size_t i = 0; i < delta_grid.size(); ++i) {
    if (!(delta_grid[i] > 0.0))
      throw std::invalid_argument("scaling_exponent: deltas must be positive");
    if (i > 0 && !(delta_grid[i] > delta_grid[i - 1]))
      throw std::invalid_argument("scaling_exponent: delta grid must ascend");
  }
  if (delta_grid.back() / delta_grid.front() < 10.0)
    throw std::invalid_argument(
        "scaling_exponent: delta grid must span at least one decade");
  if (steps < 1000000)
    throw std::invalid_argument("scaling_exponent: steps must be >= 1e6");
  if (seeds < 1)
    throw std::invalid_argument("scaling_exponent: seeds must be >= 1");
  if (!(gamma > 0.0))
    throw std::invalid_argument("scaling_exponent: gamma must be positive");

  const std::int64_t nd = static_cast<std::int64_t>(delta_grid.size());
  const std::int64_t tasks = nd * seeds;
  std::vector<double> exps(static_cast<std::size_t>(tasks));
  const double energy = 3.0 * gamma;

  auto run_task = [&](std::int64_t task) {
    const std::int64_t di = task / seeds;
    const std::int64_t rep = task % seeds;
    const std::uint64_t child =
        child_seed(master_seed, static_cast<std::uint64_t>(di),
                   static_cast<std::uint64_t>(rep));
    const DisorderSpec spec{family, delta_grid[di]};
    exps[task] = lyapunov_exponent(energy, gamma, spec, steps, child).exponent;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t task = 0; task < tasks; ++task) run_task(task);
  } else {
    for (std::int64_t task = 0; task < tasks; ++task) run_task(task);
  }

  ScalingResult res;
  res.family = family;
  res.delta.assign(delta_grid.begin(), delta_grid.end());
  res.length.resize(static_cast<std::size_t>(nd));
  res.std_error.resize(static_cast<std::size_t>(nd));
  std::vector<double> lx(static_cast<std::size_t>(nd));
  std::vector<double> ly(static_cast<std::size_t>(nd));
  for (std::int64_t di = 0; di < nd; ++di) {
    double mean = 0.0;
    for (int r = 0; r < seeds; ++r) mean += exps[di * seeds + r];
    mean /= static_cast<double>(seeds);
    double var = 0.0;
    for (int r = 0; r < seeds; ++r) {
      const double d = exps[di * seeds + r] - mean;
      var += d * d;
    }
    var = seeds > 1 ? var / static_cast<double>(seeds - 1) : 0.0;
    const double se_mean = std::sqrt(var / static_cast<double>(seeds));
    res.length[di] = 1.0 / mean;
    res.std_error[di] = se_mean / (mean * mean);
    lx[di] = std::log(delta_grid[di]);
    ly[di] = std::log(res.length[di]);
  }
  const LinearFit fit = fit_line(lx, ly);
  res.slope = fit.slope;
  res.intercept = fit.intercept;
  res.r_squared = fit.r_squared;
  for (std::int64_t di = 0; di + 1 < nd; ++di) {
    const double allowance = 2.0 * (res.std_error[di] + res.std_error[di + 1]);
    if (res.length[di + 1] > res.length[di] + allowance) {
      res.monotone_within_noise = false;
      break;
    }
  }
  return res;
}

}  // namespace qwloc
