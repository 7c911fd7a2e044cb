#include "qwloc/eigensolve.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

namespace qwloc {

ConvergenceError::ConvergenceError(std::int64_t idx)
    : std::runtime_error("QL iteration failed to converge at eigenvalue index " +
                         std::to_string(idx)),
      index(idx) {}

namespace {

struct Rot {
  double c;
  double s;
  std::int32_t i;  // mixes eigenvector rows i and i+1
};

// Apply a sweep's rotation sequence to components [k0,k1) of every affected
// eigenvector row. Both execution policies call this same routine, so the
// floating-point result per element is identical.
void apply_rotations(double* W, std::int64_t dim, const Rot* rots,
                     std::int64_t nrot, std::int64_t k0, std::int64_t k1) {
  for (std::int64_t t = 0; t < nrot; ++t) {
    double* __restrict a = W + static_cast<std::int64_t>(rots[t].i) * dim;
    double* __restrict b = a + dim;
    const double c = rots[t].c;
    const double s = rots[t].s;
    for (std::int64_t k = k0; k < k1; ++k) {
      const double f = b[k];
      b[k] = s * a[k] + c * f;
      a[k] = c * a[k] - s * f;
    }
  }
}

void apply_all(double* W, std::int64_t dim, const std::vector<Rot>& rots,
               Exec exec) {
  if (rots.empty()) return;
  if (exec == Exec::parallel && dim >= 64) {
#pragma omp parallel
    {
      const int nt = omp_get_num_threads();
      const int tid = omp_get_thread_num();
      const std::int64_t chunk = (dim + nt - 1) / nt;
      const std::int64_t k0 = tid * chunk;
      const std::int64_t k1 = std::min<std::int64_t>(dim, k0 + chunk);
      if (k0 < k1)
        apply_rotations(W, dim, rots.data(),
                        static_cast<std::int64_t>(rots.size()), k0, k1);
    }
  } else {
    apply_rotations(W, dim, rots.data(), static_cast<std::int64_t>(rots.size()),
                    0, dim);
  }
}

// Implicit-shift QL on (d, e) accumulating rotations into W (row
// alpha = eigenvector alpha, preloaded with the transpose of the reduction
// transform, or identity for a tridiagonal input). e[i] couples i and i+1;
// e[dim-1] is scratch.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, double* W,
                 std::int64_t n, Exec exec) {
  if (n <= 1) return;
  const double eps = std::numeric_limits<double>::epsilon();
  std::vector<Rot> rots;
  rots.reserve(static_cast<std::size_t>(n));
  for (std::int64_t l = 0; l < n; ++l) {
    int iter = 0;
    std::int64_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd) break;
      }
      if (m != l) {
        if (iter++ == 60) throw ConvergenceError(l);
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0;
        double c = 1.0;
        double p = 0.0;
        rots.clear();
        std::int64_t i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {  // deflate: split found mid-sweep
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
          rots.push_back({c, s, static_cast<std::int32_t>(i)});
        }
        apply_all(W, n, rots, exec);
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// Sort ascending and fix signs; produces the final EigenSystem from the
// working (d, W) pair.
EigenSystem order_and_sign(std::vector<double>& d, std::vector<double>& W,
                           std::int64_t n) {
  std::vector<std::int64_t> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&d](std::int64_t a, std::int64_t b) { return d[a] < d[b]; });

  EigenSystem out;
  out.dim = n;
  out.values.resize(static_cast<std::size_t>(n));
  out.vectors.resize(static_cast<std::size_t>(n) * n);
  for (std::int64_t a = 0; a < n; ++a) {
    out.values[a] = d[idx[a]];
    const double* src = W.data() + idx[a] * n;
    double* dst = out.vectors.data() + a * n;
    double amax = 0.0;
    for (std::int64_t k = 0; k < n; ++k) amax = std::max(amax, std::abs(src[k]));
    const double thresh = 1e-12 * amax;
    double sign = 1.0;
    for (std::int64_t k = 0; k < n; ++k) {
      if (std::abs(src[k]) > thresh) {
        sign = src[k] < 0.0 ? -1.0 : 1.0;
        break;
      }
    }
    if (sign > 0.0)
      std::memcpy(dst, src, static_cast<std::size_t>(n) * sizeof(double));
    else
      for (std::int64_t k = 0; k < n; ++k) dst[k] = -src[k];
  }
  return out;
}

// Householder reduction of a symmetric row-major matrix held in `z`
// (destroyed) to tridiagonal (d, e); z ends as the accumulated orthogonal
// transform Q with A = Q T Q^T. e[i] holds the coupling between i-1 and i
// (e[0] = 0).
void tred2(std::vector<double>& z, std::int64_t n, std::vector<double>& d,
           std::vector<double>& e) {
  auto Z = [&z, n](std::int64_t i, std::int64_t j) -> double& {
    return z[i * n + j];
  };
  for (std::int64_t i = n - 1; i >= 1; --i) {
    const std::int64_t l = i - 1;
    double h = 0.0;
    double scale = 0.0;
    if (l > 0) {
      for (std::int64_t k = 0; k <= l; ++k) scale += std::abs(Z(i, k));
      if (scale == 0.0) {
        e[i] = Z(i, l);
      } else {
        for (std::int64_t k = 0; k <= l; ++k) {
          Z(i, k) /= scale;
          h += Z(i, k) * Z(i, k);
        }
        double f = Z(i, l);
        double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        Z(i, l) = f - g;
        f = 0.0;
        for (std::int64_t j = 0; j <= l; ++j) {
          Z(j, i) = Z(i, j) / h;
          g = 0.0;
          for (std::int64_t k = 0; k <= j; ++k) g += Z(j, k) * Z(i, k);
          for (std::int64_t k = j + 1; k <= l; ++k) g += Z(k, j) * Z(i, k);
          e[j] = g / h;
          f += e[j] * Z(i, j);
        }
        const double hh = f / (h + h);
        for (std::int64_t j = 0; j <= l; ++j) {
          f = Z(i, j);
          e[j] = g = e[j] - hh * f;
          for (std::int64_t k = 0; k <= j; ++k)
            Z(j, k) -= f * e[k] + g * Z(i, k);
        }
      }
    } else {
      e[i] = Z(i, l);
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int64_t l = i - 1;
    if (d[i] != 0.0) {
      for (std::int64_t j = 0; j <= l; ++j) {
        double g = 0.0;
        for (std::int64_t k = 0; k <= l; ++k) g += Z(i, k) * Z(k, j);
        for (std::int64_t k = 0; k <= l; ++k) Z(k, j) -= g * Z(k, i);
      }
    }
    d[i] = Z(i, i);
    Z(i, i) = 1.0;
    for (std::int64_t j = 0; j <= l; ++j) Z(j, i) = Z(i, j) = 0.0;
  }
}

}  // namespace

EigenSystem tridiag_eigensolve(const SymTridiag& t, Exec exec) {
  const std::int64_t n = static_cast<std::int64_t>(t.diag.size());
  if (n < 1) throw std::invalid_argument("tridiag_eigensolve: empty matrix");
  if (n > kMaxEigenDim)
    throw std::invalid_argument("tridiag_eigensolve: dimension " +
                                std::to_string(n) + " exceeds cap " +
                                std::to_string(kMaxEigenDim));
  if (t.off.size() + 1 != t.diag.size())
    throw std::invalid_argument(
        "tridiag_eigensolve: off-diagonal length must be diag length - 1");

  std::vector<double> d = t.diag;
  std::vector<double> e(static_cast<std::size_t>(n), 0.0);
  std::copy(t.off.begin(), t.off.end(), e.begin());

  std::vector<double> W(static_cast<std::size_t>(n) * n, 0.0);
  for (std::int64_t i = 0; i < n; ++i) W[i * n + i] = 1.0;

  ql_implicit(d, e, W.data(), n, exec);
  return order_and_sign(d, W, n);
}

EigenSystem dense_sym_eigensolve(std::span<const double> matrix,
                                 std::int64_t dim, Exec exec) {
  if (dim < 1) throw std::invalid_argument("dense_sym_eigensolve: empty matrix");
  if (matrix.size() != static_cast<std::size_t>(dim) * dim)
    throw std::invalid_argument("dense_sym_eigensolve: size mismatch");

  std::vector<double> z(matrix.begin(), matrix.end());
  std::vector<double> d(static_cast<std::size_t>(dim));
  std::vector<double> e(static_cast<std::size_t>(dim));
  tred2(z, dim, d, e);

  // W starts as Q^T so that rows accumulate eigenvectors of the original A.
  std::vector<double> W(static_cast<std::size_t>(dim) * dim);
  for (std::int64_t i = 0; i < dim; ++i)
    for (std::int64_t j = 0; j < dim; ++j) W[i * dim + j] = z[j * dim + i];

  // Shift e so that e[i] couples i and i+1.
  std::vector<double> esh(static_cast<std::size_t>(dim), 0.0);
  for (std::int64_t i = 0; i + 1 < dim; ++i) esh[i] = e[i + 1];

  ql_implicit(d, esh, W.data(), dim, exec);
  return order_and_sign(d, W, dim);
}

}  // namespace qwloc
