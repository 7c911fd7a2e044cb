#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace qwloc {

// Execution policy for the kernels that have both implementations. The
// parallel path partitions work so that every output element is written by
// exactly one thread with a fixed per-element operation order; results are
// bit-identical to the serial path.
enum class Exec { serial, parallel };

struct SymTridiag {
  std::vector<double> diag;  // length L
  std::vector<double> off;   // length L-1; off[i] couples sites i and i+1
};

struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(std::int64_t idx);
  std::int64_t index;  // eigenvalue index that failed to converge
};

// Eigenpairs of a real symmetric matrix. values ascend; row alpha of
// `vectors` (at vectors[alpha*dim]) is the unit eigenvector for
// values[alpha]. Each vector's first significant component (first entry
// with |v_i| > 1e-12 * max|v|) is made positive, so the decomposition is
// reproducible bit for bit.
struct EigenSystem {
  std::int64_t dim = 0;
  std::vector<double> values;
  std::vector<double> vectors;  // vectors[alpha*dim + j]

  std::span<const double> vector(std::int64_t alpha) const {
    return {vectors.data() + alpha * dim, static_cast<std::size_t>(dim)};
  }
};

// Largest tridiagonal problem accepted (2n+1 sites at n = 10^4).
inline constexpr std::int64_t kMaxEigenDim = 20001;

// Implicit-shift QL with deterministic ordering and sign convention.
// exec selects how the accumulated rotations are applied to the
// eigenvector block.
EigenSystem tridiag_eigensolve(const SymTridiag& t, Exec exec = Exec::parallel);

// Householder reduction to tridiagonal form followed by the same QL
// iteration; for the modest dense oracle matrices. `matrix` is row-major
// dim*dim, symmetric.
EigenSystem dense_sym_eigensolve(std::span<const double> matrix,
                                 std::int64_t dim, Exec exec = Exec::serial);

}  // namespace qwloc
