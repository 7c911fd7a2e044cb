#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qwloc/eigensolve.hpp"
#include "qwloc/line.hpp"
#include "qwloc/rng.hpp"

using namespace qwloc;

namespace {

// Deterministic filler decoupled from the library's distributions.
double unit(std::uint64_t seed, std::uint64_t i) {
  return 2.0 * uniform_open01(stream_words(seed, 999, i).x0) - 1.0;
}

void check_against_eigen(const SymTridiag& t, const EigenSystem& mine,
                         double tol) {
  const int n = static_cast<int>(t.diag.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = t.diag[i];
  for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = m(i + 1, i) = t.off[i];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  REQUIRE(es.info() == Eigen::Success);
  const double scale = std::max(std::abs(es.eigenvalues()(0)),
                                std::abs(es.eigenvalues()(n - 1)));
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(mine.values[i] - es.eigenvalues()(i)) < tol * scale);
}

void check_orthonormal_and_reconstructs(const SymTridiag& t,
                                        const EigenSystem& es, double tol) {
  const std::int64_t n = es.dim;
  double worst_dot = 0.0;
  for (std::int64_t a = 0; a < n; ++a) {
    for (std::int64_t b = a; b < n; ++b) {
      double dot = 0.0;
      const double* va = es.vectors.data() + a * n;
      const double* vb = es.vectors.data() + b * n;
      for (std::int64_t k = 0; k < n; ++k) dot += va[k] * vb[k];
      worst_dot = std::max(worst_dot, std::abs(dot - (a == b ? 1.0 : 0.0)));
    }
  }
  CHECK(worst_dot < tol);

  // T v = lambda v for each pair.
  double worst_res = 0.0;
  double scale = 0.0;
  for (double v : t.diag) scale = std::max(scale, std::abs(v));
  for (double v : t.off) scale = std::max(scale, std::abs(v));
  for (std::int64_t a = 0; a < n; ++a) {
    const double* v = es.vectors.data() + a * n;
    for (std::int64_t j = 0; j < n; ++j) {
      double tv = t.diag[j] * v[j];
      if (j > 0) tv += t.off[j - 1] * v[j - 1];
      if (j + 1 < n) tv += t.off[j] * v[j + 1];
      worst_res = std::max(worst_res, std::abs(tv - es.values[a] * v[j]));
    }
  }
  CHECK(worst_res < tol * std::max(1.0, scale));
}

}  // namespace

TEST_CASE("three-site chain has the closed-form spectrum {0, 2, 4}") {
  // diag (2,2,2), off -sqrt(2): characteristic roots at 2 and 2 -+ 2.
  const LineHamiltonian h = reduced_hamiltonian(1, 1.0);
  const EigenSystem es = tridiag_eigensolve(h.matrix());
  REQUIRE(es.values.size() == 3);
  CHECK(std::abs(es.values[0]) < 1e-14);
  CHECK(es.values[1] == doctest::Approx(2.0));
  CHECK(es.values[2] == doctest::Approx(4.0));
}

TEST_CASE("tiny dimensions behave") {
  SymTridiag t1{{3.5}, {}};
  const EigenSystem e1 = tridiag_eigensolve(t1);
  CHECK(e1.values[0] == 3.5);
  CHECK(e1.vectors[0] == 1.0);

  SymTridiag t2{{1.0, 1.0}, {-1.0}};
  const EigenSystem e2 = tridiag_eigensolve(t2);
  CHECK(std::abs(e2.values[0]) < 1e-15);
  CHECK(e2.values[1] == doctest::Approx(2.0));
  check_orthonormal_and_reconstructs(t2, e2, 1e-14);
}

TEST_CASE("random tridiagonal matrices match the Eigen oracle") {
  for (const int n : {7, 64, 301}) {
    CAPTURE(n);
    SymTridiag t;
    t.diag.resize(n);
    t.off.resize(n - 1);
    for (int i = 0; i < n; ++i) t.diag[i] = 3.0 * unit(n, i);
    for (int i = 0; i + 1 < n; ++i) t.off[i] = 2.0 * unit(n + 1, i);
    const EigenSystem es = tridiag_eigensolve(t);
    check_against_eigen(t, es, 1e-12);
    check_orthonormal_and_reconstructs(t, es, 1e-11);
    for (int i = 0; i + 1 < n; ++i) CHECK(es.values[i] <= es.values[i + 1]);
  }
}

TEST_CASE("dense solver matches the Eigen oracle on a random symmetric matrix") {
  const int n = 150;
  std::vector<double> a(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      const double v = unit(77, static_cast<std::uint64_t>(i) * n + j);
      a[static_cast<std::size_t>(i) * n + j] = v;
      a[static_cast<std::size_t>(j) * n + i] = v;
    }
  const EigenSystem es = dense_sym_eigensolve(a, n);

  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = a[static_cast<std::size_t>(i) * n + j];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ref(m);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(es.values[i] - ref.eigenvalues()(i)) < 1e-11);

  // Orthonormality and reconstruction A = sum_k lambda_k v_k v_k^T.
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int k = 0; k < n; ++k)
        acc += es.values[k] * es.vectors[static_cast<std::size_t>(k) * n + i] *
               es.vectors[static_cast<std::size_t>(k) * n + j];
      worst = std::max(worst,
                       std::abs(acc - a[static_cast<std::size_t>(i) * n + j]));
    }
  CHECK(worst < 1e-10);
}

TEST_CASE("clean chain spectrum: PSD, zero mode, trace, band edges") {
  const int depth = 500;
  const LineHamiltonian h = reduced_hamiltonian(depth, 1.0);
  const SymTridiag t = h.matrix();
  const EigenSystem es = tridiag_eigensolve(t);
  const std::int64_t L = es.dim;

  check_orthonormal_and_reconstructs(t, es, 1e-10);

  // Compression of a positive semidefinite operator: lowest eigenvalue is
  // exactly 0 in exact arithmetic (eigenvector proportional to the square
  // roots of the column sizes).
  CHECK(std::abs(es.values[0]) < 1e-9);
  CHECK(es.values[L - 1] < (3.0 + 2.0 * std::numbers::sqrt2) + 1e-9);
  CHECK(es.values[L - 1] > 3.0 + 2.0 * std::numbers::sqrt2 - 0.1);

  double trace = 0.0;
  for (double v : es.values) trace += v;
  CHECK(trace == doctest::Approx(6.0 * depth).epsilon(1e-12));

  // The zero mode follows the square-root column-size profile.
  std::vector<double> ref(static_cast<std::size_t>(L));
  double norm = 0.0;
  for (std::int64_t j = 0; j < L; ++j) {
    ref[j] = std::pow(std::numbers::sqrt2, std::min(j, 2 * depth - j));
    norm += ref[j] * ref[j];
  }
  norm = std::sqrt(norm);
  const std::span<const double> v0 = es.vector(0);
  for (std::int64_t j = 0; j < L; ++j)
    CHECK(std::abs(std::abs(v0[j]) - ref[j] / norm) < 1e-8);
}

TEST_CASE("deterministic sign convention") {
  SymTridiag t;
  const int n = 40;
  t.diag.assign(n, 1.0);
  t.off.assign(n - 1, -0.5);
  const EigenSystem es = tridiag_eigensolve(t);
  for (int a = 0; a < n; ++a) {
    const std::span<const double> v = es.vector(a);
    double amax = 0.0;
    for (double x : v) amax = std::max(amax, std::abs(x));
    for (double x : v) {
      if (std::abs(x) > 1e-12 * amax) {
        CHECK(x > 0.0);
        break;
      }
    }
  }
}

TEST_CASE("invalid inputs are rejected") {
  CHECK_THROWS_AS(tridiag_eigensolve(SymTridiag{{}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(tridiag_eigensolve(SymTridiag{{1.0, 2.0}, {0.1, 0.2}}),
                  std::invalid_argument);
  SymTridiag too_big;
  too_big.diag.assign(kMaxEigenDim + 1, 0.0);
  too_big.off.assign(kMaxEigenDim, 0.0);
  CHECK_THROWS_AS(tridiag_eigensolve(too_big), std::invalid_argument);
  CHECK_THROWS_AS(dense_sym_eigensolve(std::vector<double>{1.0, 2.0}, 2),
                  std::invalid_argument);
}
