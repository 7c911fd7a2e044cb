#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "qwloc/dynamics.hpp"
#include "qwloc/graph.hpp"
#include "qwloc/line.hpp"

using namespace qwloc;

namespace {

double quantile_of_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * (static_cast<double>(sorted.size()) - 1.0);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

TEST_CASE("column basis coefficients are inverse square roots of column sizes") {
  const GluedTreeGraph g = build_glued_tree(4);
  const ColumnBasis b = column_basis(g);
  REQUIRE(b.coeff.size() == 9);
  for (int j = 0; j <= 8; ++j) {
    const int half = std::min(j, 8 - j);
    CHECK(b.coeff[j] == doctest::Approx(std::pow(2.0, -half / 2.0)).epsilon(1e-15));
  }
  // Centre column has 16 vertices.
  CHECK(b.coeff[4] == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("expanded basis vectors are orthonormal") {
  const GluedTreeGraph g = build_glued_tree(5);
  const ColumnBasis b = column_basis(g);
  const int cols = g.num_columns();
  std::vector<std::vector<double>> basis;
  for (int j = 0; j < cols; ++j) {
    std::vector<double> e(static_cast<std::size_t>(cols), 0.0);
    e[j] = 1.0;
    basis.push_back(expand_to_vertices(b, g, e));
  }
  for (int j = 0; j < cols; ++j) {
    for (int k = j; k < cols; ++k) {
      double dot = 0.0;
      for (std::int32_t v = 0; v < g.num_vertices(); ++v)
        dot += basis[j][v] * basis[k][v];
      const double want = (j == k) ? 1.0 : 0.0;
      CHECK(std::abs(dot - want) < 1e-14);
    }
  }
  // compress is the adjoint of expand: round trip is the identity on columns.
  std::vector<double> s(static_cast<std::size_t>(cols));
  for (int j = 0; j < cols; ++j) s[j] = 0.1 * (j + 1);
  const std::vector<double> back = compress_to_columns(b, g, expand_to_vertices(b, g, s));
  for (int j = 0; j < cols; ++j) CHECK(std::abs(back[j] - s[j]) < 1e-15);
}

TEST_CASE("reduced chain has the expected diagonal and uniform hopping") {
  const double gamma = 1.25;
  const LineHamiltonian h = reduced_hamiltonian(4, gamma);
  REQUIRE(h.length() == 9);
  const double want_diag[9] = {2, 3, 3, 3, 2, 3, 3, 3, 2};
  const SymTridiag t = h.matrix();
  for (int j = 0; j < 9; ++j)
    CHECK(t.diag[j] == doctest::Approx(want_diag[j] * gamma).epsilon(1e-15));
  for (int j = 0; j < 8; ++j)
    CHECK(t.off[j] == doctest::Approx(-std::numbers::sqrt2 * gamma).epsilon(1e-15));

  // Depth 1: ends and centre cover all three sites.
  const LineHamiltonian h1 = reduced_hamiltonian(1, 1.0);
  for (int j = 0; j < 3; ++j) CHECK(h1.clean_diagonal(j) == doctest::Approx(2.0));

  CHECK_THROWS_AS(reduced_hamiltonian(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(reduced_hamiltonian(3, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(reduced_hamiltonian(3, -1.0), std::invalid_argument);
}

TEST_CASE("compressing the full-graph operator reproduces the chain") {
  for (int n = 1; n <= 8; ++n) {
    const GluedTreeGraph g = build_glued_tree(n);
    const double gamma = 0.8;
    const std::vector<double> c = compressed_hamiltonian(g, gamma);
    const LineHamiltonian h = reduced_hamiltonian(n, gamma);
    const SymTridiag t = h.matrix();
    const int cols = g.num_columns();
    double worst = 0.0;
    for (int i = 0; i < cols; ++i) {
      for (int j = 0; j < cols; ++j) {
        double want = 0.0;
        if (i == j) want = t.diag[i];
        else if (std::abs(i - j) == 1) want = t.off[std::min(i, j)];
        worst = std::max(worst, std::abs(c[static_cast<std::size_t>(i) * cols + j] - want));
      }
    }
    CHECK(worst < 1e-12);
  }
}

TEST_CASE("the column subspace is closed under the full-graph operator") {
  for (int n = 1; n <= 8; ++n) {
    const GluedTreeGraph g = build_glued_tree(n);
    CHECK(verify_subspace_closure(g, 1.0) < 1e-10);
  }
}

TEST_CASE("compressed operator scales linearly in gamma") {
  const GluedTreeGraph g = build_glued_tree(5);
  const std::vector<double> c1 = compressed_hamiltonian(g, 1.0);
  const std::vector<double> c2 = compressed_hamiltonian(g, 2.5);
  REQUIRE(c1.size() == c2.size());
  for (std::size_t k = 0; k < c1.size(); ++k)
    CHECK(std::abs(c2[k] - 2.5 * c1[k]) < 1e-14);
}

TEST_CASE("family names round-trip and bad names are rejected") {
  for (auto f : {DisorderSpec::Family::cauchy, DisorderSpec::Family::gaussian,
                 DisorderSpec::Family::uniform})
    CHECK(family_from_name(family_name(f)) == f);
  CHECK_THROWS_AS(family_from_name("lorentz"), std::invalid_argument);
  CHECK_THROWS_AS(family_from_name(""), std::invalid_argument);
}

TEST_CASE("disorder realizations are deterministic and order-independent") {
  const DisorderSpec spec{DisorderSpec::Family::cauchy, 0.3};
  const std::vector<double> a = sample_disorder(spec, 1000, 42);
  const std::vector<double> b = sample_disorder(spec, 1000, 42);
  REQUIRE(a.size() == b.size());
  CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);

  // A shorter realization is a bitwise prefix of a longer one.
  const std::vector<double> head = sample_disorder(spec, 100, 42);
  CHECK(std::memcmp(head.data(), a.data(), head.size() * sizeof(double)) == 0);

  const std::vector<double> other = sample_disorder(spec, 1000, 43);
  int differing = 0;
  for (std::size_t j = 0; j < a.size(); ++j) differing += (a[j] != other[j]);
  CHECK(differing == 1000);

  CHECK_THROWS_AS(sample_disorder(spec, 0, 1), std::invalid_argument);
  const DisorderSpec bad{DisorderSpec::Family::cauchy, -0.1};
  CHECK_THROWS_AS(sample_disorder(bad, 10, 1), std::invalid_argument);
}

TEST_CASE("zero-width disorder is exactly zero for every family") {
  for (auto f : {DisorderSpec::Family::cauchy, DisorderSpec::Family::gaussian,
                 DisorderSpec::Family::uniform}) {
    const DisorderSpec spec{f, 0.0};
    for (double e : sample_disorder(spec, 200, 7)) CHECK(e == 0.0);
  }
}

TEST_CASE("cauchy draws have the right median and quartiles") {
  const double delta = 1.0;
  const DisorderSpec spec{DisorderSpec::Family::cauchy, delta};
  std::vector<double> x = sample_disorder(spec, 1'000'000, 2024);
  std::sort(x.begin(), x.end());
  // Median 0, quartiles at +-delta, so the interquartile range is 2*delta.
  CHECK(std::abs(quantile_of_sorted(x, 0.5)) < 0.01);
  const double iqr = quantile_of_sorted(x, 0.75) - quantile_of_sorted(x, 0.25);
  CHECK(iqr == doctest::Approx(2.0 * delta).epsilon(0.02));
}

TEST_CASE("gaussian draws have the right mean and standard deviation") {
  const double delta = 0.5;
  const DisorderSpec spec{DisorderSpec::Family::gaussian, delta};
  const std::vector<double> x = sample_disorder(spec, 1'000'000, 99);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size()) - 1.0;
  CHECK(std::abs(mean) < 3e-3);
  CHECK(std::sqrt(var) == doctest::Approx(delta).epsilon(0.01));
}

TEST_CASE("uniform draws stay inside their support and match the width") {
  const double delta = 0.5;
  const double bound = delta * std::numbers::sqrt3;
  const DisorderSpec spec{DisorderSpec::Family::uniform, delta};
  const std::vector<double> x = sample_disorder(spec, 1'000'000, 555);
  double lo = x[0], hi = x[0], mean = 0.0;
  for (double v : x) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
    mean += v;
  }
  mean /= static_cast<double>(x.size());
  CHECK(lo > -bound);
  CHECK(hi < bound);
  // The extremes of a million draws hug the endpoints.
  CHECK(lo < -0.999 * bound);
  CHECK(hi > 0.999 * bound);
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size()) - 1.0;
  CHECK(std::sqrt(var) == doctest::Approx(delta).epsilon(0.01));
}

TEST_CASE("apply_disorder replaces on-site energies and keeps hopping") {
  const LineHamiltonian clean = reduced_hamiltonian(20, 1.0);
  const DisorderSpec spec{DisorderSpec::Family::gaussian, 0.4};
  const LineHamiltonian h1 = apply_disorder(clean, spec, 11);
  const LineHamiltonian h2 = apply_disorder(h1, spec, 12);

  // Applying again replaces the realization instead of accumulating it.
  const std::vector<double> want = sample_disorder(spec, clean.length(), 12);
  for (std::int64_t j = 0; j < clean.length(); ++j) {
    CHECK(h2.epsilon()[j] == want[j]);
    CHECK(h2.diagonal(j) == clean.clean_diagonal(j) + want[j]);
  }
  CHECK(h1.hopping() == clean.hopping());
  CHECK(h2.hopping() == clean.hopping());

  // Width zero reproduces the clean chain bit for bit.
  const LineHamiltonian h0 =
      apply_disorder(h1, DisorderSpec{DisorderSpec::Family::cauchy, 0.0}, 5);
  for (std::int64_t j = 0; j < clean.length(); ++j) {
    CHECK(h0.epsilon()[j] == 0.0);
    CHECK(h0.diagonal(j) == clean.diagonal(j));
  }

  CHECK_THROWS_AS(
      apply_disorder(clean, DisorderSpec{DisorderSpec::Family::cauchy, -1.0}, 1),
      std::invalid_argument);
}

TEST_CASE("lumped chain rates follow the tree geometry") {
  const double gamma = 1.5;
  const ClassicalChain chain = lumped_classical_chain(3, gamma);
  // Left half: two children to the right, one parent to the left.
  for (std::int64_t j = 0; j < 3; ++j) CHECK(chain.rate_right(j) == 2.0 * gamma);
  for (std::int64_t j = 3; j < 6; ++j) CHECK(chain.rate_right(j) == gamma);
  CHECK(chain.rate_right(6) == 0.0);
  CHECK(chain.rate_left(0) == 0.0);
  for (std::int64_t j = 1; j <= 3; ++j) CHECK(chain.rate_left(j) == gamma);
  for (std::int64_t j = 4; j <= 6; ++j) CHECK(chain.rate_left(j) == 2.0 * gamma);

  CHECK_THROWS_AS(chain.rate_right(-1), std::out_of_range);
  CHECK_THROWS_AS(chain.rate_left(7), std::out_of_range);
  CHECK_THROWS_AS(lumped_classical_chain(0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lumped_classical_chain(3, -2.0), std::invalid_argument);
}

TEST_CASE("lumped generator columns sum to zero and kill the column-size vector") {
  // gamma = 1.25 keeps 3*gamma representable, so cancellation is exact;
  // generic gamma is good to one rounding of the diagonal.
  const ClassicalChain exact = lumped_classical_chain(5, 1.25);
  for (std::int64_t j = 0; j < exact.length(); ++j) {
    double colsum = 0.0;
    for (std::int64_t i = 0; i < exact.length(); ++i)
      colsum += exact.generator_entry(i, j);
    CHECK(colsum == 0.0);
  }
  const ClassicalChain chain = lumped_classical_chain(5, 0.7);
  const std::int64_t len = chain.length();
  for (std::int64_t j = 0; j < len; ++j) {
    double colsum = 0.0;
    for (std::int64_t i = 0; i < len; ++i) colsum += chain.generator_entry(i, j);
    CHECK(std::abs(colsum) < 1e-15);
  }
  // The stationary distribution is proportional to the column sizes.
  std::vector<double> pi(static_cast<std::size_t>(len));
  for (std::int64_t j = 0; j < len; ++j)
    pi[j] = std::pow(2.0, static_cast<double>(std::min(j, 2 * 5 - j)));
  for (std::int64_t i = 0; i < len; ++i) {
    double acc = 0.0;
    for (std::int64_t j = 0; j < len; ++j) acc += chain.generator_entry(i, j) * pi[j];
    CHECK(std::abs(acc) < 1e-12);
  }
}

TEST_CASE("lumped evolution matches the column sums of the full-graph walk") {
  const int n = 6;
  const double gamma = 1.0;
  const GluedTreeGraph g = build_glued_tree(n);
  const std::vector<double> times = {1.0, 5.0, 20.0};

  std::vector<double> p0(static_cast<std::size_t>(g.num_vertices()), 0.0);
  p0[0] = 1.0;
  const std::vector<std::vector<double>> full =
      classical_evolve_sparse(g, gamma, p0, times);

  const ClassicalChain chain = lumped_classical_chain(n, gamma);
  std::vector<double> q0(static_cast<std::size_t>(chain.length()), 0.0);
  q0[0] = 1.0;
  const std::vector<ProbabilityProfile> lumped =
      evolve_classical(chain, q0, times);

  REQUIRE(full.size() == lumped.size());
  for (std::size_t ti = 0; ti < times.size(); ++ti) {
    const std::vector<double> cols = column_sums(g, full[ti]);
    REQUIRE(cols.size() == lumped[ti].p.size());
    for (std::size_t j = 0; j < cols.size(); ++j)
      CHECK(std::abs(cols[j] - lumped[ti].p[j]) < 1e-8);
  }
}
