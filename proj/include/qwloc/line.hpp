#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qwloc/eigensolve.hpp"
#include "qwloc/graph.hpp"

namespace qwloc {

// On-site energy distribution: Cauchy (half-width delta), Gaussian and
// uniform are parameterized by standard deviation delta.
struct DisorderSpec {
  enum class Family { cauchy, gaussian, uniform };
  Family family = Family::cauchy;
  double delta = 0.0;
};

const char* family_name(DisorderSpec::Family f);
DisorderSpec::Family family_from_name(std::string_view name);

// One energy draw for `site` of the stream identified by `seed`.
double disorder_draw(const DisorderSpec& spec, std::uint64_t seed,
                     std::uint64_t site);

// Sites 0..count-1 of the realization identified by `seed`. A prefix of a
// longer realization with the same seed is bit-identical.
std::vector<double> sample_disorder(const DisorderSpec& spec,
                                    std::int64_t count, std::uint64_t seed);

// The walk restricted to the column subspace: a (2n+1)-site chain with
// hopping -sqrt(2)*gamma on every bond and diagonal 2*gamma at the two ends
// and the centre, 3*gamma elsewhere, plus optional on-site energies.
class LineHamiltonian {
 public:
  LineHamiltonian(int depth, double gamma);

  int depth() const noexcept { return depth_; }
  std::int64_t length() const noexcept { return 2 * static_cast<std::int64_t>(depth_) + 1; }
  double gamma() const noexcept { return gamma_; }
  double hopping() const noexcept;  // -sqrt(2)*gamma
  double clean_diagonal(std::int64_t site) const;
  double diagonal(std::int64_t site) const {
    return clean_diagonal(site) + epsilon_[site];
  }
  const std::vector<double>& epsilon() const noexcept { return epsilon_; }

  SymTridiag matrix() const;

  friend LineHamiltonian apply_disorder(const LineHamiltonian& clean,
                                        const DisorderSpec& spec,
                                        std::uint64_t seed);

 private:
  int depth_;
  double gamma_;
  std::vector<double> epsilon_;
};

LineHamiltonian reduced_hamiltonian(int depth, double gamma);

// Returns a copy with epsilon replaced (never accumulated) by the
// realization for (spec, seed). delta = 0 reproduces the clean chain
// exactly. Hopping terms are untouched.
LineHamiltonian apply_disorder(const LineHamiltonian& clean,
                               const DisorderSpec& spec, std::uint64_t seed);

// Column-uniform basis: the state that spreads amplitude 1/sqrt(2^min(j,2n-j))
// over the vertices of column j. The full-graph walk started at the left
// root stays inside the span of these vectors.
struct ColumnBasis {
  int depth = 0;
  std::vector<double> coeff;  // per column, 2^{-min(j,2n-j)/2}
};

ColumnBasis column_basis(const GluedTreeGraph& g);

std::vector<double> expand_to_vertices(const ColumnBasis& b,
                                       const GluedTreeGraph& g,
                                       std::span<const double> line_state);
std::vector<double> compress_to_columns(const ColumnBasis& b,
                                        const GluedTreeGraph& g,
                                        std::span<const double> vertex_state);

// <k|H|j> over the column basis as a dense (2n+1)^2 row-major matrix,
// computed by applying the full-graph Hamiltonian to each basis vector.
std::vector<double> compressed_hamiltonian(const GluedTreeGraph& g,
                                           double gamma);

// max_j || (1 - P) H b_j ||_2: how far the full-graph Hamiltonian maps the
// column subspace outside itself (exactly 0 in exact arithmetic).
double verify_subspace_closure(const GluedTreeGraph& g, double gamma);

// The classical walk lumped over columns: a birth-death chain on 2n+1
// states. Away from the ends and centre the rate toward the centre is
// 2*gamma and the rate away is gamma.
class ClassicalChain {
 public:
  ClassicalChain(int depth, double gamma);

  int depth() const noexcept { return depth_; }
  std::int64_t length() const noexcept { return 2 * static_cast<std::int64_t>(depth_) + 1; }
  double gamma() const noexcept { return gamma_; }

  double rate_right(std::int64_t j) const;  // j -> j+1
  double rate_left(std::int64_t j) const;   // j -> j-1

  // Generator entries M[i][j]. Column sums vanish identically; in floating
  // point they are exact whenever 2*gamma and 3*gamma are representable and
  // within one rounding of the diagonal otherwise.
  double generator_entry(std::int64_t i, std::int64_t j) const;

 private:
  int depth_;
  double gamma_;
};

ClassicalChain lumped_classical_chain(int depth, double gamma);

}  // namespace qwloc
