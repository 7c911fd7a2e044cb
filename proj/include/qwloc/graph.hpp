#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace qwloc {

// Two complete binary trees of depth n glued leaf to leaf: columns 0..2n,
// column j holds 2^min(j,2n-j) vertices, 3*2^n - 2 vertices in total.
// Vertex ids are column-major with heap order inside each column, so the
// numbering is stable across runs. Left-tree vertex (j,k) has children
// (j+1,2k) and (j+1,2k+1); the right tree mirrors that rule, which pairs
// every centre-column vertex with exactly one parent on each side.
class GluedTreeGraph {
 public:
  static constexpr int kMaxDepth = 14;  // adjacency only; dense ops cap lower

  int depth() const noexcept { return depth_; }
  int num_columns() const noexcept { return 2 * depth_ + 1; }
  std::int32_t num_vertices() const noexcept { return col_offset_.back(); }
  std::int64_t num_edges() const noexcept {
    return static_cast<std::int64_t>(adjacency_.size()) / 2;
  }

  std::int32_t column_size(int column) const { return col_offset_[column + 1] - col_offset_[column]; }
  std::int32_t column_offset(int column) const { return col_offset_[column]; }
  int column_of(std::int32_t vertex) const { return column_of_[vertex]; }
  int degree(std::int32_t vertex) const {
    return static_cast<int>(adj_offset_[vertex + 1] - adj_offset_[vertex]);
  }
  std::span<const std::int32_t> neighbors(std::int32_t vertex) const {
    return {adjacency_.data() + adj_offset_[vertex],
            static_cast<std::size_t>(adj_offset_[vertex + 1] - adj_offset_[vertex])};
  }

  friend GluedTreeGraph build_glued_tree(int depth);

 private:
  GluedTreeGraph() = default;
  int depth_ = 0;
  std::vector<std::int32_t> col_offset_;  // 2n+2 entries, prefix sums
  std::vector<std::int32_t> column_of_;   // per vertex
  std::vector<std::int64_t> adj_offset_;  // V+1 entries (CSR)
  std::vector<std::int32_t> adjacency_;   // neighbour lists, ascending
};

GluedTreeGraph build_glued_tree(int depth);

// Role tag: the classical rate matrix and the quantum Hamiltonian on the
// full graph are the same matrix entrywise; the tag records intended use.
enum class MatrixRole { classical_generator, quantum_hamiltonian };

// Dense symmetric matrix: -gamma on edges, (degree * gamma) on the diagonal.
// Column sums vanish identically; in floating point they are exact whenever
// degree * gamma is representable (gamma = 1, and any gamma with an exact
// 3*gamma), and within one rounding of the diagonal otherwise.
class DenseGenerator {
 public:
  DenseGenerator(std::int32_t dim, MatrixRole role)
      : dim_(dim), role_(role), a_(static_cast<std::size_t>(dim) * dim, 0.0) {}

  std::int32_t dim() const noexcept { return dim_; }
  MatrixRole role() const noexcept { return role_; }
  double at(std::int32_t i, std::int32_t j) const {
    return a_[static_cast<std::size_t>(i) * dim_ + j];
  }
  double& at(std::int32_t i, std::int32_t j) {
    return a_[static_cast<std::size_t>(i) * dim_ + j];
  }
  const std::vector<double>& entries() const noexcept { return a_; }

 private:
  std::int32_t dim_;
  MatrixRole role_;
  std::vector<double> a_;
};

// Dense matrices are restricted to small depths (n <= 8, 766 vertices);
// they exist as exact oracles for the reduced models.
inline constexpr int kMaxDenseDepth = 8;

DenseGenerator classical_generator(const GluedTreeGraph& g, double gamma);
DenseGenerator quantum_hamiltonian_full(const GluedTreeGraph& g, double gamma);

// Exact dense evolutions via spectral decomposition (small depths only).
std::vector<std::vector<double>> classical_evolve_full(
    const DenseGenerator& m, std::span<const double> p0,
    std::span<const double> times);
std::vector<std::vector<std::complex<double>>> quantum_evolve_full(
    const DenseGenerator& h, std::span<const std::complex<double>> psi0,
    std::span<const double> times);

// Adaptive RK4 on the sparse adjacency for depths where a dense matrix is
// impractical (up to kMaxDepth).
std::vector<std::vector<double>> classical_evolve_sparse(
    const GluedTreeGraph& g, double gamma, std::span<const double> p0,
    std::span<const double> times);

// Sum a per-vertex quantity over each column.
std::vector<double> column_sums(const GluedTreeGraph& g,
                                std::span<const double> per_vertex);
std::vector<double> column_prob_sums(
    const GluedTreeGraph& g, std::span<const std::complex<double>> amplitude);

}  // namespace qwloc
