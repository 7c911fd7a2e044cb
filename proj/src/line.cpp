#include "qwloc/line.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "qwloc/rng.hpp"

namespace qwloc {

const char* family_name(DisorderSpec::Family f) {
  switch (f) {
    case DisorderSpec::Family::cauchy: return "cauchy";
    case DisorderSpec::Family::gaussian: return "gaussian";
    case DisorderSpec::Family::uniform: return "uniform";
  }
  throw std::logic_error("family_name: bad enum");
}

DisorderSpec::Family family_from_name(std::string_view name) {
  if (name == "cauchy") return DisorderSpec::Family::cauchy;
  if (name == "gaussian") return DisorderSpec::Family::gaussian;
  if (name == "uniform") return DisorderSpec::Family::uniform;
  throw std::invalid_argument("unknown disorder family: " + std::string(name));
}

double disorder_draw(const DisorderSpec& spec, std::uint64_t seed,
                     std::uint64_t site) {
  const Words2 w = stream_words(seed, kStreamDisorder, site);
  switch (spec.family) {
    case DisorderSpec::Family::cauchy: {
      const double u = uniform_open01(w.x0);
      return spec.delta * std::tan(std::numbers::pi * (u - 0.5));
    }
    case DisorderSpec::Family::gaussian: {
      const double u1 = uniform_open01(w.x0);
      const double u2 = uniform_open01(w.x1);
      return spec.delta * std::sqrt(-2.0 * std::log(u1)) *
             std::cos(2.0 * std::numbers::pi * u2);
    }
    case DisorderSpec::Family::uniform: {
      const double u = uniform_open01(w.x0);
      return spec.delta * std::numbers::sqrt3 * (2.0 * u - 1.0);
    }
  }
  throw std::logic_error("disorder_draw: bad enum");
}

std::vector<double> sample_disorder(const DisorderSpec& spec,
                                    std::int64_t count, std::uint64_t seed) {
  if (count < 1)
    throw std::invalid_argument("sample_disorder: count must be positive");
  if (!(spec.delta >= 0.0))
    throw std::invalid_argument("sample_disorder: delta must be >= 0");
  std::vector<double> eps(static_cast<std::size_t>(count));
  for (std::int64_t j = 0; j < count; ++j)
    eps[j] = disorder_draw(spec, seed, static_cast<std::uint64_t>(j));
  return eps;
}

LineHamiltonian::LineHamiltonian(int depth, double gamma)
    : depth_(depth), gamma_(gamma),
      epsilon_(static_cast<std::size_t>(2 * depth + 1), 0.0) {
  if (depth < 1)
    throw std::invalid_argument("LineHamiltonian: depth must be >= 1");
  if (!(gamma > 0.0))
    throw std::invalid_argument("LineHamiltonian: gamma must be positive");
}

double LineHamiltonian::hopping() const noexcept {
  return -std::numbers::sqrt2 * gamma_;
}

double LineHamiltonian::clean_diagonal(std::int64_t site) const {
  const std::int64_t last = 2 * static_cast<std::int64_t>(depth_);
  const bool special = site == 0 || site == depth_ || site == last;
  return (special ? 2.0 : 3.0) * gamma_;
}

SymTridiag LineHamiltonian::matrix() const {
  const std::int64_t n = length();
  SymTridiag t;
  t.diag.resize(static_cast<std::size_t>(n));
  t.off.assign(static_cast<std::size_t>(n - 1), hopping());
  for (std::int64_t j = 0; j < n; ++j) t.diag[j] = diagonal(j);
  return t;
}

LineHamiltonian reduced_hamiltonian(int depth, double gamma) {
  return LineHamiltonian(depth, gamma);
}

LineHamiltonian apply_disorder(const LineHamiltonian& clean,
                               const DisorderSpec& spec, std::uint64_t seed) {
  if (!(spec.delta >= 0.0))
    throw std::invalid_argument("apply_disorder: delta must be >= 0");
  LineHamiltonian h(clean.depth_, clean.gamma_);
  h.epsilon_ = sample_disorder(spec, h.length(), seed);
  return h;
}

ColumnBasis column_basis(const GluedTreeGraph& g) {
  ColumnBasis b;
  b.depth = g.depth();
  b.coeff.resize(static_cast<std::size_t>(g.num_columns()));
  for (int j = 0; j < g.num_columns(); ++j)
    b.coeff[j] = 1.0 / std::sqrt(static_cast<double>(g.column_size(j)));
  return b;
}

std::vector<double> expand_to_vertices(const ColumnBasis& b,
                                       const GluedTreeGraph& g,
                                       std::span<const double> line_state) {
  if (b.depth != g.depth())
    throw std::invalid_argument("expand_to_vertices: depth mismatch");
  if (static_cast<int>(line_state.size()) != g.num_columns())
    throw std::invalid_argument("expand_to_vertices: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(g.num_vertices()));
  for (std::int32_t v = 0; v < g.num_vertices(); ++v) {
    const int j = g.column_of(v);
    out[v] = line_state[j] * b.coeff[j];
  }
  return out;
}

std::vector<double> compress_to_columns(const ColumnBasis& b,
                                        const GluedTreeGraph& g,
                                        std::span<const double> vertex_state) {
  if (b.depth != g.depth())
    throw std::invalid_argument("compress_to_columns: depth mismatch");
  if (static_cast<std::int32_t>(vertex_state.size()) != g.num_vertices())
    throw std::invalid_argument("compress_to_columns: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(g.num_columns()), 0.0);
  for (std::int32_t v = 0; v < g.num_vertices(); ++v)
    out[g.column_of(v)] += vertex_state[v];
  for (int j = 0; j < g.num_columns(); ++j) out[j] *= b.coeff[j];
  return out;
}

namespace {

// H b_j on the full graph, with b_j the column-j basis vector.
std::vector<double> apply_full_h_to_basis(const GluedTreeGraph& g,
                                          const ColumnBasis& b, double gamma,
                                          int j) {
  std::vector<double> x(static_cast<std::size_t>(g.num_vertices()), 0.0);
  for (std::int32_t v = g.column_offset(j);
       v < g.column_offset(j) + g.column_size(j); ++v)
    x[v] = b.coeff[j];
  std::vector<double> y(x.size());
  for (std::int32_t v = 0; v < g.num_vertices(); ++v) {
    double acc = static_cast<double>(g.degree(v)) * x[v];
    for (std::int32_t w : g.neighbors(v)) acc -= x[w];
    y[v] = gamma * acc;
  }
  return y;
}

}  // namespace

std::vector<double> compressed_hamiltonian(const GluedTreeGraph& g,
                                           double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("compressed_hamiltonian: gamma must be positive");
  const ColumnBasis b = column_basis(g);
  const int cols = g.num_columns();
  std::vector<double> c(static_cast<std::size_t>(cols) * cols);
  for (int j = 0; j < cols; ++j) {
    const std::vector<double> y = apply_full_h_to_basis(g, b, gamma, j);
    const std::vector<double> row = compress_to_columns(b, g, y);
    for (int k = 0; k < cols; ++k) c[static_cast<std::size_t>(k) * cols + j] = row[k];
  }
  return c;
}

double verify_subspace_closure(const GluedTreeGraph& g, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("verify_subspace_closure: gamma must be positive");
  const ColumnBasis b = column_basis(g);
  double worst = 0.0;
  for (int j = 0; j < g.num_columns(); ++j) {
    const std::vector<double> y = apply_full_h_to_basis(g, b, gamma, j);
    const std::vector<double> c = compress_to_columns(b, g, y);
    const std::vector<double> back = expand_to_vertices(b, g, c);
    double norm2 = 0.0;
    for (std::int32_t v = 0; v < g.num_vertices(); ++v) {
      const double r = y[v] - back[v];
      norm2 += r * r;
    }
    worst = std::max(worst, std::sqrt(norm2));
  }
  return worst;
}

ClassicalChain::ClassicalChain(int depth, double gamma)
    : depth_(depth), gamma_(gamma) {
  if (depth < 1)
    throw std::invalid_argument("ClassicalChain: depth must be >= 1");
  if (!(gamma > 0.0))
    throw std::invalid_argument("ClassicalChain: gamma must be positive");
}

double ClassicalChain::rate_right(std::int64_t j) const {
  const std::int64_t n = depth_;
  const std::int64_t last = 2 * n;
  if (j < 0 || j > last) throw std::out_of_range("rate_right: site out of range");
  if (j == last) return 0.0;
  if (j < n) return 2.0 * gamma_;   // two children to the right
  return gamma_;                    // one parent to the right
}

double ClassicalChain::rate_left(std::int64_t j) const {
  const std::int64_t n = depth_;
  const std::int64_t last = 2 * n;
  if (j < 0 || j > last) throw std::out_of_range("rate_left: site out of range");
  if (j == 0) return 0.0;
  if (j > n) return 2.0 * gamma_;   // two children to the left
  return gamma_;                    // one parent to the left
}

double ClassicalChain::generator_entry(std::int64_t i, std::int64_t j) const {
  if (i == j) return rate_left(j) + rate_right(j);
  if (i == j + 1) return -rate_right(j);
  if (i == j - 1) return -rate_left(j);
  return 0.0;
}

ClassicalChain lumped_classical_chain(int depth, double gamma) {
  return ClassicalChain(depth, gamma);
}

}  // namespace qwloc
