#include "qwloc/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "qwloc/eigensolve.hpp"

namespace qwloc {

namespace {

void check_probability_vector(std::span<const double> p, std::int64_t dim,
                              const char* who) {
  if (static_cast<std::int64_t>(p.size()) != dim)
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  double sum = 0.0;
  for (double v : p) {
    if (v < -1e-12)
      throw std::invalid_argument(std::string(who) + ": negative probability");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument(std::string(who) +
                                ": probabilities must sum to 1");
}

void check_dense_depth(const GluedTreeGraph& g, const char* who) {
  if (g.depth() > kMaxDenseDepth)
    throw std::invalid_argument(std::string(who) + ": depth " +
                                std::to_string(g.depth()) +
                                " exceeds dense cap " +
                                std::to_string(kMaxDenseDepth));
}

DenseGenerator build_dense(const GluedTreeGraph& g, double gamma,
                           MatrixRole role, const char* who) {
  check_dense_depth(g, who);
  if (!(gamma > 0.0))
    throw std::invalid_argument(std::string(who) + ": gamma must be positive");
  const std::int32_t v = g.num_vertices();
  DenseGenerator m(v, role);
  for (std::int32_t i = 0; i < v; ++i) {
    m.at(i, i) = static_cast<double>(g.degree(i)) * gamma;
    for (std::int32_t j : g.neighbors(i)) m.at(i, j) = -gamma;
  }
  return m;
}

// y = -(M/gamma) p computed on the sparse adjacency, i.e. the right-hand
// side of dp/dt = -M p in units of gamma.
void sparse_rhs(const GluedTreeGraph& g, const double* p, double* y) {
  const std::int32_t v = g.num_vertices();
  for (std::int32_t i = 0; i < v; ++i) {
    double acc = -static_cast<double>(g.degree(i)) * p[i];
    for (std::int32_t j : g.neighbors(i)) acc += p[j];
    y[i] = acc;
  }
}

}  // namespace

GluedTreeGraph build_glued_tree(int depth) {
  if (depth < 1 || depth > GluedTreeGraph::kMaxDepth)
    throw std::invalid_argument("build_glued_tree: depth must be in [1, " +
                                std::to_string(GluedTreeGraph::kMaxDepth) +
                                "], got " + std::to_string(depth));
  GluedTreeGraph g;
  g.depth_ = depth;
  const int cols = 2 * depth + 1;
  g.col_offset_.resize(cols + 1);
  g.col_offset_[0] = 0;
  for (int j = 0; j < cols; ++j) {
    const int m = std::min(j, 2 * depth - j);
    g.col_offset_[j + 1] = g.col_offset_[j] + (std::int32_t{1} << m);
  }
  const std::int32_t v = g.col_offset_.back();
  g.column_of_.resize(v);
  for (int j = 0; j < cols; ++j)
    for (std::int32_t i = g.col_offset_[j]; i < g.col_offset_[j + 1]; ++i)
      g.column_of_[i] = j;

  // Parent->child edges; the right tree mirrors the left, so columns n and
  // n+1 are linked by the right tree's child rule.
  std::vector<std::vector<std::int32_t>> adj(v);
  auto link = [&adj](std::int32_t a, std::int32_t b) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  };
  for (int j = 0; j < depth; ++j) {
    const std::int32_t off = g.col_offset_[j];
    const std::int32_t next = g.col_offset_[j + 1];
    const std::int32_t sz = g.col_offset_[j + 1] - off;
    for (std::int32_t k = 0; k < sz; ++k) {
      link(off + k, next + 2 * k);
      link(off + k, next + 2 * k + 1);
    }
  }
  for (int j = 2 * depth; j > depth; --j) {
    const std::int32_t off = g.col_offset_[j];
    const std::int32_t next = g.col_offset_[j - 1];
    const std::int32_t sz = g.col_offset_[j + 1] - off;
    for (std::int32_t k = 0; k < sz; ++k) {
      link(off + k, next + 2 * k);
      link(off + k, next + 2 * k + 1);
    }
  }

  g.adj_offset_.resize(v + 1);
  g.adj_offset_[0] = 0;
  for (std::int32_t i = 0; i < v; ++i) {
    std::sort(adj[i].begin(), adj[i].end());
    g.adj_offset_[i + 1] = g.adj_offset_[i] + static_cast<std::int64_t>(adj[i].size());
  }
  g.adjacency_.resize(static_cast<std::size_t>(g.adj_offset_[v]));
  for (std::int32_t i = 0; i < v; ++i)
    std::copy(adj[i].begin(), adj[i].end(),
              g.adjacency_.begin() + g.adj_offset_[i]);
  return g;
}

DenseGenerator classical_generator(const GluedTreeGraph& g, double gamma) {
  return build_dense(g, gamma, MatrixRole::classical_generator,
                     "classical_generator");
}

DenseGenerator quantum_hamiltonian_full(const GluedTreeGraph& g, double gamma) {
  return build_dense(g, gamma, MatrixRole::quantum_hamiltonian,
                     "quantum_hamiltonian_full");
}

std::vector<std::vector<double>> classical_evolve_full(
    const DenseGenerator& m, std::span<const double> p0,
    std::span<const double> times) {
  const std::int64_t n = m.dim();
  check_probability_vector(p0, n, "classical_evolve_full");
  const EigenSystem es = dense_sym_eigensolve(m.entries(), n);

  std::vector<double> a(static_cast<std::size_t>(n));  // eigenbasis coefficients
  for (std::int64_t k = 0; k < n; ++k) {
    const double* row = es.vectors.data() + k * n;
    double acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += row[j] * p0[j];
    a[k] = acc;
  }
  std::vector<std::vector<double>> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t) || t < 0.0)
      throw std::invalid_argument("classical_evolve_full: times must be >= 0");
    std::vector<double> p(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t k = 0; k < n; ++k) {
      const double w = a[k] * std::exp(-es.values[k] * t);
      const double* row = es.vectors.data() + k * n;
      for (std::int64_t j = 0; j < n; ++j) p[j] += w * row[j];
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<std::vector<std::complex<double>>> quantum_evolve_full(
    const DenseGenerator& h, std::span<const std::complex<double>> psi0,
    std::span<const double> times) {
  const std::int64_t n = h.dim();
  if (static_cast<std::int64_t>(psi0.size()) != n)
    throw std::invalid_argument("quantum_evolve_full: dimension mismatch");
  double norm = 0.0;
  for (const auto& z : psi0) norm += std::norm(z);
  if (std::abs(norm - 1.0) > 1e-9)
    throw std::invalid_argument("quantum_evolve_full: state not normalized");

  const EigenSystem es = dense_sym_eigensolve(h.entries(), n);
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const double* row = es.vectors.data() + k * n;
    std::complex<double> acc = 0.0;
    for (std::int64_t j = 0; j < n; ++j) acc += row[j] * psi0[j];
    a[k] = acc;
  }
  std::vector<std::vector<std::complex<double>>> out;
  out.reserve(times.size());
  for (double t : times) {
    if (!std::isfinite(t))
      throw std::invalid_argument("quantum_evolve_full: times must be finite");
    std::vector<std::complex<double>> psi(static_cast<std::size_t>(n), 0.0);
    for (std::int64_t k = 0; k < n; ++k) {
      const double ph = -es.values[k] * t;
      const std::complex<double> w = a[k] * std::complex<double>(std::cos(ph), std::sin(ph));
      const double* row = es.vectors.data() + k * n;
      for (std::int64_t j = 0; j < n; ++j) psi[j] += w * row[j];
    }
    out.push_back(std::move(psi));
  }
  return out;
}

std::vector<std::vector<double>> classical_evolve_sparse(
    const GluedTreeGraph& g, double gamma, std::span<const double> p0,
    std::span<const double> times) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("classical_evolve_sparse: gamma must be positive");
  const std::int64_t n = g.num_vertices();
  check_probability_vector(p0, n, "classical_evolve_sparse");

  std::vector<std::size_t> order(times.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&times](std::size_t a, std::size_t b) { return times[a] < times[b]; });
  for (double t : times)
    if (!std::isfinite(t) || t < 0.0)
      throw std::invalid_argument("classical_evolve_sparse: times must be >= 0");

  // Integrate dp/ds = rhs(p) with s = gamma*t; RK4 with step halving until
  // the local error estimate is below tolerance.
  std::vector<double> p(p0.begin(), p0.end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n), full(n), half(n);
  auto rk4_step = [&](const std::vector<double>& src, double h,
                      std::vector<double>& dst) {
    sparse_rhs(g, src.data(), k1.data());
    for (std::int64_t i = 0; i < n; ++i) tmp[i] = src[i] + 0.5 * h * k1[i];
    sparse_rhs(g, tmp.data(), k2.data());
    for (std::int64_t i = 0; i < n; ++i) tmp[i] = src[i] + 0.5 * h * k2[i];
    sparse_rhs(g, tmp.data(), k3.data());
    for (std::int64_t i = 0; i < n; ++i) tmp[i] = src[i] + h * k3[i];
    sparse_rhs(g, tmp.data(), k4.data());
    dst.resize(n);
    for (std::int64_t i = 0; i < n; ++i)
      dst[i] = src[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  std::vector<std::vector<double>> out(times.size());
  double s = 0.0;
  constexpr double kTol = 1e-11;
  for (std::size_t oi : order) {
    const double target = times[oi] * gamma;
    while (s < target) {
      double h = std::min(0.05, target - s);
      for (;;) {
        rk4_step(p, h, full);
        rk4_step(p, 0.5 * h, half);
        std::vector<double> mid = half;
        rk4_step(mid, 0.5 * h, half);
        double err = 0.0;
        for (std::int64_t i = 0; i < n; ++i)
          err = std::max(err, std::abs(full[i] - half[i]));
        if (err <= kTol || h < 1e-8) break;
        h *= 0.5;
      }
      p = half;  // keep the more accurate half-step result
      s += h;
    }
    out[oi] = p;
  }
  return out;
}

std::vector<double> column_sums(const GluedTreeGraph& g,
                                std::span<const double> per_vertex) {
  if (static_cast<std::int32_t>(per_vertex.size()) != g.num_vertices())
    throw std::invalid_argument("column_sums: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(g.num_columns()), 0.0);
  for (std::int32_t v = 0; v < g.num_vertices(); ++v)
    out[g.column_of(v)] += per_vertex[v];
  return out;
}

std::vector<double> column_prob_sums(
    const GluedTreeGraph& g, std::span<const std::complex<double>> amplitude) {
  if (static_cast<std::int32_t>(amplitude.size()) != g.num_vertices())
    throw std::invalid_argument("column_prob_sums: dimension mismatch");
  std::vector<double> out(static_cast<std::size_t>(g.num_columns()), 0.0);
  for (std::int32_t v = 0; v < g.num_vertices(); ++v)
    out[g.column_of(v)] += std::norm(amplitude[v]);
  return out;
}

}  // namespace qwloc
