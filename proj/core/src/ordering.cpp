#include <algorithm>
#include <cmath>
#include <iterator>
#include <numeric>
#include <set>
#include <unordered_map>
#include <stdexcept>
#include <utility>

#include "minmax/ldlt.hpp"

namespace minmax {

namespace {

std::vector<std::vector<Index>> adjacency(const SparseMatrix& lower) {
  const Index n = lower.cols();
  std::vector<std::vector<Index>> adj(static_cast<size_t>(n));
  for (Index j = 0; j < n; ++j) {
    for (SparseMatrix::InnerIterator it(lower, j); it; ++it) {
      const Index i = it.row();
      if (i == j) continue;
      adj[static_cast<size_t>(i)].push_back(j);
      adj[static_cast<size_t>(j)].push_back(i);
    }
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }
  return adj;
}

}  // namespace

std::vector<Index> minimum_degree_order(const SparseMatrix& lower) {
  const Index n = lower.cols();
  auto adj = adjacency(lower);
  std::set<std::pair<Index, Index>> queue;
  for (Index v = 0; v < n; ++v) {
    queue.emplace(static_cast<Index>(adj[static_cast<size_t>(v)].size()), v);
  }

  std::vector<Index> order;
  order.reserve(static_cast<size_t>(n));
  std::vector<Index> merged;
  while (!queue.empty()) {
    const Index v = queue.begin()->second;
    queue.erase(queue.begin());
    order.push_back(v);
    // Eliminating v turns its neighbourhood into a clique.
    const std::vector<Index> nbrs = std::move(adj[static_cast<size_t>(v)]);
    adj[static_cast<size_t>(v)].clear();
    for (const Index u : nbrs) {
      auto& au = adj[static_cast<size_t>(u)];
      queue.erase({static_cast<Index>(au.size()), u});
      merged.clear();
      std::set_union(au.begin(), au.end(), nbrs.begin(), nbrs.end(),
                     std::back_inserter(merged));
      merged.erase(std::remove_if(merged.begin(), merged.end(),
                                  [&](Index w) { return w == u || w == v; }),
                   merged.end());
      au.swap(merged);
      queue.emplace(static_cast<Index>(au.size()), u);
    }
  }
  return order;
}

std::vector<Index> pivot_order(const SymMatrix& a, const Eigen::VectorXd& shift, double tau) {
  const Index n = a.size();
  if (shift.size() != n) throw std::invalid_argument("pivot_order: shift length mismatch");
  std::vector<std::unordered_map<Index, double>> adj(static_cast<size_t>(n));
  std::vector<double> diag(static_cast<size_t>(n), 0.0);
  auto add = [&](Index i, Index j, double v) {
    if (i == j) {
      diag[static_cast<size_t>(i)] += v;
    } else {
      adj[static_cast<size_t>(i)][j] += v;
      adj[static_cast<size_t>(j)][i] += v;
    }
  };
  if (a.is_sparse()) {
    const SparseMatrix& lower = a.lower();
    for (Index j = 0; j < n; ++j) {
      for (SparseMatrix::InnerIterator it(lower, j); it; ++it) add(it.row(), j, it.value());
    }
  } else {
    for (Index j = 0; j < n; ++j) {
      for (Index i = j; i < n; ++i) {
        if (a.dense()(i, j) != 0.0) add(i, j, a.dense()(i, j));
      }
    }
  }
  for (Index i = 0; i < n; ++i) diag[static_cast<size_t>(i)] += shift(i);

  auto ratio = [&](Index k) {
    double big = 0.0;
    for (const auto& [j, v] : adj[static_cast<size_t>(k)]) big = std::max(big, std::abs(v));
    const double dk = std::abs(diag[static_cast<size_t>(k)]);
    return big == 0.0 ? (dk > 0.0 ? HUGE_VAL : 0.0) : dk / big;
  };
  // Candidates keyed by (degree, node), split by whether the pivot is acceptable.
  std::set<std::pair<Index, Index>> good;
  std::set<std::pair<Index, Index>> poor;
  std::vector<char> is_good(static_cast<size_t>(n), 0);
  auto key = [&](Index k) {
    return std::make_pair(static_cast<Index>(adj[static_cast<size_t>(k)].size()), k);
  };
  auto insert = [&](Index k) {
    const bool g = ratio(k) >= tau;
    is_good[static_cast<size_t>(k)] = g;
    (g ? good : poor).insert(key(k));
  };
  auto remove = [&](Index k) { (is_good[static_cast<size_t>(k)] ? good : poor).erase(key(k)); };
  for (Index k = 0; k < n; ++k) insert(k);

  std::vector<Index> order;
  order.reserve(static_cast<size_t>(n));
  std::vector<std::pair<Index, double>> nbrs;
  while (!good.empty() || !poor.empty()) {
    Index k = -1;
    if (!good.empty()) {
      k = good.begin()->second;
    } else {
      double best = -1.0;
      for (const auto& [deg, node] : poor) {
        const double r = ratio(node);
        if (r > best) {
          best = r;
          k = node;
        }
      }
    }
    remove(k);
    order.push_back(k);
    nbrs.assign(adj[static_cast<size_t>(k)].begin(), adj[static_cast<size_t>(k)].end());
    std::sort(nbrs.begin(), nbrs.end());
    adj[static_cast<size_t>(k)].clear();
    const double dk = diag[static_cast<size_t>(k)];
    for (const auto& [i, vi] : nbrs) remove(i);
    for (const auto& [i, vi] : nbrs) {
      auto& ai = adj[static_cast<size_t>(i)];
      ai.erase(k);
      if (dk == 0.0) continue;  // structure only; values are past saving anyway
      diag[static_cast<size_t>(i)] -= vi * vi / dk;
      for (const auto& [j, vj] : nbrs) {
        if (j != i) ai[j] -= vi * vj / dk;
      }
    }
    if (dk == 0.0) {
      for (const auto& [i, vi] : nbrs) {
        for (const auto& [j, vj] : nbrs) {
          if (j != i) adj[static_cast<size_t>(i)].try_emplace(j, 0.0);
        }
      }
    }
    for (const auto& [i, vi] : nbrs) insert(i);
  }
  return order;
}

bool SymbolicAnalysis::matches(const SparseMatrix& lower) const {
  if (lower.cols() != n || !lower.isCompressed()) return false;
  if (static_cast<Index>(src_inner.size()) != lower.nonZeros()) return false;
  for (Index j = 0; j <= n; ++j) {
    if (src_outer[static_cast<size_t>(j)] != lower.outerIndexPtr()[j]) return false;
  }
  for (Index k = 0; k < lower.nonZeros(); ++k) {
    if (src_inner[static_cast<size_t>(k)] != lower.innerIndexPtr()[k]) return false;
  }
  return true;
}

std::shared_ptr<const SymbolicAnalysis> symbolic_analyze(const SparseMatrix& lower) {
  return symbolic_analyze(lower, minimum_degree_order(lower));
}

std::shared_ptr<const SymbolicAnalysis> symbolic_analyze(const SparseMatrix& lower,
                                                         std::vector<Index> perm) {
  if (!lower.isCompressed()) {
    throw std::invalid_argument("symbolic_analyze: pattern must be compressed");
  }
  const Index n = lower.cols();
  if (static_cast<Index>(perm.size()) != n) {
    throw std::invalid_argument("symbolic_analyze: permutation size mismatch");
  }
  auto s = std::make_shared<SymbolicAnalysis>();
  s->n = n;
  s->perm = std::move(perm);
  s->iperm.assign(static_cast<size_t>(n), -1);
  for (Index k = 0; k < n; ++k) {
    const Index p = s->perm[static_cast<size_t>(k)];
    if (p < 0 || p >= n || s->iperm[static_cast<size_t>(p)] != -1) {
      throw std::invalid_argument("symbolic_analyze: not a permutation");
    }
    s->iperm[static_cast<size_t>(p)] = k;
  }

  const Index nnz = lower.nonZeros();
  s->src_outer.assign(lower.outerIndexPtr(), lower.outerIndexPtr() + n + 1);
  s->src_inner.assign(lower.innerIndexPtr(), lower.innerIndexPtr() + nnz);

  // Permuted upper triangle: entry (i, j) lands in column max(pi, pj).
  std::vector<Index> col_of(static_cast<size_t>(nnz));
  std::vector<Index> row_of(static_cast<size_t>(nnz));
  s->up_p.assign(static_cast<size_t>(n) + 1, 0);
  for (Index j = 0; j < n; ++j) {
    for (Index q = lower.outerIndexPtr()[j]; q < lower.outerIndexPtr()[j + 1]; ++q) {
      const Index pi = s->iperm[static_cast<size_t>(lower.innerIndexPtr()[q])];
      const Index pj = s->iperm[static_cast<size_t>(j)];
      col_of[static_cast<size_t>(q)] = std::max(pi, pj);
      row_of[static_cast<size_t>(q)] = std::min(pi, pj);
      ++s->up_p[static_cast<size_t>(std::max(pi, pj)) + 1];
    }
  }
  std::partial_sum(s->up_p.begin(), s->up_p.end(), s->up_p.begin());
  s->up_i.assign(static_cast<size_t>(nnz), 0);
  s->scatter.assign(static_cast<size_t>(nnz), 0);
  s->diag_pos.assign(static_cast<size_t>(n), -1);
  std::vector<Index> next(s->up_p.begin(), s->up_p.end() - 1);
  for (Index q = 0; q < nnz; ++q) {
    const Index c = col_of[static_cast<size_t>(q)];
    const Index pos = next[static_cast<size_t>(c)]++;
    s->up_i[static_cast<size_t>(pos)] = row_of[static_cast<size_t>(q)];
    s->scatter[static_cast<size_t>(q)] = pos;
    if (row_of[static_cast<size_t>(q)] == c) s->diag_pos[static_cast<size_t>(c)] = pos;
  }
  for (Index k = 0; k < n; ++k) {
    if (s->diag_pos[static_cast<size_t>(k)] < 0) {
      throw std::invalid_argument("symbolic_analyze: pattern lacks a diagonal entry");
    }
  }

  // Elimination tree and column counts.
  s->parent.assign(static_cast<size_t>(n), -1);
  std::vector<Index> flag(static_cast<size_t>(n), -1);
  std::vector<Index> count(static_cast<size_t>(n), 0);
  for (Index k = 0; k < n; ++k) {
    flag[static_cast<size_t>(k)] = k;
    for (Index p = s->up_p[static_cast<size_t>(k)]; p < s->up_p[static_cast<size_t>(k) + 1]; ++p) {
      for (Index i = s->up_i[static_cast<size_t>(p)]; flag[static_cast<size_t>(i)] != k;
           i = s->parent[static_cast<size_t>(i)]) {
        if (s->parent[static_cast<size_t>(i)] == -1) s->parent[static_cast<size_t>(i)] = k;
        ++count[static_cast<size_t>(i)];
        flag[static_cast<size_t>(i)] = k;
      }
    }
  }
  s->lp.assign(static_cast<size_t>(n) + 1, 0);
  for (Index k = 0; k < n; ++k) {
    s->lp[static_cast<size_t>(k) + 1] = s->lp[static_cast<size_t>(k)] + count[static_cast<size_t>(k)];
  }
  return s;
}

}  // namespace minmax
