// Test-only reference computations, kept independent of the library
// implementations they check.
#ifndef CROC_TESTS_ORACLES_HPP_
#define CROC_TESTS_ORACLES_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "croc/features.hpp"
#include "croc/rng.hpp"

namespace oracles {

using croc::Index;
using croc::Matrix;
using croc::Vector;

// Plain double-loop sum of q .* t.
inline double loop_transport_cost(const Matrix& q, const Matrix& t) {
  double acc = 0.0;
  for (Index i = 0; i < q.rows(); ++i) {
    for (Index j = 0; j < q.cols(); ++j) {
      acc += q(i, j) * t(i, j);
    }
  }
  return acc;
}

// Loop evaluation of -<z_n, c_k>.
inline Matrix loop_semantic_cost(const Matrix& z, const Matrix& c) {
  Matrix t(z.rows(), c.rows());
  for (Index n = 0; n < z.rows(); ++n) {
    for (Index k = 0; k < c.rows(); ++k) {
      double dot = 0.0;
      for (Index d = 0; d < z.cols(); ++d) {
        dot += z(n, d) * c(k, d);
      }
      t(n, k) = -dot;
    }
  }
  return t;
}

// Loop accumulation of centroid k = sum_n q_{nk} z_n.
inline Matrix loop_pool_centroids(const Matrix& z, const Matrix& q) {
  Matrix c = Matrix::Zero(q.cols(), z.cols());
  for (Index n = 0; n < z.rows(); ++n) {
    for (Index k = 0; k < q.cols(); ++k) {
      for (Index d = 0; d < z.cols(); ++d) {
        c(k, d) += q(n, k) * z(n, d);
      }
    }
  }
  return c;
}

// Long-double loop cross entropy with the 1e-12 clamp convention.
inline double loop_cross_entropy(const Matrix& a, const Matrix& b) {
  long double acc = 0.0L;
  for (Index k = 0; k < a.rows(); ++k) {
    for (Index l = 0; l < a.cols(); ++l) {
      if (a(k, l) == 0.0) {
        continue;
      }
      const long double clamped =
          std::max(static_cast<long double>(b(k, l)), 1e-12L);
      acc -= static_cast<long double>(a(k, l)) * std::log(clamped);
    }
  }
  return static_cast<double>(acc / a.rows());
}

// Exact optimum of  min <Q, T>  over U(r, c), by enumerating the vertices
// of the transportation polytope: every basic feasible solution is a
// spanning tree of the complete bipartite graph, whose flows follow from
// leaf elimination. Intended for n + k <= 8 or so.
inline double lp_transport_oracle(const Matrix& t, const Vector& r,
                                  const Vector& c) {
  const int n = static_cast<int>(t.rows());
  const int k = static_cast<int>(t.cols());
  const int nodes = n + k;
  const int edges = n * k;
  const int tree_edges = nodes - 1;

  struct Edge {
    int row;
    int col;
  };
  std::vector<Edge> edge_list;
  edge_list.reserve(static_cast<std::size_t>(edges));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      edge_list.push_back({i, j});
    }
  }

  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(tree_edges));
  std::iota(pick.begin(), pick.end(), 0);

  auto evaluate = [&]() {
    // Union-find spanning check.
    std::vector<int> parent(static_cast<std::size_t>(nodes));
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
      while (parent[static_cast<std::size_t>(x)] != x) {
        x = parent[static_cast<std::size_t>(x)] =
            parent[static_cast<std::size_t>(
                parent[static_cast<std::size_t>(x)])];
      }
      return x;
    };
    for (const int e : pick) {
      const int a = edge_list[static_cast<std::size_t>(e)].row;
      const int b = n + edge_list[static_cast<std::size_t>(e)].col;
      const int ra = find(a);
      const int rb = find(b);
      if (ra == rb) {
        return;  // cycle: not a tree
      }
      parent[static_cast<std::size_t>(ra)] = rb;
    }

    // Solve the tree flows by leaf elimination. Node balance: rows supply
    // r_i, columns demand c_j.
    std::vector<double> balance(static_cast<std::size_t>(nodes));
    for (int i = 0; i < n; ++i) {
      balance[static_cast<std::size_t>(i)] = r[i];
    }
    for (int j = 0; j < k; ++j) {
      balance[static_cast<std::size_t>(n + j)] = c[j];
    }
    std::vector<std::vector<int>> incident(static_cast<std::size_t>(nodes));
    for (const int e : pick) {
      incident[static_cast<std::size_t>(
          edge_list[static_cast<std::size_t>(e)].row)].push_back(e);
      incident[static_cast<std::size_t>(
          n + edge_list[static_cast<std::size_t>(e)].col)].push_back(e);
    }
    std::vector<bool> edge_done(static_cast<std::size_t>(edges), false);
    std::vector<int> degree(static_cast<std::size_t>(nodes), 0);
    for (int v = 0; v < nodes; ++v) {
      degree[static_cast<std::size_t>(v)] =
          static_cast<int>(incident[static_cast<std::size_t>(v)].size());
    }

    double cost = 0.0;
    bool feasible = true;
    for (int step = 0; step < tree_edges && feasible; ++step) {
      int leaf = -1;
      for (int v = 0; v < nodes; ++v) {
        if (degree[static_cast<std::size_t>(v)] == 1) {
          leaf = v;
          break;
        }
      }
      if (leaf < 0) {
        return;
      }
      int e_leaf = -1;
      for (const int e : incident[static_cast<std::size_t>(leaf)]) {
        if (!edge_done[static_cast<std::size_t>(e)]) {
          e_leaf = e;
          break;
        }
      }
      const Edge& ed = edge_list[static_cast<std::size_t>(e_leaf)];
      const int other = (leaf < n) ? n + ed.col : ed.row;
      // Flow on a leaf edge equals the leaf's remaining balance.
      const double flow = balance[static_cast<std::size_t>(leaf)];
      if (flow < -1e-12) {
        feasible = false;
        break;
      }
      cost += flow * t(ed.row, ed.col);
      balance[static_cast<std::size_t>(other)] -= flow;
      balance[static_cast<std::size_t>(leaf)] = 0.0;
      edge_done[static_cast<std::size_t>(e_leaf)] = true;
      --degree[static_cast<std::size_t>(leaf)];
      --degree[static_cast<std::size_t>(other)];
    }
    if (feasible && cost < best) {
      best = cost;
    }
  };

  // Enumerate all edge subsets of size nodes-1.
  while (true) {
    evaluate();
    int pos = tree_edges - 1;
    while (pos >= 0 &&
           pick[static_cast<std::size_t>(pos)] == edges - tree_edges + pos) {
      --pos;
    }
    if (pos < 0) {
      break;
    }
    ++pick[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < tree_edges; ++q) {
      pick[static_cast<std::size_t>(q)] =
          pick[static_cast<std::size_t>(q - 1)] + 1;
    }
  }
  return best;
}

// Exact assignment minimum by enumerating all n! permutations.
inline double brute_force_assignment(const Matrix& cost,
                                     std::vector<int>* best_perm = nullptr) {
  const int n = static_cast<int>(cost.rows());
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      total += cost(i, perm[static_cast<std::size_t>(i)]);
    }
    if (total < best) {
      best = total;
      if (best_perm != nullptr) {
        *best_perm = perm;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Random helpers shared by the suites.
inline Matrix random_matrix(croc::Rng& rng, Index rows, Index cols, double lo,
                            double hi) {
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      m(i, j) = rng.uniform(lo, hi);
    }
  }
  return m;
}

inline Vector random_simplex(croc::Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) {
    v[i] = rng.uniform(1e-3, 1.0);
  }
  return v / v.sum();
}

inline Matrix random_row_stochastic(croc::Rng& rng, Index rows, Index cols) {
  Matrix m = random_matrix(rng, rows, cols, 1e-6, 1.0);
  for (Index i = 0; i < rows; ++i) {
    m.row(i) /= m.row(i).sum();
  }
  return m;
}

}  // namespace oracles

#endif  // CROC_TESTS_ORACLES_HPP_
