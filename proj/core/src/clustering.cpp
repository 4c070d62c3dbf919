#include "croc/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "croc/rng.hpp"

namespace croc {

namespace {

std::vector<Index> select_top_k(const Vector& weights, int k) {
  std::vector<Index> order(weights.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return weights[a] > weights[b];
  });
  order.resize(k);
  return order;
}

// Weighted sampling without replacement via inverse CDF on deterministic
// uniforms. Falls back to uniform draws once the remaining mass is zero.
std::vector<Index> select_multinomial(const Vector& weights, int k,
                                      std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Index> remaining(weights.size());
  std::iota(remaining.begin(), remaining.end(), Index{0});
  std::vector<Index> picked;
  picked.reserve(k);
  for (int draw = 0; draw < k; ++draw) {
    double total = 0.0;
    for (Index idx : remaining) {
      total += weights[idx];
    }
    std::size_t chosen = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      chosen = remaining.size() - 1;
      for (std::size_t pos = 0; pos < remaining.size(); ++pos) {
        acc += weights[remaining[pos]];
        if (u < acc) {
          chosen = pos;
          break;
        }
      }
    } else {
      chosen = static_cast<std::size_t>(rng.below(remaining.size()));
    }
    picked.push_back(remaining[chosen]);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(chosen));
  }
  return picked;
}

// Row-normalizes q in place; rows with no mass become uniform.
void normalize_rows(Matrix& q) {
  const Index k = q.cols();
  for (Index i = 0; i < q.rows(); ++i) {
    const double total = q.row(i).sum();
    if (total > 0.0) {
      q.row(i) /= total;
    } else {
      q.row(i).setConstant(1.0 / static_cast<double>(k));
    }
  }
}

// Per-row argmax with ties resolved to the lowest column index.
Matrix hard_assign(const Matrix& q) {
  Matrix hard = Matrix::Zero(q.rows(), q.cols());
  for (Index i = 0; i < q.rows(); ++i) {
    Index best = 0;
    for (Index j = 1; j < q.cols(); ++j) {
      if (q(i, j) > q(i, best)) {
        best = j;
      }
    }
    hard(i, best) = 1.0;
  }
  return hard;
}

Matrix drop_columns(const Matrix& m, const std::vector<Index>& dropped) {
  Matrix out(m.rows(), m.cols() - static_cast<Index>(dropped.size()));
  Index out_col = 0;
  std::size_t next = 0;
  for (Index j = 0; j < m.cols(); ++j) {
    if (next < dropped.size() && dropped[next] == j) {
      ++next;
      continue;
    }
    out.col(out_col++) = m.col(j);
  }
  return out;
}

}  // namespace

void ClusteringConfig::validate(Index joint_tokens) const {
  if (k_start < 2 || k_start > joint_tokens) {
    throw ConfigError("k_start must lie in [2, " +
                      std::to_string(joint_tokens) + "], got " +
                      std::to_string(k_start));
  }
  if (!(lambda > 0.0)) {
    throw ConfigError("lambda must be > 0");
  }
  if (lambda_pos < 0.0) {
    throw ConfigError("lambda_pos must be >= 0");
  }
  if (!(tol > 0.0) || max_iter < 1) {
    throw ConfigError("tol must be > 0 and max_iter >= 1");
  }
}

ClusteringState init_centroids(const ViewPair& vp,
                               const ClusteringConfig& cfg) {
  const Index two_n = vp.joint().rows();
  cfg.validate(two_n);
  const Vector& weights = vp.marginal().weights();

  std::vector<Index> tokens =
      cfg.init_policy == InitPolicy::kTopK
          ? select_top_k(weights, cfg.k_start)
          : select_multinomial(weights, cfg.k_start, cfg.seed);

  ClusteringState state;
  state.k = cfg.k_start;
  state.indicator = Matrix::Zero(two_n, cfg.k_start);
  for (int col = 0; col < cfg.k_start; ++col) {
    state.indicator(tokens[static_cast<std::size_t>(col)], col) = 1.0;
  }
  state.centroids = state.indicator.transpose() * vp.joint().z_cat();
  state.cen_positions = state.indicator.transpose() * vp.positions();
  return state;
}

Matrix semantic_cost(const JointRepresentation& joint,
                     const Matrix& centroids) {
  if (joint.dim() != centroids.cols()) {
    throw ShapeError("semantic_cost feature dim " +
                     std::to_string(joint.dim()) +
                     " does not match centroid dim " +
                     std::to_string(centroids.cols()));
  }
  return -(joint.z_cat() * centroids.transpose());
}

Vector centroid_marginal(const ClusteringState& state,
                         const AttentionMarginal& r) {
  if (state.indicator.rows() != r.size()) {
    throw ShapeError("indicator rows " + std::to_string(state.indicator.rows()) +
                     " do not match marginal length " +
                     std::to_string(r.size()));
  }
  Vector logits = state.indicator.transpose() * r.weights();
  const double mx = logits.maxCoeff();
  Vector e = (logits.array() - mx).exp();
  return e / e.sum();
}

Matrix positional_cost(const ViewPair& vp, const Matrix& cen_positions) {
  if (cen_positions.cols() != 2) {
    throw ShapeError("centroid positions must have 2 columns");
  }
  const Matrix& pos = vp.positions();
  const double s = vp.diag_s();
  Matrix t(pos.rows(), cen_positions.rows());
  for (Index i = 0; i < pos.rows(); ++i) {
    for (Index j = 0; j < cen_positions.rows(); ++j) {
      t(i, j) = (pos.row(i) - cen_positions.row(j)).norm() / s;
    }
  }
  return t;
}

Matrix total_cost(const Matrix& t_sem, const Matrix& t_pos,
                  double lambda_pos) {
  if (t_sem.rows() != t_pos.rows() || t_sem.cols() != t_pos.cols()) {
    throw ShapeError("total_cost shapes differ");
  }
  if (lambda_pos == 0.0) {
    return t_sem;
  }
  return t_sem + lambda_pos * t_pos;
}

ClusteringState merge_most_similar(const ClusteringState& state) {
  if (state.k < 3) {
    throw Error("merge requires at least 3 centroids, have " +
                std::to_string(state.k));
  }
  const Matrix& c = state.centroids;
  Index best_i = 0;
  Index best_j = 1;
  double best_sim = -std::numeric_limits<double>::infinity();
  for (Index i = 0; i < c.rows(); ++i) {
    for (Index j = i + 1; j < c.rows(); ++j) {
      const double ni = c.row(i).norm();
      const double nj = c.row(j).norm();
      const double sim =
          (ni > 0.0 && nj > 0.0) ? c.row(i).dot(c.row(j)) / (ni * nj) : -1.0;
      if (sim > best_sim) {
        best_sim = sim;
        best_i = i;
        best_j = j;
      }
    }
  }

  ClusteringState merged;
  merged.k = state.k - 1;
  merged.centroids = Matrix(state.centroids.rows() - 1, state.centroids.cols());
  merged.indicator = Matrix(state.indicator.rows(), state.k - 1);
  merged.cen_positions = Matrix(state.cen_positions.rows() - 1, 2);

  Index out = 0;
  for (Index j = 0; j < state.centroids.rows(); ++j) {
    if (j == best_j) {
      continue;
    }
    if (j == best_i) {
      merged.centroids.row(out) =
          0.5 * (state.centroids.row(best_i) + state.centroids.row(best_j));
      merged.indicator.col(out) =
          0.5 * (state.indicator.col(best_i) + state.indicator.col(best_j));
      merged.cen_positions.row(out) = 0.5 * (state.cen_positions.row(best_i) +
                                             state.cen_positions.row(best_j));
    } else {
      merged.centroids.row(out) = state.centroids.row(j);
      merged.indicator.col(out) = state.indicator.col(j);
      merged.cen_positions.row(out) = state.cen_positions.row(j);
    }
    ++out;
  }
  return merged;
}

int select_k(const std::vector<std::pair<int, double>>& dc_trace) {
  if (dc_trace.empty()) {
    throw Error("select_k requires a non-empty trace");
  }
  int best_k = dc_trace.front().first;
  double best_dc = dc_trace.front().second;
  for (const auto& [k, dc] : dc_trace) {
    if (dc < best_dc || (dc == best_dc && k < best_k)) {
      best_dc = dc;
      best_k = k;
    }
  }
  return best_k;
}

PruneResult prune(const Matrix& q_view1, const Matrix& q_view2) {
  if (q_view1.cols() != q_view2.cols()) {
    throw ShapeError("prune requires matching column counts, got " +
                     std::to_string(q_view1.cols()) + " and " +
                     std::to_string(q_view2.cols()));
  }
  const Matrix hard1 = hard_assign(q_view1);
  const Matrix hard2 = hard_assign(q_view2);

  std::vector<Index> dropped;
  for (Index j = 0; j < q_view1.cols(); ++j) {
    if (hard1.col(j).sum() == 0.0 || hard2.col(j).sum() == 0.0) {
      dropped.push_back(j);
    }
  }
  if (static_cast<Index>(dropped.size()) == q_view1.cols()) {
    throw EmptyPruneError("pruning dropped every cluster; the views share "
                          "no hard-assigned content");
  }

  PruneResult out;
  out.q_view1 = drop_columns(q_view1, dropped);
  out.q_view2 = drop_columns(q_view2, dropped);
  out.hard_view1 = drop_columns(hard1, dropped);
  out.hard_view2 = drop_columns(hard2, dropped);
  out.dropped = std::move(dropped);
  normalize_rows(out.q_view1);
  normalize_rows(out.q_view2);
  return out;
}

ClusteringResult run_clustering(const ViewPair& vp,
                                const ClusteringConfig& cfg) {
  ClusteringState state = init_centroids(vp, cfg);
  const Matrix& z_cat = vp.joint().z_cat();
  const bool use_positions = cfg.positional_only || cfg.lambda_pos > 0.0;

  auto solve_state = [&](const ClusteringState& s) {
    Matrix t = semantic_cost(vp.joint(), s.centroids);
    if (use_positions) {
      const Matrix t_pos = positional_cost(vp, s.cen_positions);
      t = cfg.positional_only ? t_pos : total_cost(t, t_pos, cfg.lambda_pos);
    }
    const MarginalPair marginals(vp.marginal().weights(),
                                 centroid_marginal(s, vp.marginal()));
    return sinkhorn_solve(t, marginals, cfg.lambda, cfg.tol, cfg.max_iter);
  };

  auto update_centroids = [&](ClusteringState& s, const Matrix& q) {
    s.centroids = q.transpose() * z_cat;
    if (cfg.mass_normalized_update) {
      for (Index j = 0; j < s.centroids.rows(); ++j) {
        const double mass = q.col(j).sum();
        if (mass > 0.0) {
          s.centroids.row(j) /= mass;
        }
      }
    }
  };

  // Burn-in: one unrecorded solve/update. The one-hot initialization keeps
  // raw token rows as centroids, whose norms are a factor ~k larger than
  // the mass-scaled centroids every later step produces; recording d_c
  // against them would make the first trace entry the argmin on any data.
  update_centroids(state, solve_state(state).q);

  ClusteringResult result;
  Matrix best_q;
  double best_dc = std::numeric_limits<double>::infinity();

  for (int k = cfg.k_start; k >= 2; --k) {
    const TransportPlan plan = solve_state(state);

    result.dc_trace.emplace_back(k, plan.cost);
    if (plan.cost <= best_dc) {
      best_dc = plan.cost;
      best_q = plan.q;
    }

    update_centroids(state, plan.q);
    if (k > 2) {
      state = merge_most_similar(state);
    }
  }

  result.k_selected = select_k(result.dc_trace);
  normalize_rows(best_q);

  const Index n = vp.n_per_view();
  auto [q1, q2] = split_assignments(best_q, n);
  PruneResult pruned = prune(q1, q2);
  result.pruned = static_cast<int>(pruned.dropped.size());
  result.q_view1 = std::move(pruned.q_view1);
  result.q_view2 = std::move(pruned.q_view2);
  result.hard_view1 = std::move(pruned.hard_view1);
  result.hard_view2 = std::move(pruned.hard_view2);
  result.q_joint = Matrix(2 * n, result.q_view1.cols());
  result.q_joint.topRows(n) = result.q_view1;
  result.q_joint.bottomRows(n) = result.q_view2;
  return result;
}

MultiHeadResult multi_head_run(std::span<const ViewPair> heads,
                               const ClusteringConfig& cfg) {
  if (heads.empty()) {
    throw InputError("multi_head_run requires at least one head");
  }
  const Index n = heads.front().n_per_view();
  for (const ViewPair& head : heads) {
    if (head.n_per_view() != n) {
      throw ShapeError("all heads must share the per-view token count " +
                       std::to_string(n));
    }
  }

  MultiHeadResult out;
  out.heads.reserve(heads.size());
  Index total_cols = 0;
  for (const ViewPair& head : heads) {
    out.heads.push_back(run_clustering(head, cfg));
    total_cols += out.heads.back().q_view1.cols();
  }

  out.q_view1 = Matrix(n, total_cols);
  out.q_view2 = Matrix(n, total_cols);
  out.hard_view1 = Matrix(n, total_cols);
  out.hard_view2 = Matrix(n, total_cols);
  Index col = 0;
  for (const ClusteringResult& head : out.heads) {
    const Index w = head.q_view1.cols();
    out.q_view1.middleCols(col, w) = head.q_view1;
    out.q_view2.middleCols(col, w) = head.q_view2;
    out.hard_view1.middleCols(col, w) = head.hard_view1;
    out.hard_view2.middleCols(col, w) = head.hard_view2;
    col += w;
  }
  return out;
}

}  // namespace croc
