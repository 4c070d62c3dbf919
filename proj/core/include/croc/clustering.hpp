#ifndef CROC_CLUSTERING_HPP_
#define CROC_CLUSTERING_HPP_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "croc/features.hpp"
#include "croc/sinkhorn.hpp"

namespace croc {

enum class InitPolicy {
  kTopK,        // deterministic: the k_start largest attention weights
  kMultinomial  // seeded sampling without replacement, weighted by attention
};

struct ClusteringConfig {
  int k_start = 12;
  double lambda = 20.0;
  double lambda_pos = 4.0;
  InitPolicy init_policy = InitPolicy::kTopK;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 200;
  // Replaces the total cost with the positional cost alone (the
  // "lambda_pos = infinity" setting).
  bool positional_only = false;
  // Off-by-default variant that divides each updated centroid by its
  // assignment column mass. The default follows C^T = Z^T Q* verbatim.
  bool mass_normalized_update = false;

  void validate(Index joint_tokens) const;
};

// Mutable loop state: current centroids, the indicator built from one-hot
// columns and averaged by merges, and the centroid positions.
struct ClusteringState {
  Matrix centroids;      // k x d
  Matrix indicator;      // 2N x k, columns nonnegative and summing to 1
  Matrix cen_positions;  // k x 2
  int k = 0;
};

struct ClusteringResult {
  Matrix q_joint;             // 2N x K', row-normalized, pruned
  Matrix q_view1;             // N x K'
  Matrix q_view2;             // N x K'
  Matrix hard_view1;          // N x K' binary
  Matrix hard_view2;          // N x K' binary
  int k_selected = 0;         // argmin of the d_c trace (ties -> smaller k)
  std::vector<std::pair<int, double>> dc_trace;  // (k, d_c), k_start..2
  int pruned = 0;             // columns dropped by prune()
};

struct PruneResult {
  Matrix q_view1;
  Matrix q_view2;
  Matrix hard_view1;
  Matrix hard_view2;
  std::vector<Index> dropped;  // dropped column indices, ascending
};

struct MultiHeadResult {
  Matrix q_view1;     // N x sum of per-head retained columns
  Matrix q_view2;
  Matrix hard_view1;
  Matrix hard_view2;
  std::vector<ClusteringResult> heads;  // per-head results, in input order
};

// Selects k_start tokens as initial centroids: indicator gets one-hot
// columns, centroids = Y^T Z_cat, positions = Y^T E_cat.
ClusteringState init_centroids(const ViewPair& vp,
                               const ClusteringConfig& cfg);

// T^(sem) = -Z_cat C^T: raw negated dot products, no normalization.
Matrix semantic_cost(const JointRepresentation& joint,
                     const Matrix& centroids);

// c = softmax(Y^T r) at unit temperature.
Vector centroid_marginal(const ClusteringState& state,
                         const AttentionMarginal& r);

// T^(pos)_{ij} = ||e_cat_i - e_cen_j||_2 / S; entries lie in [0, 1].
Matrix positional_cost(const ViewPair& vp, const Matrix& cen_positions);

// T^(tot) = T^(sem) + lambda_pos * T^(pos). lambda_pos = 0 returns T^(sem)
// bit-exactly.
Matrix total_cost(const Matrix& t_sem, const Matrix& t_pos,
                  double lambda_pos);

// Merges the centroid pair with the highest cosine similarity (ties ->
// lexicographically smallest pair). The survivor's indicator column,
// centroid row and position become the arithmetic mean of the parents.
ClusteringState merge_most_similar(const ClusteringState& state);

// argmin of d_c over the trace; ties prefer the smaller k.
int select_k(const std::vector<std::pair<int, double>>& dc_trace);

// Hard-assigns each row to its argmax column (ties -> lowest index), drops
// every column left empty in either view, renormalizes the surviving soft
// rows. Throws EmptyPruneError when nothing survives.
PruneResult prune(const Matrix& q_view1, const Matrix& q_view2);

// The full join-locate-split loop: init from attention, then for
// k = k_start .. 2 build the cost, solve Sinkhorn, record (k, d_c), update
// centroids, merge; finally row-normalize and prune the assignment recorded
// at the trace argmin.
ClusteringResult run_clustering(const ViewPair& vp,
                                const ClusteringConfig& cfg);

// Runs the loop independently per head and concatenates the pruned
// assignment matrices along the column axis.
MultiHeadResult multi_head_run(std::span<const ViewPair> heads,
                               const ClusteringConfig& cfg);

}  // namespace croc

#endif  // CROC_CLUSTERING_HPP_
