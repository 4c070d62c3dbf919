#ifndef CROC_DISTILL_HPP_
#define CROC_DISTILL_HPP_

#include "croc/features.hpp"

namespace croc {

// Single affine projection to logit space followed by a tempered softmax.
struct ProjectionParams {
  Matrix weight;       // L x d
  Vector bias;         // L
  double temperature;  // > 0

  ProjectionParams(Matrix w, Vector b, double tau);
};

// Row-stochastic probability rows: K x L for cluster-level distributions,
// 1 x L for image-level ones.
class ProbRows {
 public:
  explicit ProbRows(Matrix rows);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

// Object/cluster-level representations: centroid k = sum_n q_{nk} z_n.
Matrix pool_centroids(const FeatureMatrix& z, const Matrix& q);

// Row k = softmax((weight * c_k + bias) / temperature), stable via
// max-subtraction for logit magnitudes up to at least 1e4.
ProbRows project_softmax(const Matrix& centroids, const ProjectionParams& p);

// H(A, B) = -(1/K) sum_k sum_l A_{kl} log(B_{kl}), with B clamped below at
// 1e-12 and A-side zeros contributing exactly 0.
double cross_entropy_rows(const ProbRows& a, const ProbRows& b);

// L_dense = 1/2 (H(P_t1, P_s2) + H(P_t2, P_s1)). Each matched pair must
// share its cluster count.
double dense_loss(const ProbRows& pt1, const ProbRows& ps2,
                  const ProbRows& pt2, const ProbRows& ps1);

// Image-level variant over single probability rows.
double global_loss(const Vector& pt1, const Vector& ps2, const Vector& pt2,
                   const Vector& ps1);

struct LossWeights {
  double alpha = 1.0;
};

// L = alpha * L_dense + L_glob.
double total_loss(double dense, double glob, const LossWeights& w);

}  // namespace croc

#endif  // CROC_DISTILL_HPP_
