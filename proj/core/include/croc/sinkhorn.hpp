#ifndef CROC_SINKHORN_HPP_
#define CROC_SINKHORN_HPP_

#include "croc/features.hpp"

namespace croc {

// Row and column marginals of the transportation polytope U(r, c).
struct MarginalPair {
  Vector r;  // token distribution, length 2N
  Vector c;  // centroid distribution, length K

  MarginalPair(Vector r_in, Vector c_in);
};

// Solution of the entropy-regularized transport problem
//   min_{Q in U(r,c)}  <Q, T> - (1/lambda) H(Q).
struct TransportPlan {
  Matrix q;                  // 2N x K nonnegative coupling
  double cost = 0.0;         // <Q, T>, the clustering-quality score d_c
  int iterations = 0;        // Sinkhorn iterations performed
  double marginal_err = 0.0; // max |Q 1 - r| and |Q^T 1 - c| at exit
  bool converged = false;    // marginal_err <= tol
};

// Log-domain Sinkhorn-Knopp. Larger lambda sharpens the plan. Non-convergence
// within max_iter is reported in the plan, not thrown.
TransportPlan sinkhorn_solve(const Matrix& cost, const MarginalPair& marginals,
                             double lambda, double tol = 1e-6,
                             int max_iter = 200);

// <Q, T>: entry-wise product followed by a sum reduction.
double transport_cost(const Matrix& q, const Matrix& cost);

}  // namespace croc

#endif  // CROC_SINKHORN_HPP_
