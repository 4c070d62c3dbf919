#include "croc/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace croc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Plain scaling updates before Newton refinement kicks in.
constexpr int kWarmupIters = 5;
// The Newton step solves a system on the smaller marginal via a Schur
// complement; beyond this size fall back to scaling updates only.
constexpr Index kNewtonMaxSide = 512;

void check_simplex(const Vector& v, const char* name) {
  if (v.size() < 1) {
    throw ShapeError(std::string(name) + " marginal must be non-empty");
  }
  if (!v.allFinite() || v.minCoeff() < 0.0) {
    throw InputError(std::string(name) +
                     " marginal entries must be finite and >= 0");
  }
  if (std::abs(v.sum() - 1.0) > 1e-9) {
    throw InputError(std::string(name) + " marginal must sum to 1 within " +
                     "1e-9, got " + std::to_string(v.sum()));
  }
}

// logsumexp over each row; a row of all -inf yields -inf.
Vector lse_rows(const Matrix& m) {
  Vector out(m.rows());
  for (Index i = 0; i < m.rows(); ++i) {
    const double mx = m.row(i).maxCoeff();
    if (mx == kNegInf) {
      out[i] = kNegInf;
      continue;
    }
    out[i] = mx + std::log((m.row(i).array() - mx).exp().sum());
  }
  return out;
}

Vector lse_cols(const Matrix& m) {
  Vector out(m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const double mx = m.col(j).maxCoeff();
    if (mx == kNegInf) {
      out[j] = kNegInf;
      continue;
    }
    out[j] = mx + std::log((m.col(j).array() - mx).exp().sum());
  }
  return out;
}

// Solves the reduced problem with strictly positive marginals.
// The coupling is parametrized as q = exp(log_kernel + f (+) g), so the
// scaling form q = diag(u) exp(-lambda t) diag(v) holds by construction.
struct ReducedSolution {
  Matrix q;
  int iterations = 0;
  double marginal_err = 0.0;
};

ReducedSolution solve_positive(const Matrix& log_kernel, const Vector& r,
                               const Vector& c, double tol, int max_iter) {
  const Index n = log_kernel.rows();
  const Index k = log_kernel.cols();
  const Vector log_r = r.array().log();
  const Vector log_c = c.array().log();

  Vector f = Vector::Zero(n);
  Vector g = Vector::Zero(k);
  Matrix q(n, k);

  auto scaling_update = [&]() {
    f = log_r - lse_rows(log_kernel.rowwise() + g.transpose());
    for (Index i = 0; i < n; ++i) {
      if (!std::isfinite(f[i])) {
        throw NumericalError("kernel row " + std::to_string(i) +
                             " vanished during scaling");
      }
    }
    g = log_c - lse_cols(log_kernel.colwise() + f);
    for (Index j = 0; j < k; ++j) {
      if (!std::isfinite(g[j])) {
        throw NumericalError("kernel column " + std::to_string(j) +
                             " vanished during scaling");
      }
    }
  };

  auto realize = [&]() {
    q = ((log_kernel.colwise() + f).rowwise() + g.transpose())
            .array().exp().matrix();
  };

  // Dual objective of the regularized problem, concave in the potentials.
  auto dual = [&](const Vector& ff, const Vector& gg) {
    const double mass = ((log_kernel.colwise() + ff).rowwise() +
                         gg.transpose()).array().exp().sum();
    return ff.dot(r) + gg.dot(c) - mass;
  };

  // One Newton step on (f, g); returns false when no ascent step is found.
  // The Hessian [[diag(a), q], [q^T, diag(b)]] is reduced by a Schur
  // complement on the smaller side, so the dense solve is only
  // min(n,k) x min(n,k).
  auto newton_update = [&]() {
    realize();
    const Vector a = q.rowwise().sum();
    const Vector b = q.colwise().sum().transpose();
    const double mu = 1e-12 * std::max(1.0, a.maxCoeff());
    const Vector grad_f = r - a;
    const Vector grad_g = c - b;

    Vector df(n);
    Vector dg(k);
    if (k <= n) {
      const Vector inv_da = (a.array() + mu).inverse();
      Matrix schur = -(q.transpose() * inv_da.asDiagonal() * q);
      schur.diagonal() += (b.array() + mu).matrix();
      const Vector rhs =
          grad_g - q.transpose() * inv_da.cwiseProduct(grad_f);
      dg = schur.ldlt().solve(rhs);
      df = inv_da.cwiseProduct(grad_f - q * dg);
    } else {
      const Vector inv_db = (b.array() + mu).inverse();
      Matrix schur = -(q * inv_db.asDiagonal() * q.transpose());
      schur.diagonal() += (a.array() + mu).matrix();
      const Vector rhs = grad_f - q * inv_db.cwiseProduct(grad_g);
      df = schur.ldlt().solve(rhs);
      dg = inv_db.cwiseProduct(grad_g - q.transpose() * df);
    }
    if (!df.allFinite() || !dg.allFinite()) {
      return false;
    }

    const double d0 = dual(f, g);
    double alpha = 1.0;
    for (int ls = 0; ls < 30; ++ls) {
      const Vector fn = f + alpha * df;
      const Vector gn = g + alpha * dg;
      const double d1 = dual(fn, gn);
      if (std::isfinite(d1) && d1 > d0) {
        f = fn;
        g = gn;
        return true;
      }
      alpha *= 0.5;
    }
    return false;
  };

  const bool allow_newton = std::min(n, k) <= kNewtonMaxSide;
  ReducedSolution out;
  double err = std::numeric_limits<double>::infinity();
  int it = 0;
  while (it < max_iter) {
    ++it;
    if (it <= kWarmupIters || !allow_newton || !newton_update()) {
      scaling_update();
    }
    realize();
    const double row_err = (q.rowwise().sum() - r).cwiseAbs().maxCoeff();
    const double col_err =
        (q.colwise().sum().transpose() - c).cwiseAbs().maxCoeff();
    err = std::max(row_err, col_err);
    if (err <= tol) {
      break;
    }
  }

  out.q = std::move(q);
  out.iterations = it;
  out.marginal_err = err;
  return out;
}

}  // namespace

MarginalPair::MarginalPair(Vector r_in, Vector c_in)
    : r(std::move(r_in)), c(std::move(c_in)) {
  check_simplex(r, "row");
  check_simplex(c, "column");
}

TransportPlan sinkhorn_solve(const Matrix& t, const MarginalPair& marginals,
                             double lambda, double tol, int max_iter) {
  const Index n = t.rows();
  const Index k = t.cols();
  if (n < 1 || k < 1) {
    throw ShapeError("cost matrix must be at least 1x1");
  }
  if (!t.allFinite()) {
    throw InputError("cost matrix contains non-finite entries");
  }
  if (marginals.r.size() != n || marginals.c.size() != k) {
    throw ShapeError("marginals (" + std::to_string(marginals.r.size()) +
                     ", " + std::to_string(marginals.c.size()) +
                     ") do not match cost matrix " + std::to_string(n) + "x" +
                     std::to_string(k));
  }
  if (!(lambda > 0.0)) {
    throw ConfigError("lambda must be > 0");
  }
  if (!(tol > 0.0) || max_iter < 1) {
    throw ConfigError("tol must be > 0 and max_iter >= 1");
  }

  // Zero-marginal rows/columns carry no mass; solve on the positive support.
  std::vector<Index> rows;
  std::vector<Index> cols;
  for (Index i = 0; i < n; ++i) {
    if (marginals.r[i] > 0.0) {
      rows.push_back(i);
    }
  }
  for (Index j = 0; j < k; ++j) {
    if (marginals.c[j] > 0.0) {
      cols.push_back(j);
    }
  }

  const Index nr = static_cast<Index>(rows.size());
  const Index nc = static_cast<Index>(cols.size());
  Matrix log_kernel(nr, nc);
  Vector r_red(nr);
  Vector c_red(nc);
  for (Index i = 0; i < nr; ++i) {
    r_red[i] = marginals.r[rows[static_cast<std::size_t>(i)]];
    for (Index j = 0; j < nc; ++j) {
      log_kernel(i, j) = -lambda * t(rows[static_cast<std::size_t>(i)],
                                     cols[static_cast<std::size_t>(j)]);
    }
  }
  for (Index j = 0; j < nc; ++j) {
    c_red[j] = marginals.c[cols[static_cast<std::size_t>(j)]];
  }
  if (!log_kernel.allFinite()) {
    throw NumericalError("lambda * cost overflows; rescale the inputs");
  }

  ReducedSolution reduced =
      solve_positive(log_kernel, r_red, c_red, tol, max_iter);

  TransportPlan plan;
  plan.q = Matrix::Zero(n, k);
  for (Index i = 0; i < nr; ++i) {
    for (Index j = 0; j < nc; ++j) {
      plan.q(rows[static_cast<std::size_t>(i)],
             cols[static_cast<std::size_t>(j)]) = reduced.q(i, j);
    }
  }
  plan.iterations = reduced.iterations;
  plan.marginal_err = reduced.marginal_err;
  plan.converged = reduced.marginal_err <= tol;
  plan.cost = transport_cost(plan.q, t);
  return plan;
}

double transport_cost(const Matrix& q, const Matrix& t) {
  if (q.rows() != t.rows() || q.cols() != t.cols()) {
    throw ShapeError("transport_cost shapes differ: " +
                     std::to_string(q.rows()) + "x" + std::to_string(q.cols()) +
                     " vs " + std::to_string(t.rows()) + "x" +
                     std::to_string(t.cols()));
  }
  return q.cwiseProduct(t).sum();
}

}  // namespace croc
