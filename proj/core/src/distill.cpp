#include "croc/distill.hpp"

#include <cmath>
#include <string>

namespace croc {

namespace {

constexpr double kLogClamp = 1e-12;

void check_prob_vector(const Vector& v, const char* name) {
  if (v.size() < 1) {
    throw ShapeError(std::string(name) + " must be non-empty");
  }
  if (!v.allFinite() || v.minCoeff() < 0.0) {
    throw InputError(std::string(name) + " entries must be finite and >= 0");
  }
  if (std::abs(v.sum() - 1.0) > 1e-9) {
    throw InputError(std::string(name) + " must sum to 1 within 1e-9");
  }
}

// -sum_l a_l log(max(b_l, clamp)); zero a-entries contribute exactly 0.
double row_cross_entropy(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                         const Eigen::Ref<const Eigen::RowVectorXd>& b) {
  double acc = 0.0;
  for (Index l = 0; l < a.size(); ++l) {
    if (a[l] == 0.0) {
      continue;
    }
    acc -= a[l] * std::log(std::max(b[l], kLogClamp));
  }
  return acc;
}

}  // namespace

ProjectionParams::ProjectionParams(Matrix w, Vector b, double tau)
    : weight(std::move(w)), bias(std::move(b)), temperature(tau) {
  if (weight.rows() < 1 || weight.cols() < 1) {
    throw ShapeError("projection weight must be at least 1x1");
  }
  if (bias.size() != weight.rows()) {
    throw ShapeError("projection bias length " + std::to_string(bias.size()) +
                     " does not match weight rows " +
                     std::to_string(weight.rows()));
  }
  if (!weight.allFinite() || !bias.allFinite()) {
    throw InputError("projection parameters must be finite");
  }
  if (!(temperature > 0.0)) {
    throw InputError("temperature must be > 0");
  }
}

ProbRows::ProbRows(Matrix rows) : values_(std::move(rows)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw ShapeError("ProbRows must be at least 1x1");
  }
  if (!values_.allFinite() || values_.minCoeff() < 0.0) {
    throw InputError("ProbRows entries must be finite and >= 0");
  }
  for (Index i = 0; i < values_.rows(); ++i) {
    if (std::abs(values_.row(i).sum() - 1.0) > 1e-9) {
      throw InputError("ProbRows row " + std::to_string(i) +
                       " must sum to 1 within 1e-9");
    }
  }
}

Matrix pool_centroids(const FeatureMatrix& z, const Matrix& q) {
  if (q.rows() != z.rows()) {
    throw ShapeError("pool_centroids row counts differ: features " +
                     std::to_string(z.rows()) + ", assignments " +
                     std::to_string(q.rows()));
  }
  return q.transpose() * z.values();
}

ProbRows project_softmax(const Matrix& centroids, const ProjectionParams& p) {
  if (centroids.cols() != p.weight.cols()) {
    throw ShapeError("centroid dim " + std::to_string(centroids.cols()) +
                     " does not match projection dim " +
                     std::to_string(p.weight.cols()));
  }
  Matrix logits =
      ((p.weight * centroids.transpose()).colwise() + p.bias).transpose() /
      p.temperature;
  Matrix probs(logits.rows(), logits.cols());
  for (Index i = 0; i < logits.rows(); ++i) {
    const double mx = logits.row(i).maxCoeff();
    Eigen::RowVectorXd e = (logits.row(i).array() - mx).exp();
    probs.row(i) = e / e.sum();
  }
  return ProbRows(std::move(probs));
}

double cross_entropy_rows(const ProbRows& a, const ProbRows& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError("cross_entropy_rows shapes differ: " +
                     std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()));
  }
  double acc = 0.0;
  for (Index k = 0; k < a.rows(); ++k) {
    acc += row_cross_entropy(a.values().row(k), b.values().row(k));
  }
  return acc / static_cast<double>(a.rows());
}

double dense_loss(const ProbRows& pt1, const ProbRows& ps2,
                  const ProbRows& pt2, const ProbRows& ps1) {
  if (pt1.rows() != ps2.rows() || pt2.rows() != ps1.rows()) {
    throw ShapeError("dense_loss cluster counts differ between matched "
                     "teacher/student pairs");
  }
  return 0.5 * (cross_entropy_rows(pt1, ps2) + cross_entropy_rows(pt2, ps1));
}

double global_loss(const Vector& pt1, const Vector& ps2, const Vector& pt2,
                   const Vector& ps1) {
  check_prob_vector(pt1, "pt1");
  check_prob_vector(ps2, "ps2");
  check_prob_vector(pt2, "pt2");
  check_prob_vector(ps1, "ps1");
  if (pt1.size() != ps2.size() || pt2.size() != ps1.size()) {
    throw ShapeError("global_loss dimensions differ between matched pairs");
  }
  const double h12 = row_cross_entropy(pt1.transpose(), ps2.transpose());
  const double h21 = row_cross_entropy(pt2.transpose(), ps1.transpose());
  return 0.5 * (h12 + h21);
}

double total_loss(double dense, double glob, const LossWeights& w) {
  if (!std::isfinite(dense) || !std::isfinite(glob)) {
    throw InputError("total_loss requires finite inputs");
  }
  if (w.alpha < 0.0) {
    throw InputError("loss weight alpha must be >= 0");
  }
  return w.alpha * dense + glob;
}

}  // namespace croc
