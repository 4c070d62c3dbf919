#include "croc/features.hpp"

#include <cmath>
#include <string>

namespace croc {

namespace {

std::string shape_of(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

}  // namespace

FeatureMatrix::FeatureMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() < 1 || values_.cols() < 1) {
    throw ShapeError("FeatureMatrix must be at least 1x1, got " +
                     shape_of(values_.rows(), values_.cols()));
  }
  if (!values_.allFinite()) {
    throw InputError("FeatureMatrix contains non-finite entries");
  }
}

JointRepresentation::JointRepresentation(Matrix z_cat, Index n_per_view)
    : z_cat_(std::move(z_cat)), n_per_view_(n_per_view) {
  if (n_per_view_ < 1) {
    throw ShapeError("JointRepresentation requires n_per_view >= 1, got " +
                     std::to_string(n_per_view_));
  }
  if (z_cat_.rows() != 2 * n_per_view_) {
    throw ShapeError("JointRepresentation requires 2*" +
                     std::to_string(n_per_view_) + " rows, got " +
                     std::to_string(z_cat_.rows()));
  }
  if (!z_cat_.allFinite()) {
    throw InputError("JointRepresentation contains non-finite entries");
  }
}

AttentionMarginal::AttentionMarginal(Vector weights)
    : weights_(std::move(weights)) {
  if (weights_.size() < 1) {
    throw ShapeError("AttentionMarginal must be non-empty");
  }
  if (!weights_.allFinite() || weights_.minCoeff() < 0.0) {
    throw InputError("AttentionMarginal entries must be finite and >= 0");
  }
  if (std::abs(weights_.sum() - 1.0) > 1e-9) {
    throw InputError("AttentionMarginal must sum to 1 within 1e-9, got sum " +
                     std::to_string(weights_.sum()));
  }
}

AttentionMarginal AttentionMarginal::normalized(Vector raw) {
  if (raw.size() < 1) {
    throw ShapeError("AttentionMarginal must be non-empty");
  }
  if (!raw.allFinite() || raw.minCoeff() < 0.0) {
    throw InputError("AttentionMarginal entries must be finite and >= 0");
  }
  const double total = raw.sum();
  if (total <= 0.0) {
    throw InputError("AttentionMarginal requires positive total weight");
  }
  AttentionMarginal m;
  m.weights_ = raw / total;
  return m;
}

void CropGeometry::validate() const {
  if (width <= 0.0 || height <= 0.0) {
    throw InputError("CropGeometry requires positive width and height");
  }
  if (grid_n < 1) {
    throw InputError("CropGeometry requires grid_n >= 1, got " +
                     std::to_string(grid_n));
  }
}

void CropGeometry::validate_within(double image_w, double image_h) const {
  validate();
  if (x0 < 0.0 || y0 < 0.0 || x0 + width > image_w + 1e-9 ||
      y0 + height > image_h + 1e-9) {
    throw InputError("crop rectangle exceeds the original image bounds");
  }
}

ViewPair::ViewPair(JointRepresentation joint, AttentionMarginal marginal,
                   Matrix positions, double diag_s)
    : joint_(std::move(joint)),
      marginal_(std::move(marginal)),
      positions_(std::move(positions)),
      diag_s_(diag_s) {
  if (marginal_.size() != joint_.rows()) {
    throw ShapeError("marginal length " + std::to_string(marginal_.size()) +
                     " does not match joint row count " +
                     std::to_string(joint_.rows()));
  }
  if (positions_.rows() != joint_.rows() || positions_.cols() != 2) {
    throw ShapeError("positions must be " + std::to_string(joint_.rows()) +
                     "x2, got " + shape_of(positions_.rows(),
                                           positions_.cols()));
  }
  if (!(diag_s_ > 0.0)) {
    throw InputError("diag_s must be > 0");
  }
}

JointRepresentation join(const FeatureMatrix& z1, const FeatureMatrix& z2) {
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw ShapeError("join requires identical shapes, got " +
                     shape_of(z1.rows(), z1.cols()) + " and " +
                     shape_of(z2.rows(), z2.cols()));
  }
  Matrix cat(z1.rows() + z2.rows(), z1.cols());
  cat.topRows(z1.rows()) = z1.values();
  cat.bottomRows(z2.rows()) = z2.values();
  return JointRepresentation(std::move(cat), z1.rows());
}

PositionGrid patch_positions(const CropGeometry& geom) {
  geom.validate();
  const int n = geom.grid_n;
  const double sx = geom.width / n;
  const double sy = geom.height / n;
  Matrix coords(static_cast<Index>(n) * n, 2);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int jj = geom.hflip ? n - 1 - j : j;
      const Index row = static_cast<Index>(i) * n + j;
      coords(row, 0) = geom.x0 + (jj + 0.5) * sx;
      coords(row, 1) = geom.y0 + (i + 0.5) * sy;
    }
  }
  return PositionGrid{std::move(coords)};
}

std::pair<Matrix, Matrix> split_assignments(const Matrix& q,
                                            Index n_per_view) {
  if (n_per_view < 1) {
    throw ShapeError("split_assignments requires n_per_view >= 1, got " +
                     std::to_string(n_per_view));
  }
  if (q.rows() != 2 * n_per_view) {
    throw ShapeError("split_assignments expects 2*" +
                     std::to_string(n_per_view) + " rows, got " +
                     std::to_string(q.rows()));
  }
  return {q.topRows(n_per_view), q.bottomRows(n_per_view)};
}

ViewPair make_view_pair(const FeatureMatrix& z1, const FeatureMatrix& z2,
                        const Vector& attention1, const Vector& attention2,
                        const CropGeometry& geom1, const CropGeometry& geom2,
                        double image_w, double image_h) {
  if (image_w <= 0.0 || image_h <= 0.0) {
    throw InputError("original image dimensions must be positive");
  }
  geom1.validate_within(image_w, image_h);
  geom2.validate_within(image_w, image_h);

  JointRepresentation joint = join(z1, z2);
  const Index n = joint.n_per_view();
  if (static_cast<Index>(geom1.grid_n) * geom1.grid_n != n ||
      static_cast<Index>(geom2.grid_n) * geom2.grid_n != n) {
    throw ShapeError("grid_n^2 must equal the per-view token count " +
                     std::to_string(n));
  }
  if (attention1.size() != n || attention2.size() != n) {
    throw ShapeError("attention vectors must have length " +
                     std::to_string(n));
  }

  Vector att(2 * n);
  att.head(n) = attention1;
  att.tail(n) = attention2;

  Matrix positions(2 * n, 2);
  positions.topRows(n) = patch_positions(geom1).coords;
  positions.bottomRows(n) = patch_positions(geom2).coords;

  const double diag_s = std::hypot(image_w, image_h);
  return ViewPair(std::move(joint), AttentionMarginal::normalized(att),
                  std::move(positions), diag_s);
}

}  // namespace croc
