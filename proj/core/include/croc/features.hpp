#ifndef CROC_FEATURES_HPP_
#define CROC_FEATURES_HPP_

#include <Eigen/Dense>
#include <utility>

#include "croc/errors.hpp"

namespace croc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// N x d token representations of one view. Immutable after construction;
// construction rejects empty shapes and non-finite entries.
class FeatureMatrix {
 public:
  explicit FeatureMatrix(Matrix values);

  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }
  const Matrix& values() const { return values_; }

 private:
  Matrix values_;
};

// 2N x d concatenation of two views along the token axis.
// Rows [0, N) are view 1, rows [N, 2N) are view 2.
class JointRepresentation {
 public:
  JointRepresentation(Matrix z_cat, Index n_per_view);

  Index n_per_view() const { return n_per_view_; }
  Index rows() const { return z_cat_.rows(); }
  Index dim() const { return z_cat_.cols(); }
  const Matrix& z_cat() const { return z_cat_; }

 private:
  Matrix z_cat_;
  Index n_per_view_;
};

// Length-2N token distribution, nonnegative and summing to 1.
// The two per-view attention vectors are concatenated and renormalized.
class AttentionMarginal {
 public:
  // Accepts an already-normalized simplex vector.
  explicit AttentionMarginal(Vector weights);

  // Renormalizes an arbitrary nonnegative vector to the simplex.
  static AttentionMarginal normalized(Vector raw);

  Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }

 private:
  AttentionMarginal() = default;
  Vector weights_;
};

// Placement of a crop in the original-image pixel frame, plus the patch
// grid resolution of the view and whether the view was horizontally flipped.
struct CropGeometry {
  double x0 = 0.0;
  double y0 = 0.0;
  double width = 0.0;
  double height = 0.0;
  int grid_n = 0;
  bool hflip = false;

  // Local invariants: width > 0, height > 0, grid_n >= 1.
  void validate() const;
  // Local invariants plus containment in [0, image_w] x [0, image_h].
  void validate_within(double image_w, double image_h) const;
};

// N x 2 patch-center coordinates in original-image pixels.
struct PositionGrid {
  Matrix coords;
};

// Everything the clustering consumes for one image: the joint token
// features, the joint token distribution, the concatenated patch
// coordinates, and the positional normalization constant (in pixels).
class ViewPair {
 public:
  ViewPair(JointRepresentation joint, AttentionMarginal marginal,
           Matrix positions, double diag_s);

  const JointRepresentation& joint() const { return joint_; }
  const AttentionMarginal& marginal() const { return marginal_; }
  const Matrix& positions() const { return positions_; }
  double diag_s() const { return diag_s_; }
  Index n_per_view() const { return joint_.n_per_view(); }

 private:
  JointRepresentation joint_;
  AttentionMarginal marginal_;
  Matrix positions_;
  double diag_s_;
};

// Concatenates two views along the token axis. Values are copied bit-exactly.
JointRepresentation join(const FeatureMatrix& z1, const FeatureMatrix& z2);

// Patch-center coordinates of a crop, row-major over the grid. A horizontal
// flip mirrors the column index so coordinates stay in the original frame.
PositionGrid patch_positions(const CropGeometry& geom);

// Splits a joint 2N x K assignment into per-view N x K halves.
std::pair<Matrix, Matrix> split_assignments(const Matrix& q, Index n_per_view);

// Assembles a ViewPair from per-view inputs. Attention vectors are
// concatenated and renormalized; positions come from the patch grids;
// diag_s is the length of the original image's diagonal, which keeps
// every positional cost entry in [0, 1].
ViewPair make_view_pair(const FeatureMatrix& z1, const FeatureMatrix& z2,
                        const Vector& attention1, const Vector& attention2,
                        const CropGeometry& geom1, const CropGeometry& geom2,
                        double image_w, double image_h);

}  // namespace croc

#endif  // CROC_FEATURES_HPP_
