#ifndef CROC_SEGEVAL_HPP_
#define CROC_SEGEVAL_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "croc/features.hpp"

namespace croc {

// Integer class ids on a pixel/patch grid, row-major.
struct LabelMask {
  int height = 0;
  int width = 0;
  std::vector<int> labels;

  LabelMask() = default;
  LabelMask(int h, int w, std::vector<int> ids);
  std::size_t size() const { return labels.size(); }
};

// Rows are ground truth, columns are predictions.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int n_classes);

  void add(int gt, int pred, std::int64_t count = 1);
  std::int64_t at(int gt, int pred) const;
  std::int64_t total() const { return total_; }
  int classes() const { return n_classes_; }

 private:
  int n_classes_;
  std::int64_t total_ = 0;
  std::vector<std::int64_t> counts_;
};

struct KMeansResult {
  std::vector<int> labels;
  Matrix centroids;                  // k x d
  std::vector<double> inertia_trace;  // inertia after each assignment pass
  int iterations = 0;
};

// Lloyd iterations from k-means++ seeding until assignment fixpoint or
// max_iter. Deterministic given the seed; empty clusters are reseeded to
// the point farthest from its assigned centroid.
KMeansResult kmeans(const Matrix& features, int k, std::uint64_t seed,
                    int max_iter = 100);

// Exact minimum-cost assignment on a square cost matrix; returns the
// matched column of each row.
std::vector<int> hungarian(const Matrix& cost);

struct MiouResult {
  std::vector<double> per_class;  // IoU per class; 0 where absent
  std::vector<bool> present;      // class appears in pred or gt
  double mean = 0.0;              // over present classes only
};

MiouResult miou(const LabelMask& pred, const LabelMask& gt, int n_classes);

// One evaluation item: token features and the ground-truth mask aligned to
// the token grid (mask height*width == feature rows).
struct SegItem {
  Matrix features;
  LabelMask mask;
};

struct UnsupEvalResult {
  double mean_miou = 0.0;            // averaged over seeds
  std::vector<double> per_seed;      // mIoU per seed
  std::vector<double> per_class;     // per-class IoU averaged over seeds
  std::vector<bool> class_present;
};

// K-Means over the pooled features of all items with as many clusters as
// there are classes, Hungarian matching on negated co-occurrence counts,
// then dataset-level mIoU; repeated and averaged over the given seeds.
UnsupEvalResult evaluate_unsupervised(std::span<const SegItem> dataset,
                                      int n_classes,
                                      std::span<const std::uint64_t> seeds);

}  // namespace croc

#endif  // CROC_SEGEVAL_HPP_
