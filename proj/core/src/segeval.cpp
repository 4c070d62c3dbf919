#include "croc/segeval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "croc/rng.hpp"

namespace croc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

int nearest_centroid(const Matrix& centroids,
                     const Eigen::Ref<const Eigen::RowVectorXd>& point,
                     double* dist2_out) {
  int best = 0;
  double best_d = (point - centroids.row(0)).squaredNorm();
  for (Index j = 1; j < centroids.rows(); ++j) {
    const double d = (point - centroids.row(j)).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<int>(j);
    }
  }
  if (dist2_out != nullptr) {
    *dist2_out = best_d;
  }
  return best;
}

}  // namespace

LabelMask::LabelMask(int h, int w, std::vector<int> ids)
    : height(h), width(w), labels(std::move(ids)) {
  if (height < 1 || width < 1) {
    throw ShapeError("LabelMask dimensions must be >= 1");
  }
  if (labels.size() != static_cast<std::size_t>(height) *
                           static_cast<std::size_t>(width)) {
    throw ShapeError("LabelMask payload size " +
                     std::to_string(labels.size()) + " does not match " +
                     std::to_string(height) + "x" + std::to_string(width));
  }
  for (int id : labels) {
    if (id < 0) {
      throw InputError("LabelMask ids must be >= 0");
    }
  }
}

ConfusionMatrix::ConfusionMatrix(int n_classes) : n_classes_(n_classes) {
  if (n_classes < 1) {
    throw InputError("ConfusionMatrix requires n_classes >= 1");
  }
  counts_.assign(static_cast<std::size_t>(n_classes) * n_classes, 0);
}

void ConfusionMatrix::add(int gt, int pred, std::int64_t count) {
  if (gt < 0 || gt >= n_classes_ || pred < 0 || pred >= n_classes_) {
    throw InputError("ConfusionMatrix ids out of range");
  }
  counts_[static_cast<std::size_t>(gt) * n_classes_ + pred] += count;
  total_ += count;
}

std::int64_t ConfusionMatrix::at(int gt, int pred) const {
  return counts_[static_cast<std::size_t>(gt) * n_classes_ + pred];
}

KMeansResult kmeans(const Matrix& features, int k, std::uint64_t seed,
                    int max_iter) {
  const Index m = features.rows();
  if (k < 1 || k > m) {
    throw ConfigError("kmeans requires 1 <= k <= " + std::to_string(m) +
                      ", got " + std::to_string(k));
  }
  if (max_iter < 1) {
    throw ConfigError("kmeans max_iter must be >= 1");
  }

  Rng rng(seed);
  Matrix centroids(k, features.cols());

  // k-means++: first centroid uniform, the rest weighted by squared
  // distance to the nearest chosen centroid.
  centroids.row(0) = features.row(static_cast<Index>(rng.below(m)));
  Vector d2(m);
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (Index i = 0; i < m; ++i) {
      double best = kInf;
      for (int j = 0; j < c; ++j) {
        best = std::min(best, (features.row(i) - centroids.row(j))
                                  .squaredNorm());
      }
      d2[i] = best;
      total += best;
    }
    Index chosen = 0;
    if (total > 0.0) {
      const double u = rng.uniform() * total;
      double acc = 0.0;
      chosen = m - 1;
      for (Index i = 0; i < m; ++i) {
        acc += d2[i];
        if (u < acc) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<Index>(rng.below(m));
    }
    centroids.row(c) = features.row(chosen);
  }

  KMeansResult result;
  result.labels.assign(static_cast<std::size_t>(m), 0);

  auto assign_all = [&]() {
    double inertia = 0.0;
    std::vector<int> labels(static_cast<std::size_t>(m));
    for (Index i = 0; i < m; ++i) {
      double d = 0.0;
      labels[static_cast<std::size_t>(i)] =
          nearest_centroid(centroids, features.row(i), &d);
      inertia += d;
    }
    result.inertia_trace.push_back(inertia);
    return labels;
  };

  result.labels = assign_all();
  for (int it = 0; it < max_iter; ++it) {
    result.iterations = it + 1;

    // Means per cluster.
    Matrix sums = Matrix::Zero(k, features.cols());
    std::vector<Index> counts(static_cast<std::size_t>(k), 0);
    for (Index i = 0; i < m; ++i) {
      const int c = result.labels[static_cast<std::size_t>(i)];
      sums.row(c) += features.row(i);
      ++counts[static_cast<std::size_t>(c)];
    }
    bool reseeded = false;
    std::vector<bool> taken(static_cast<std::size_t>(m), false);
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] > 0) {
        centroids.row(c) =
            sums.row(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      } else {
        // Reseed to the point farthest from its assigned centroid.
        Index far = 0;
        double far_d = -1.0;
        for (Index i = 0; i < m; ++i) {
          if (taken[static_cast<std::size_t>(i)]) {
            continue;
          }
          const int owner = result.labels[static_cast<std::size_t>(i)];
          const double d =
              (features.row(i) - centroids.row(owner)).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centroids.row(c) = features.row(far);
        taken[static_cast<std::size_t>(far)] = true;
        reseeded = true;
      }
    }

    std::vector<int> next = assign_all();
    const bool fixpoint = !reseeded && next == result.labels;
    result.labels = std::move(next);
    if (fixpoint) {
      break;
    }
  }

  result.centroids = std::move(centroids);
  return result;
}

std::vector<int> hungarian(const Matrix& cost) {
  if (cost.rows() != cost.cols()) {
    throw ShapeError("hungarian requires a square matrix, got " +
                     std::to_string(cost.rows()) + "x" +
                     std::to_string(cost.cols()));
  }
  if (!cost.allFinite()) {
    throw InputError("hungarian cost entries must be finite");
  }
  const int n = static_cast<int>(cost.rows());

  // Potentials-based shortest augmenting paths; 1-indexed with a virtual
  // column 0.
  std::vector<double> u(n + 1, 0.0);
  std::vector<double> v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0);
  std::vector<int> way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = -1;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) {
          continue;
        }
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), -1);
  for (int j = 1; j <= n; ++j) {
    if (match[j] != 0) {
      assignment[static_cast<std::size_t>(match[j] - 1)] = j - 1;
    }
  }
  return assignment;
}

MiouResult miou(const LabelMask& pred, const LabelMask& gt, int n_classes) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw ShapeError("miou mask dimensions differ");
  }
  ConfusionMatrix confusion(n_classes);
  for (std::size_t i = 0; i < pred.labels.size(); ++i) {
    confusion.add(gt.labels[i], pred.labels[i]);
  }

  MiouResult out;
  out.per_class.assign(static_cast<std::size_t>(n_classes), 0.0);
  out.present.assign(static_cast<std::size_t>(n_classes), false);
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < n_classes; ++c) {
    const std::size_t idx = static_cast<std::size_t>(c);
    const std::int64_t inter = confusion.at(c, c);
    std::int64_t pred_n = 0;
    std::int64_t gt_n = 0;
    for (int other = 0; other < n_classes; ++other) {
      pred_n += confusion.at(other, c);
      gt_n += confusion.at(c, other);
    }
    const std::int64_t uni = pred_n + gt_n - inter;
    if (uni == 0) {
      continue;  // class absent from both masks: excluded from the mean
    }
    out.present[idx] = true;
    out.per_class[idx] = static_cast<double>(inter) / static_cast<double>(uni);
    sum += out.per_class[idx];
    ++present;
  }
  out.mean = present > 0 ? sum / present : 0.0;
  return out;
}

UnsupEvalResult evaluate_unsupervised(std::span<const SegItem> dataset,
                                      int n_classes,
                                      std::span<const std::uint64_t> seeds) {
  if (dataset.empty()) {
    throw InputError("evaluate_unsupervised requires a non-empty dataset");
  }
  if (seeds.empty()) {
    throw InputError("evaluate_unsupervised requires at least one seed");
  }

  Index total_tokens = 0;
  const Index dim = dataset.front().features.cols();
  for (const SegItem& item : dataset) {
    if (item.features.cols() != dim) {
      throw ShapeError("all items must share the feature dimension");
    }
    if (static_cast<Index>(item.mask.size()) != item.features.rows()) {
      throw ShapeError("mask size must equal the item token count");
    }
    total_tokens += item.features.rows();
  }

  Matrix pooled(total_tokens, dim);
  std::vector<int> gt(static_cast<std::size_t>(total_tokens));
  Index row = 0;
  for (const SegItem& item : dataset) {
    pooled.middleRows(row, item.features.rows()) = item.features;
    for (std::size_t i = 0; i < item.mask.size(); ++i) {
      const int id = item.mask.labels[i];
      if (id >= n_classes) {
        throw InputError("mask ids must be < n_classes");
      }
      gt[static_cast<std::size_t>(row) + i] = id;
    }
    row += item.features.rows();
  }

  UnsupEvalResult out;
  out.per_class.assign(static_cast<std::size_t>(n_classes), 0.0);
  out.class_present.assign(static_cast<std::size_t>(n_classes), false);
  std::vector<int> per_class_hits(static_cast<std::size_t>(n_classes), 0);

  for (const std::uint64_t seed : seeds) {
    const KMeansResult km = kmeans(pooled, n_classes, seed);

    // Cluster-to-class co-occurrence; Hungarian on the negated counts.
    ConfusionMatrix cooc(n_classes);  // rows: gt class, cols: cluster id
    for (std::size_t i = 0; i < gt.size(); ++i) {
      cooc.add(gt[i], km.labels[i]);
    }
    Matrix cost(n_classes, n_classes);
    for (int cluster = 0; cluster < n_classes; ++cluster) {
      for (int cls = 0; cls < n_classes; ++cls) {
        cost(cluster, cls) = -static_cast<double>(cooc.at(cls, cluster));
      }
    }
    const std::vector<int> cluster_to_class = hungarian(cost);

    LabelMask pred(1, static_cast<int>(total_tokens),
                   std::vector<int>(gt.size(), 0));
    for (std::size_t i = 0; i < gt.size(); ++i) {
      pred.labels[i] =
          cluster_to_class[static_cast<std::size_t>(km.labels[i])];
    }
    const LabelMask gt_mask(1, static_cast<int>(total_tokens),
                            std::vector<int>(gt));
    const MiouResult scored = miou(pred, gt_mask, n_classes);
    out.per_seed.push_back(scored.mean);
    for (int c = 0; c < n_classes; ++c) {
      const std::size_t idx = static_cast<std::size_t>(c);
      if (scored.present[idx]) {
        out.per_class[idx] += scored.per_class[idx];
        ++per_class_hits[idx];
        out.class_present[idx] = true;
      }
    }
  }

  double total = 0.0;
  for (const double v : out.per_seed) {
    total += v;
  }
  out.mean_miou = total / static_cast<double>(out.per_seed.size());
  for (int c = 0; c < n_classes; ++c) {
    const std::size_t idx = static_cast<std::size_t>(c);
    if (per_class_hits[idx] > 0) {
      out.per_class[idx] /= per_class_hits[idx];
    }
  }
  return out;
}

}  // namespace croc
