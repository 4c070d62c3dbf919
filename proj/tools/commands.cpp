#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "croc/clustering.hpp"
#include "croc/config.hpp"
#include "croc/distill.hpp"
#include "croc/io.hpp"
#include "croc/synth.hpp"

namespace croc_cli {

namespace fs = std::filesystem;
using namespace croc;

namespace {

std::string fixed6(double v) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << v;
  return out.str();
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) {
    return RunConfig{};
  }
  return RunConfig::from_file(path);
}

LabelMask resample_nearest(const LabelMask& mask, int out_h, int out_w) {
  std::vector<int> labels(static_cast<std::size_t>(out_h) *
                          static_cast<std::size_t>(out_w));
  for (int i = 0; i < out_h; ++i) {
    const int src_i = std::min(
        mask.height - 1, static_cast<int>((i + 0.5) * mask.height / out_h));
    for (int j = 0; j < out_w; ++j) {
      const int src_j = std::min(
          mask.width - 1, static_cast<int>((j + 0.5) * mask.width / out_w));
      labels[static_cast<std::size_t>(i) * out_w + j] =
          mask.labels[static_cast<std::size_t>(src_i) * mask.width + src_j];
    }
  }
  return LabelMask(out_h, out_w, std::move(labels));
}

ViewPair build_pair(const FeatureMatrix& z1, const FeatureMatrix& z2,
                    const Vector& attention, const ClusterArgs& args,
                    bool needs_positions) {
  const Index n = z1.rows();
  if (attention.size() != 2 * n) {
    throw ShapeError("attention must have 2N = " + std::to_string(2 * n) +
                     " entries, got " + std::to_string(attention.size()));
  }

  if (!needs_positions) {
    return ViewPair(join(z1, z2), AttentionMarginal::normalized(attention),
                    Matrix::Zero(2 * n, 2), 1.0);
  }
  if (args.geom_a.empty() || args.geom_b.empty()) {
    throw ConfigError("positional cost requested (lambda_pos > 0) but "
                      "--geom-a/--geom-b were not given");
  }
  const CropGeometry geom1 = read_geometry(args.geom_a);
  const CropGeometry geom2 = read_geometry(args.geom_b);
  double image_w = args.image_w;
  double image_h = args.image_h;
  if (image_w <= 0.0) {
    image_w = std::max(geom1.x0 + geom1.width, geom2.x0 + geom2.width);
  }
  if (image_h <= 0.0) {
    image_h = std::max(geom1.y0 + geom1.height, geom2.y0 + geom2.height);
  }
  return make_view_pair(z1, z2, attention.head(n), attention.tail(n), geom1,
                        geom2, image_w, image_h);
}

}  // namespace

int run_synth(const SynthArgs& args) {
  SynthSpec spec;
  spec.blobs = args.blobs;
  spec.separation = args.separation;
  spec.sigma = args.sigma;
  spec.n_per_view = args.n_per_view;
  spec.dim = args.dim;
  spec.seed = args.seed;
  spec.overlap = args.overlap;

  RunConfig cfg;
  cfg.seed = args.seed;
  const SynthData data = make_synth(spec);
  write_synth_dir(args.out_dir, data, cfg);
  for (const char* name : {"view_a.feat", "view_b.feat", "attention.att",
                           "geom_a.txt", "geom_b.txt", "view_a.mask",
                           "view_b.mask", "run.cfg"}) {
    std::cout << "wrote " << (fs::path(args.out_dir) / name).string() << "\n";
  }
  return 0;
}

int run_cluster(const ClusterArgs& args) {
  const RunConfig run_cfg = load_config(args.config);
  const ClusteringConfig cfg = run_cfg.clustering();
  const bool needs_positions = cfg.positional_only || cfg.lambda_pos > 0.0;
  const Vector attention = read_vector(args.attention);

  std::vector<ViewPair> pairs;
  if (!args.heads.empty()) {
    for (const std::string& spec : args.heads) {
      const auto colon = spec.find(':');
      if (colon == std::string::npos) {
        throw ConfigError("--head expects featA:featB, got \"" + spec + "\"");
      }
      const FeatureMatrix z1 = read_features(spec.substr(0, colon));
      const FeatureMatrix z2 = read_features(spec.substr(colon + 1));
      pairs.push_back(build_pair(z1, z2, attention, args, needs_positions));
    }
  } else {
    if (args.features_a.empty() || args.features_b.empty()) {
      throw ConfigError("either --features-a/--features-b or repeated "
                        "--head groups are required");
    }
    const FeatureMatrix z1 = read_features(args.features_a);
    const FeatureMatrix z2 = read_features(args.features_b);
    pairs.push_back(build_pair(z1, z2, attention, args, needs_positions));
  }

  const Index n = pairs.front().n_per_view();
  Matrix q_view1;
  Matrix q_view2;
  std::vector<const ClusteringResult*> heads;
  MultiHeadResult multi;
  ClusteringResult single;
  if (pairs.size() == 1) {
    single = run_clustering(pairs.front(), cfg);
    q_view1 = single.q_view1;
    q_view2 = single.q_view2;
    heads.push_back(&single);
  } else {
    multi = multi_head_run(pairs, cfg);
    q_view1 = multi.q_view1;
    q_view2 = multi.q_view2;
    for (const ClusteringResult& head : multi.heads) {
      heads.push_back(&head);
    }
  }

  for (std::size_t h = 0; h < heads.size(); ++h) {
    const ClusteringResult& r = *heads[h];
    double dc_at_selected = 0.0;
    for (const auto& [k, dc] : r.dc_trace) {
      if (k == r.k_selected) {
        dc_at_selected = dc;
      }
    }
    std::cout << "head " << h << " k_selected " << r.k_selected << " retained "
              << r.q_view1.cols() << " pruned " << r.pruned << " dc "
              << fixed6(dc_at_selected) << "\n";
  }
  std::cout << "columns " << q_view1.cols() << "\n";

  if (!args.out_assignments.empty()) {
    Matrix q_joint(2 * n, q_view1.cols());
    q_joint.topRows(n) = q_view1;
    q_joint.bottomRows(n) = q_view2;
    write_features(args.out_assignments, q_joint);
    std::cout << "wrote " << args.out_assignments << "\n";
  }
  if (!args.out_trace.empty()) {
    std::ostringstream trace;
    for (std::size_t h = 0; h < heads.size(); ++h) {
      for (const auto& [k, dc] : heads[h]->dc_trace) {
        trace << h << " " << k << " " << fixed6(dc) << "\n";
      }
    }
    const fs::path path(args.out_trace);
    const fs::path tmp = path.string() + ".tmp";
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) {
      throw IoError("cannot write " + path.string());
    }
    out << trace.str();
    out.close();
    fs::rename(tmp, path);
    std::cout << "wrote " << args.out_trace << "\n";
  }
  return 0;
}

int run_loss(const LossArgs& args) {
  const RunConfig cfg = load_config(args.config);
  const FeatureMatrix z1 = read_features(args.features_a);
  const FeatureMatrix z2 = read_features(args.features_b);
  const FeatureMatrix q_joint = read_features(args.assignments);
  if (z1.rows() != z2.rows() || z1.cols() != z2.cols()) {
    throw ShapeError("feature files must share one shape");
  }
  if (q_joint.rows() != 2 * z1.rows()) {
    throw ShapeError("assignments must have 2N rows");
  }

  // Weights file: L x (d + 1) with the bias in the last column.
  const FeatureMatrix packed = read_features(args.proj_weights);
  if (packed.cols() != z1.cols() + 1) {
    throw ShapeError("projection weights must be L x (d+1) for d = " +
                     std::to_string(z1.cols()));
  }
  const Matrix weight = packed.values().leftCols(z1.cols());
  const Vector bias = packed.values().col(z1.cols());
  const ProjectionParams teacher(weight, bias, cfg.tau_t);
  const ProjectionParams student(weight, bias, cfg.tau_s);

  const auto [q1, q2] = split_assignments(q_joint.values(), z1.rows());
  const Matrix c1 = pool_centroids(z1, q1);
  const Matrix c2 = pool_centroids(z2, q2);

  const double dense =
      dense_loss(project_softmax(c1, teacher), project_softmax(c2, student),
                 project_softmax(c2, teacher), project_softmax(c1, student));

  // Image-level representation: the token mean of each view.
  const Matrix mean1 = z1.values().colwise().mean();
  const Matrix mean2 = z2.values().colwise().mean();
  const Vector pt1 = project_softmax(mean1, teacher).values().row(0);
  const Vector ps1 = project_softmax(mean1, student).values().row(0);
  const Vector pt2 = project_softmax(mean2, teacher).values().row(0);
  const Vector ps2 = project_softmax(mean2, student).values().row(0);
  const double glob = global_loss(pt1, ps2, pt2, ps1);

  const double total = total_loss(dense, glob, LossWeights{cfg.alpha});
  std::cout << "dense " << fixed6(dense) << "\n";
  std::cout << "global " << fixed6(glob) << "\n";
  std::cout << "total " << fixed6(total) << "\n";
  return 0;
}

int run_eval_seg(const EvalSegArgs& args) {
  if (args.classes < 1) {
    throw ConfigError("--classes must be >= 1");
  }
  if (args.seeds < 1) {
    throw ConfigError("--seeds must be >= 1");
  }

  std::vector<fs::path> stems;
  for (const auto& entry : fs::directory_iterator(args.dataset_dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".feat") {
      continue;
    }
    fs::path mask = entry.path();
    mask.replace_extension(".mask");
    if (fs::exists(mask)) {
      stems.push_back(entry.path());
    }
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) {
    throw InputError("no <stem>.feat with matching <stem>.mask found in " +
                     args.dataset_dir);
  }

  std::vector<SegItem> dataset;
  for (const fs::path& feat_path : stems) {
    fs::path mask_path = feat_path;
    mask_path.replace_extension(".mask");
    const FeatureMatrix features = read_features(feat_path);
    LabelMask mask = read_mask(mask_path);
    if (static_cast<Index>(mask.size()) != features.rows()) {
      const int side = static_cast<int>(std::lround(
          std::sqrt(static_cast<double>(features.rows()))));
      if (static_cast<Index>(side) * side != features.rows()) {
        throw ShapeError(feat_path.string() + ": token count " +
                         std::to_string(features.rows()) +
                         " is not a square grid; cannot align the mask");
      }
      mask = resample_nearest(mask, side, side);
    }
    dataset.push_back(SegItem{features.values(), std::move(mask)});
  }

  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(args.seeds));
  for (int s = 0; s < args.seeds; ++s) {
    seeds[static_cast<std::size_t>(s)] = static_cast<std::uint64_t>(s);
  }
  const UnsupEvalResult result =
      evaluate_unsupervised(dataset, args.classes, seeds);

  for (int c = 0; c < args.classes; ++c) {
    const std::size_t idx = static_cast<std::size_t>(c);
    if (result.class_present[idx]) {
      std::cout << "class " << c << " iou " << fixed6(result.per_class[idx])
                << "\n";
    } else {
      std::cout << "class " << c << " absent\n";
    }
  }
  std::cout << "mean_miou " << fixed6(result.mean_miou) << "\n";
  return 0;
}

}  // namespace croc_cli
