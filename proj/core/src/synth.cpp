#include "croc/synth.hpp"

#include <cmath>
#include <fstream>
#include <string>

#include "croc/io.hpp"
#include "croc/rng.hpp"

namespace croc {

namespace {

bool is_square(int n, int* root) {
  const int r = static_cast<int>(std::lround(std::sqrt(double(n))));
  *root = r;
  return r * r == n;
}

}  // namespace

SynthData make_synth(const SynthSpec& spec) {
  if (spec.blobs < 1) {
    throw ConfigError("synth requires at least 1 blob");
  }
  if (spec.dim < 1) {
    throw ConfigError("synth requires dim >= 1");
  }
  if (spec.blobs > spec.dim) {
    throw ConfigError("synth requires blobs <= dim so blob centers can sit "
                      "on distinct axes");
  }
  if (spec.sigma < 0.0 || spec.separation < 0.0) {
    throw ConfigError("synth sigma and separation must be >= 0");
  }
  if (spec.overlap < 0.0 || spec.overlap > 1.0) {
    throw ConfigError("synth overlap must lie in [0, 1]");
  }
  int grid_n = 0;
  if (spec.n_per_view < 1 || !is_square(spec.n_per_view, &grid_n)) {
    throw ConfigError("synth n_per_view must be a positive perfect square, "
                      "got " + std::to_string(spec.n_per_view));
  }

  const int n = spec.n_per_view;
  Rng rng(spec.seed);

  // One axis per blob: cross-blob directions are orthogonal while tokens
  // of the same blob stay nearly colinear, and every center is off-origin.
  Matrix centers = Matrix::Zero(spec.blobs, spec.dim);
  for (int b = 0; b < spec.blobs; ++b) {
    centers(b, b) = spec.separation;
  }

  SynthData data;
  data.grid_n = grid_n;
  data.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    // Contiguous blocks over the row-major grid, so blobs are also
    // spatially coherent bands.
    data.labels[static_cast<std::size_t>(i)] =
        static_cast<int>((static_cast<long long>(i) * spec.blobs) / n);
  }

  auto draw_view = [&]() {
    Matrix z(n, spec.dim);
    for (int i = 0; i < n; ++i) {
      const int b = data.labels[static_cast<std::size_t>(i)];
      for (int j = 0; j < spec.dim; ++j) {
        z(i, j) = centers(b, j) + spec.sigma * rng.gaussian();
      }
    }
    return z;
  };
  data.z1 = draw_view();
  data.z2 = draw_view();

  data.attention = Vector::Constant(2 * n, 1.0 / (2.0 * n));

  const double crop = 100.0;
  const double dx = (1.0 - spec.overlap) * crop;
  data.geom1 = CropGeometry{0.0, 0.0, crop, crop, grid_n, false};
  data.geom2 = CropGeometry{dx, 0.0, crop, crop, grid_n, false};
  data.image_w = dx + crop;
  data.image_h = crop;
  return data;
}

ViewPair to_view_pair(const SynthData& data) {
  const Index n = data.z1.rows();
  return make_view_pair(FeatureMatrix(data.z1), FeatureMatrix(data.z2),
                        data.attention.head(n), data.attention.tail(n),
                        data.geom1, data.geom2, data.image_w, data.image_h);
}

void write_synth_dir(const std::filesystem::path& dir, const SynthData& data,
                     const RunConfig& cfg) {
  std::filesystem::create_directories(dir);
  write_features(dir / "view_a.feat", data.z1);
  write_features(dir / "view_b.feat", data.z2);
  write_vector(dir / "attention.att", data.attention);
  write_geometry(dir / "geom_a.txt", data.geom1);
  write_geometry(dir / "geom_b.txt", data.geom2);

  const LabelMask mask(data.grid_n, data.grid_n, data.labels);
  write_mask(dir / "view_a.mask", mask);
  write_mask(dir / "view_b.mask", mask);

  std::ofstream out(dir / "run.cfg.tmp", std::ios::trunc);
  if (!out) {
    throw IoError("cannot write config in " + dir.string());
  }
  out << cfg.serialize();
  out.close();
  std::filesystem::rename(dir / "run.cfg.tmp", dir / "run.cfg");
}

}  // namespace croc
