#ifndef CROC_SYNTH_HPP_
#define CROC_SYNTH_HPP_

#include <cstdint>
#include <filesystem>
#include <vector>

#include "croc/config.hpp"
#include "croc/features.hpp"
#include "croc/segeval.hpp"

namespace croc {

// Desk-scale oracle data: Gaussian blobs shared by two synthetic crops.
struct SynthSpec {
  int blobs = 2;
  double separation = 20.0;  // distance between adjacent blob centers
  double sigma = 1.0;        // per-coordinate noise
  int n_per_view = 64;       // must be a perfect square
  int dim = 8;
  std::uint64_t seed = 0;
  double overlap = 0.5;      // horizontal crop overlap fraction, [0, 1]
};

struct SynthData {
  Matrix z1;               // view 1 features, N x d
  Matrix z2;               // view 2 features, N x d
  Vector attention;        // uniform joint marginal, length 2N
  CropGeometry geom1;
  CropGeometry geom2;
  double image_w = 0.0;
  double image_h = 0.0;
  std::vector<int> labels;  // per-token blob id, identical in both views
  int grid_n = 0;
};

SynthData make_synth(const SynthSpec& spec);

ViewPair to_view_pair(const SynthData& data);

// Writes view_{a,b}.feat, view_{a,b}.mask, attention.att, geom_{a,b}.txt
// and run.cfg into dir (created if needed). Deterministic given the spec.
void write_synth_dir(const std::filesystem::path& dir, const SynthData& data,
                     const RunConfig& cfg);

}  // namespace croc

#endif  // CROC_SYNTH_HPP_
