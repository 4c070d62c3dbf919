#ifndef CROC_TOOLS_COMMANDS_HPP_
#define CROC_TOOLS_COMMANDS_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace croc_cli {

struct SynthArgs {
  int blobs = 2;
  double separation = 20.0;
  double sigma = 1.0;
  int n_per_view = 64;
  int dim = 8;
  std::uint64_t seed = 0;
  double overlap = 0.5;
  std::string out_dir;
};

struct ClusterArgs {
  std::string features_a;
  std::string features_b;
  std::vector<std::string> heads;  // "featA:featB" per head
  std::string attention;
  std::string geom_a;
  std::string geom_b;
  std::string config;
  std::string out_assignments;
  std::string out_trace;
  double image_w = 0.0;  // 0 means: derive from the crops
  double image_h = 0.0;
};

struct LossArgs {
  std::string features_a;
  std::string features_b;
  std::string assignments;
  std::string proj_weights;
  std::string config;
};

struct EvalSegArgs {
  std::string dataset_dir;
  int classes = 0;
  int seeds = 5;
};

int run_synth(const SynthArgs& args);
int run_cluster(const ClusterArgs& args);
int run_loss(const LossArgs& args);
int run_eval_seg(const EvalSegArgs& args);

}  // namespace croc_cli

#endif  // CROC_TOOLS_COMMANDS_HPP_
