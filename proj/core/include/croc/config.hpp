#ifndef CROC_CONFIG_HPP_
#define CROC_CONFIG_HPP_

#include <filesystem>
#include <string>

#include "croc/clustering.hpp"

namespace croc {

// Flat key=value run configuration. Unknown or duplicate keys are errors.
struct RunConfig {
  int k_start = 12;
  double lambda = 20.0;
  double lambda_pos = 4.0;
  double tau_t = 0.07;
  double tau_s = 0.1;
  double alpha = 1.0;
  InitPolicy init_policy = InitPolicy::kTopK;
  std::uint64_t seed = 0;
  double tol = 1e-6;
  int max_iter = 200;

  static RunConfig parse(const std::string& text);
  static RunConfig from_file(const std::filesystem::path& path);
  std::string serialize() const;

  ClusteringConfig clustering() const;
  void validate() const;
};

}  // namespace croc

#endif  // CROC_CONFIG_HPP_
