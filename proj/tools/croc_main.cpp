#include <CLI11.hpp>
#include <iostream>

#include "commands.hpp"
#include "croc/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"CrOC cross-view online clustering toolkit"};
  app.require_subcommand(1);

  croc_cli::SynthArgs synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "Generate a synthetic blob dataset");
  synth_cmd->add_option("--blobs", synth.blobs, "Number of Gaussian blobs");
  synth_cmd->add_option("--sep", synth.separation, "Blob center separation");
  synth_cmd->add_option("--sigma", synth.sigma, "Per-coordinate noise");
  synth_cmd->add_option("--n", synth.n_per_view,
                        "Tokens per view (perfect square)");
  synth_cmd->add_option("--d", synth.dim, "Feature dimension");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed");
  synth_cmd->add_option("--overlap", synth.overlap,
                        "Horizontal crop overlap fraction");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")
      ->required();

  croc_cli::ClusterArgs cluster;
  CLI::App* cluster_cmd = app.add_subcommand(
      "cluster", "Run the joint clustering over two views");
  cluster_cmd->add_option("--features-a", cluster.features_a,
                          "View 1 features (CROCFEAT)");
  cluster_cmd->add_option("--features-b", cluster.features_b,
                          "View 2 features (CROCFEAT)");
  cluster_cmd->add_option("--head", cluster.heads,
                          "Per-head feature pair featA:featB (repeatable)");
  cluster_cmd
      ->add_option("--attention", cluster.attention,
                   "Joint attention weights, 2N x 1 (CROCFEAT)")
      ->required();
  cluster_cmd->add_option("--geom-a", cluster.geom_a, "View 1 crop sidecar");
  cluster_cmd->add_option("--geom-b", cluster.geom_b, "View 2 crop sidecar");
  cluster_cmd->add_option("--config", cluster.config, "key=value run config");
  cluster_cmd->add_option("--out-assignments", cluster.out_assignments,
                          "Output joint assignments (CROCFEAT)");
  cluster_cmd->add_option("--out-trace", cluster.out_trace,
                          "Output d_c trace (text)");
  cluster_cmd->add_option("--image-w", cluster.image_w,
                          "Original image width override");
  cluster_cmd->add_option("--image-h", cluster.image_h,
                          "Original image height override");

  croc_cli::LossArgs loss;
  CLI::App* loss_cmd =
      app.add_subcommand("loss", "Evaluate the self-distillation losses");
  loss_cmd->add_option("--features-a", loss.features_a, "View 1 features")
      ->required();
  loss_cmd->add_option("--features-b", loss.features_b, "View 2 features")
      ->required();
  loss_cmd
      ->add_option("--assignments", loss.assignments,
                   "Joint assignments from `cluster`")
      ->required();
  loss_cmd
      ->add_option("--proj-weights", loss.proj_weights,
                   "Projection head, L x (d+1) with bias last (CROCFEAT)")
      ->required();
  loss_cmd->add_option("--config", loss.config, "key=value run config");

  croc_cli::EvalSegArgs eval_seg;
  CLI::App* eval_cmd = app.add_subcommand(
      "eval-seg", "Unsupervised segmentation transfer evaluation");
  eval_cmd
      ->add_option("--dataset-dir", eval_seg.dataset_dir,
                   "Directory of <stem>.feat / <stem>.mask pairs")
      ->required();
  eval_cmd->add_option("--classes", eval_seg.classes, "Number of classes")
      ->required();
  eval_cmd->add_option("--seeds", eval_seg.seeds,
                       "Number of K-Means seeds to average over");

  try {
    app.parse(argc, argv);
    if (synth_cmd->parsed()) {
      return croc_cli::run_synth(synth);
    }
    if (cluster_cmd->parsed()) {
      return croc_cli::run_cluster(cluster);
    }
    if (loss_cmd->parsed()) {
      return croc_cli::run_loss(loss);
    }
    if (eval_cmd->parsed()) {
      return croc_cli::run_eval_seg(eval_seg);
    }
    return 1;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  } catch (const croc::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const croc::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
