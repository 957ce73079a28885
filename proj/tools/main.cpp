#include <exception>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "airfoil/commands.hpp"
#include "airfoil/errors.hpp"

using airfoil::RunConfig;

namespace {

// Every config key is exposed as a flag; flags win over --config values
// because the file is loaded before parsing.
void add_config_options(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--config", "JSON config file (loaded first, flags override)")
      ->check(CLI::ExistingFile);

  cmd->add_option("--n-target", cfg.dataset.n_target, "dataset rows to generate")
      ->capture_default_str();
  cmd->add_option("--a0-min", cfg.dataset.ranges.a0_min, "leading-edge coefficient lower bound")
      ->capture_default_str();
  cmd->add_option("--a0-max", cfg.dataset.ranges.a0_max, "leading-edge coefficient upper bound")
      ->capture_default_str();
  cmd->add_option("--coeff-min", cfg.dataset.ranges.coeff_min, "Bernstein coefficient lower bound")
      ->capture_default_str();
  cmd->add_option("--coeff-max", cfg.dataset.ranges.coeff_max, "Bernstein coefficient upper bound")
      ->capture_default_str();
  cmd->add_option("--dataset-seed", cfg.dataset.seed, "dataset generation seed")
      ->capture_default_str();
  cmd->add_option("--solver", cfg.dataset.solver, "feature solver: surrogate or xfoil")
      ->capture_default_str();
  cmd->add_option("--reynolds", cfg.dataset.reynolds, "Reynolds number")
      ->capture_default_str();
  cmd->add_option("--alpha-deg", cfg.dataset.alpha_deg, "angle of attack [deg]")
      ->capture_default_str();
  cmd->add_option("--outlier-percentile", cfg.dataset.outlier_percentile,
                  "Mahalanobis removal percentile")
      ->capture_default_str();
  cmd->add_option("--split", [&cfg](const std::vector<std::string>& vals) {
        if (vals.size() != 3) return false;
        cfg.dataset.split_sizes = {std::stoi(vals[0]), std::stoi(vals[1]),
                                   std::stoi(vals[2])};
        return true;
      },
      "train/validation/test sizes (default 600 200 200)")
      ->expected(3);
  cmd->add_option("--parallelism", cfg.dataset.parallelism, "solver workers")
      ->capture_default_str();
  cmd->add_option("--xfoil-timeout", cfg.dataset.xfoil_timeout_s, "per-run timeout [s]")
      ->capture_default_str();

  cmd->add_option("--beta-start", cfg.schedule.beta_start, "first noise variance")
      ->capture_default_str();
  cmd->add_option("--beta-end", cfg.schedule.beta_end, "last noise variance")
      ->capture_default_str();
  cmd->add_option("--t-max", cfg.schedule.t_max, "diffusion steps T")
      ->capture_default_str();

  cmd->add_option("--hidden-layers", cfg.model.hidden_layers, "hidden layer count")
      ->capture_default_str();
  cmd->add_option("--hidden-width", cfg.model.hidden_width, "neurons per hidden layer")
      ->capture_default_str();

  cmd->add_option("--batch-size", cfg.training.batch_size, "training batch size")
      ->capture_default_str();
  cmd->add_option("--learning-rate", cfg.training.learning_rate, "Adam learning rate")
      ->capture_default_str();
  cmd->add_option("--patience", cfg.training.patience,
                  "epochs without validation improvement before stopping")
      ->capture_default_str();
  cmd->add_option("--max-epochs", cfg.training.max_epochs, "epoch cap")
      ->capture_default_str();
  cmd->add_option("--train-seed", cfg.training.seed, "training seed")
      ->capture_default_str();

  cmd->add_option("--dataset", cfg.paths.dataset, "dataset CSV path")
      ->capture_default_str();
  cmd->add_option("--checkpoint", cfg.paths.checkpoint, "checkpoint JSON path")
      ->capture_default_str();
  cmd->add_option("--output-dir", cfg.paths.output_dir, "directory for generated artifacts")
      ->capture_default_str();
}

RunConfig preload_config(int argc, char** argv) {
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") {
      return airfoil::load_run_config(argv[i + 1]);
    }
  }
  return RunConfig{};
}

}  // namespace

int main(int argc, char** argv) {
  RunConfig cfg;
  try {
    cfg = preload_config(argc, argv);
  } catch (const airfoil::EnvironmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  CLI::App app{
      "Conditional diffusion over a Bernstein-polynomial airfoil latent space:\n"
      "dataset generation, training, conditional sampling, POD baseline,\n"
      "evaluation and SVG export.\n"
      "Exit codes: 0 success, 1 domain/config error, 2 I/O or environment error."};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen-dataset", "generate the labeled airfoil dataset");
  add_config_options(gen, cfg);

  auto* train_cmd = app.add_subcommand("train", "train the noise estimator");
  add_config_options(train_cmd, cfg);
  bool resume = false;
  train_cmd->add_flag("--resume", resume, "resume from an existing checkpoint (unsupported)");

  auto* sample_cmd =
      app.add_subcommand("sample", "generate airfoils for one feature triple");
  add_config_options(sample_cmd, cfg);
  std::vector<double> feature_vals;
  int sample_count = 10;
  std::uint64_t sample_seed = 0;
  bool retry_on_invalid = false;
  sample_cmd->add_option("--features", feature_vals, "target cl cd cm")
      ->expected(3)
      ->required();
  sample_cmd->add_option("--count", sample_count, "airfoils to generate")
      ->capture_default_str();
  sample_cmd->add_option("--seed", sample_seed, "sampling seed")->capture_default_str();
  sample_cmd->add_flag("--retry-on-invalid", retry_on_invalid,
                       "replace self-intersecting outputs (max 10 retries each)");

  auto* eval_cmd =
      app.add_subcommand("eval", "condition on the test-split features and report errors");
  add_config_options(eval_cmd, cfg);
  std::uint64_t eval_seed = 777;
  double cd_threshold = 0.01;
  int max_retries = 10;
  eval_cmd->add_option("--seed", eval_seed, "generation seed")->capture_default_str();
  eval_cmd->add_option("--cd-threshold", cd_threshold, "drag split for the sub-reports")
      ->capture_default_str();
  eval_cmd->add_option("--max-retries", max_retries, "regenerations per test row")
      ->capture_default_str();

  auto* pod_cmd = app.add_subcommand("pod-baseline",
                                     "interpolation baseline on the same test features");
  add_config_options(pod_cmd, cfg);
  double pod_cd_threshold = 0.01;
  pod_cmd->add_option("--cd-threshold", pod_cd_threshold, "drag split for the sub-reports")
      ->capture_default_str();

  auto* plot_cmd = app.add_subcommand("plot", "render SVG figures");
  add_config_options(plot_cmd, cfg);
  airfoil::PlotArgs plot_args;
  std::string plot_mode = "airfoils";
  plot_cmd->add_option("--mode", plot_mode,
                       "airfoils | feature-scatter | forward-process")
      ->capture_default_str();
  plot_cmd->add_option("--dat", plot_args.dat_files, "input .dat files (airfoils mode)");
  plot_cmd->add_option("--csv", plot_args.dataset_csv, "input dataset CSV");
  plot_cmd->add_option("--row", plot_args.row, "dataset row (forward-process mode)")
      ->capture_default_str();
  plot_cmd->add_option("--plot-seed", plot_args.seed, "noise seed (forward-process mode)")
      ->capture_default_str();
  plot_cmd->add_option("--max-airfoils", plot_args.max_airfoils,
                       "row cap for airfoils-from-CSV")
      ->capture_default_str();
  plot_cmd->add_option("--out", plot_args.output_svg, "output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) {
      airfoil::cmd_gen_dataset(cfg);
    } else if (train_cmd->parsed()) {
      if (resume) {
        throw airfoil::ConfigError("train: resume-from-checkpoint is not supported");
      }
      airfoil::cmd_train(cfg);
    } else if (sample_cmd->parsed()) {
      airfoil::cmd_sample(cfg, {feature_vals[0], feature_vals[1], feature_vals[2]},
                          sample_count, sample_seed, retry_on_invalid);
    } else if (eval_cmd->parsed()) {
      airfoil::cmd_eval(cfg, eval_seed, cd_threshold, max_retries);
    } else if (pod_cmd->parsed()) {
      airfoil::cmd_pod_baseline(cfg, pod_cd_threshold);
    } else if (plot_cmd->parsed()) {
      plot_args.mode = airfoil::plot_mode_from_string(plot_mode);
      airfoil::cmd_plot(cfg, plot_args);
    }
  } catch (const airfoil::EnvironmentError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::ios_base::failure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
