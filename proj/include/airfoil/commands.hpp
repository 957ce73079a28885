#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airfoil/dataset.hpp"
#include "airfoil/diffusion.hpp"
#include "airfoil/metrics.hpp"
#include "airfoil/pod.hpp"

namespace airfoil {

// Everything configurable in one document; defaults reproduce the
// reference setup (1,000 airfoils, Re 1e6, alpha 5 deg, 99.5th-percentile
// outlier cut, 600/200/200 split, beta 1e-3 -> 0.2 over T = 1000, 4x32
// tanh network, batch 64, learning rate 1e-4).
struct RunConfig {
  struct Dataset {
    int n_target = 1000;
    SamplingRanges ranges;
    std::uint64_t seed = 42;
    std::string solver = "surrogate";
    double reynolds = 1e6;
    double alpha_deg = 5.0;
    double outlier_percentile = 99.5;
    SplitSizes split_sizes;
    int parallelism = 1;
    double xfoil_timeout_s = 20.0;
  } dataset;

  struct Schedule {
    double beta_start = 1e-3;
    double beta_end = 0.2;
    int t_max = 1000;
  } schedule;

  struct Model {
    int hidden_layers = 4;
    int hidden_width = 32;
  } model;

  TrainConfig training{64, 1e-4, 50, 4000, 7};

  struct Paths {
    std::string dataset = "dataset.csv";
    std::string checkpoint = "checkpoint.json";
    std::string output_dir = "out";
  } paths;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);
RunConfig load_run_config(const std::string& path);

SolverOptions solver_options_from(const RunConfig& cfg);

// Full generation pipeline: rejection-sampled build, Mahalanobis outlier
// filter, top-up back to n_target, split assignment, then CSV plus
// provenance sidecar.
struct GenDatasetResult {
  LabeledDataset dataset;
  std::string csv_path;
  std::string provenance_path;
};

GenDatasetResult cmd_gen_dataset(const RunConfig& cfg);

struct TrainCmdResult {
  Checkpoint checkpoint;
  std::vector<EpochLoss> history;
  int best_epoch = 0;
  double best_validation_loss = 0.0;
  std::string checkpoint_path;
  std::string loss_csv_path;
};

TrainCmdResult cmd_train(const RunConfig& cfg);

struct SampleCmdResult {
  std::vector<CstParams> params;
  std::vector<bool> valid;
  int retry_failures = 0;
  std::string index_csv_path;
  std::vector<std::string> dat_paths;
};

// Generates `count` airfoils conditioned on one feature triple. With
// retry_on_invalid, self-intersecting draws are replaced by fresh ones
// (at most 10 retries each; remaining failures are flagged).
SampleCmdResult cmd_sample(const RunConfig& cfg, const AeroFeatures& features,
                           int count, std::uint64_t seed, bool retry_on_invalid);

struct NearestSummary {
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct EvalCmdResult {
  ErrorReport report;            // includes the C_D-threshold sub-reports
  NearestSummary nearest;        // generated vs. training split
  std::vector<CstParams> generated;
  std::string report_json;
  std::string report_json_path;
  std::string report_text_path;
  std::string generated_csv_path;
};

// Conditions one generation on each test-split feature triple, evaluates
// it with the configured solver and reports the error metrics.
EvalCmdResult cmd_eval(const RunConfig& cfg, std::uint64_t seed,
                       double cd_threshold = 0.01, int max_retries = 10);

struct PodCmdResult {
  ErrorReport report;
  int non_converged = 0;
  std::string report_json;
  std::string report_json_path;
  std::string report_text_path;
  std::string basis_json_path;
};

PodCmdResult cmd_pod_baseline(const RunConfig& cfg, double cd_threshold = 0.01);

enum class PlotMode { airfoils, feature_scatter, forward_process };

PlotMode plot_mode_from_string(const std::string& name);

struct PlotArgs {
  PlotMode mode = PlotMode::airfoils;
  std::vector<std::string> dat_files;  // airfoils mode
  std::string dataset_csv;             // scatter / forward-process modes
  std::string output_svg;
  int row = 0;                 // forward-process: dataset row index
  std::uint64_t seed = 0;      // forward-process: noise seed
  int max_airfoils = 8;        // airfoils-from-CSV cap
};

void cmd_plot(const RunConfig& cfg, const PlotArgs& args);

// Two reports rendered next to each other for comparison.
std::string side_by_side(const std::string& left_title, const std::string& left,
                         const std::string& right_title, const std::string& right);

}  // namespace airfoil
