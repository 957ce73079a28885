#include "airfoil/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "airfoil/errors.hpp"
#include "airfoil/svg.hpp"

namespace fs = std::filesystem;

namespace airfoil {

namespace {

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EnvironmentError("cannot open for write: " + path);
  out << text;
  if (!out) throw EnvironmentError("write failure: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string provenance_path_for(const std::string& dataset_path) {
  if (dataset_path.size() > 4 &&
      dataset_path.compare(dataset_path.size() - 4, 4, ".csv") == 0) {
    return dataset_path.substr(0, dataset_path.size() - 4) + ".provenance.json";
  }
  return dataset_path + ".provenance.json";
}

void ensure_output_dir(const RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.paths.output_dir, ec);
  if (ec) {
    throw EnvironmentError("cannot create output directory '" + cfg.paths.output_dir +
                           "': " + ec.message());
  }
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (fs::path(dir) / name).string();
}

std::vector<int> hidden_chain(const RunConfig& cfg, int input, int output) {
  std::vector<int> sizes{input};
  for (int l = 0; l < cfg.model.hidden_layers; ++l) sizes.push_back(cfg.model.hidden_width);
  sizes.push_back(output);
  return sizes;
}

CstParams latent_to_params(const Checkpoint& ckpt, const Vec& latent_norm) {
  return CstParams::unflatten(ckpt.param_normalizer.invert(latent_norm));
}

// One conditioned draw with geometry/convergence retries. Returns the
// last generated parameters even when every retry failed.
struct GenerationOutcome {
  CstParams params;
  SolverResult result;
  bool geometry_valid = false;
};

GenerationOutcome generate_and_evaluate(const Checkpoint& ckpt,
                                        const NoiseSchedule& schedule,
                                        const AeroFeatures& target,
                                        const SolverOptions& solver,
                                        const ShapeClass& shape, Rng& rng,
                                        int max_retries) {
  const Vec f_norm =
      ckpt.feature_normalizer.apply({target.cl, target.cd, target.cm});
  GenerationOutcome out;
  out.result.solver_id = to_string(solver.kind);
  for (int attempt = 0; attempt <= max_retries; ++attempt) {
    out.params = latent_to_params(
        ckpt, sample_latent(ckpt.model, schedule, f_norm, rng));
    out.geometry_valid = !is_self_intersecting(out.params, shape);
    if (!out.geometry_valid) continue;
    if (solver.kind == SolverKind::surrogate) {
      out.result = evaluate_surrogate(out.params, shape, solver.op);
    } else {
      std::vector<CstParams> one{out.params};
      out.result = evaluate_batch(one, shape, solver, 1).front();
    }
    if (out.result.converged()) return out;
  }
  out.result.features.reset();  // exhausted retries
  return out;
}

nlohmann::json report_with_nearest_json(const ErrorReport& report,
                                        const NearestSummary& nearest,
                                        int n_geometry_valid, double cd_threshold) {
  nlohmann::json j = nlohmann::json::parse(report.to_json());
  j["nearest_training"] = {{"mean", nearest.mean}, {"min", nearest.min}, {"max", nearest.max}};
  j["n_geometry_valid"] = n_geometry_valid;
  j["cd_threshold"] = cd_threshold;
  return j;
}

std::string params_csv_header() {
  return "a0,l1,l2,l3,l4,l5,u1,u2,u3,u4,u5";
}

std::string params_csv_cells(const CstParams& p) {
  char buf[32];
  std::string line;
  bool first = true;
  for (double v : p.flatten()) {
    if (!first) line += ',';
    first = false;
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    line += buf;
  }
  return line;
}

}  // namespace

std::string run_config_to_json(const RunConfig& cfg) {
  nlohmann::json j;
  j["dataset"] = {{"n_target", cfg.dataset.n_target},
                  {"a0_min", cfg.dataset.ranges.a0_min},
                  {"a0_max", cfg.dataset.ranges.a0_max},
                  {"coeff_min", cfg.dataset.ranges.coeff_min},
                  {"coeff_max", cfg.dataset.ranges.coeff_max},
                  {"seed", cfg.dataset.seed},
                  {"solver", cfg.dataset.solver},
                  {"reynolds", cfg.dataset.reynolds},
                  {"alpha_deg", cfg.dataset.alpha_deg},
                  {"outlier_percentile", cfg.dataset.outlier_percentile},
                  {"split_sizes", {cfg.dataset.split_sizes.train,
                                   cfg.dataset.split_sizes.validation,
                                   cfg.dataset.split_sizes.test}},
                  {"parallelism", cfg.dataset.parallelism},
                  {"xfoil_timeout_s", cfg.dataset.xfoil_timeout_s}};
  j["schedule"] = {{"beta_start", cfg.schedule.beta_start},
                   {"beta_end", cfg.schedule.beta_end},
                   {"t_max", cfg.schedule.t_max}};
  j["model"] = {{"hidden_layers", cfg.model.hidden_layers},
                {"hidden_width", cfg.model.hidden_width}};
  j["training"] = {{"batch_size", cfg.training.batch_size},
                   {"learning_rate", cfg.training.learning_rate},
                   {"patience", cfg.training.patience},
                   {"max_epochs", cfg.training.max_epochs},
                   {"seed", cfg.training.seed}};
  j["paths"] = {{"dataset", cfg.paths.dataset},
                {"checkpoint", cfg.paths.checkpoint},
                {"output_dir", cfg.paths.output_dir}};
  return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: parse failure: ") + e.what());
  }
  RunConfig cfg;
  try {
    if (j.contains("dataset")) {
      const auto& d = j.at("dataset");
      cfg.dataset.n_target = d.value("n_target", cfg.dataset.n_target);
      cfg.dataset.ranges.a0_min = d.value("a0_min", cfg.dataset.ranges.a0_min);
      cfg.dataset.ranges.a0_max = d.value("a0_max", cfg.dataset.ranges.a0_max);
      cfg.dataset.ranges.coeff_min = d.value("coeff_min", cfg.dataset.ranges.coeff_min);
      cfg.dataset.ranges.coeff_max = d.value("coeff_max", cfg.dataset.ranges.coeff_max);
      cfg.dataset.seed = d.value("seed", cfg.dataset.seed);
      cfg.dataset.solver = d.value("solver", cfg.dataset.solver);
      cfg.dataset.reynolds = d.value("reynolds", cfg.dataset.reynolds);
      cfg.dataset.alpha_deg = d.value("alpha_deg", cfg.dataset.alpha_deg);
      cfg.dataset.outlier_percentile =
          d.value("outlier_percentile", cfg.dataset.outlier_percentile);
      if (d.contains("split_sizes")) {
        const auto sizes = d.at("split_sizes").get<std::vector<int>>();
        if (sizes.size() != 3) throw ConfigError("config: split_sizes needs 3 entries");
        cfg.dataset.split_sizes = {sizes[0], sizes[1], sizes[2]};
      }
      cfg.dataset.parallelism = d.value("parallelism", cfg.dataset.parallelism);
      cfg.dataset.xfoil_timeout_s = d.value("xfoil_timeout_s", cfg.dataset.xfoil_timeout_s);
    }
    if (j.contains("schedule")) {
      const auto& s = j.at("schedule");
      cfg.schedule.beta_start = s.value("beta_start", cfg.schedule.beta_start);
      cfg.schedule.beta_end = s.value("beta_end", cfg.schedule.beta_end);
      cfg.schedule.t_max = s.value("t_max", cfg.schedule.t_max);
    }
    if (j.contains("model")) {
      const auto& m = j.at("model");
      cfg.model.hidden_layers = m.value("hidden_layers", cfg.model.hidden_layers);
      cfg.model.hidden_width = m.value("hidden_width", cfg.model.hidden_width);
    }
    if (j.contains("training")) {
      const auto& t = j.at("training");
      cfg.training.batch_size = t.value("batch_size", cfg.training.batch_size);
      cfg.training.learning_rate = t.value("learning_rate", cfg.training.learning_rate);
      cfg.training.patience = t.value("patience", cfg.training.patience);
      cfg.training.max_epochs = t.value("max_epochs", cfg.training.max_epochs);
      cfg.training.seed = t.value("seed", cfg.training.seed);
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      cfg.paths.dataset = p.value("dataset", cfg.paths.dataset);
      cfg.paths.checkpoint = p.value("checkpoint", cfg.paths.checkpoint);
      cfg.paths.output_dir = p.value("output_dir", cfg.paths.output_dir);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: malformed document: ") + e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(read_text_file(path));
}

SolverOptions solver_options_from(const RunConfig& cfg) {
  SolverOptions opts;
  opts.kind = solver_kind_from_string(cfg.dataset.solver);
  opts.op.reynolds = cfg.dataset.reynolds;
  opts.op.alpha_deg = cfg.dataset.alpha_deg;
  opts.timeout_s = cfg.dataset.xfoil_timeout_s;
  return opts;
}

GenDatasetResult cmd_gen_dataset(const RunConfig& cfg) {
  const SolverOptions solver = solver_options_from(cfg);
  const ShapeClass shape;
  Rng rng(cfg.dataset.seed);

  LabeledDataset dataset = build_dataset(cfg.dataset.n_target, solver, rng,
                                         cfg.dataset.ranges, shape,
                                         cfg.dataset.parallelism);
  dataset = mahalanobis_filter(dataset, cfg.dataset.outlier_percentile);
  top_up(dataset, cfg.dataset.n_target, solver, rng, cfg.dataset.ranges, shape,
         cfg.dataset.parallelism);

  Rng split_rng = Rng(cfg.dataset.seed).fork(0x73706c6974ull);  // independent stream
  assign_splits(dataset, cfg.dataset.split_sizes, split_rng);
  dataset.provenance.seed = cfg.dataset.seed;

  GenDatasetResult result;
  result.csv_path = cfg.paths.dataset;
  result.provenance_path = provenance_path_for(cfg.paths.dataset);
  save_csv(dataset, result.csv_path);
  write_text_file(result.provenance_path, provenance_to_json(dataset.provenance));

  std::cout << "dataset: " << dataset.rows.size() << " rows ("
            << cfg.dataset.split_sizes.train << "/" << cfg.dataset.split_sizes.validation
            << "/" << cfg.dataset.split_sizes.test << " split)\n"
            << "rejected geometry: " << dataset.provenance.rejected_geometry
            << ", rejected unconverged: " << dataset.provenance.rejected_unconverged
            << ", filtered outliers: " << dataset.provenance.filtered_outliers << "\n";
  result.dataset = std::move(dataset);
  return result;
}

TrainCmdResult cmd_train(const RunConfig& cfg) {
  const LabeledDataset dataset = load_csv(cfg.paths.dataset);
  const Matrix train_x_raw = dataset.latents(Split::train);
  const Matrix train_f_raw = dataset.features(Split::train);
  const Matrix val_x_raw = dataset.latents(Split::validation);
  const Matrix val_f_raw = dataset.features(Split::validation);
  if (train_x_raw.empty() || val_x_raw.empty()) {
    throw ConfigError("train: dataset has empty train or validation split");
  }

  Checkpoint ckpt;
  ckpt.latent_dim = CstParams::kDim;
  ckpt.feature_dim = 3;
  ckpt.param_normalizer = fit_normalizer(train_x_raw);
  ckpt.feature_normalizer = fit_normalizer(train_f_raw);
  ckpt.beta_start = cfg.schedule.beta_start;
  ckpt.beta_end = cfg.schedule.beta_end;
  ckpt.t_max = cfg.schedule.t_max;

  TrainData data;
  for (const Vec& r : train_x_raw) data.train_x.push_back(ckpt.param_normalizer.apply(r));
  for (const Vec& r : train_f_raw) data.train_f.push_back(ckpt.feature_normalizer.apply(r));
  for (const Vec& r : val_x_raw) data.val_x.push_back(ckpt.param_normalizer.apply(r));
  for (const Vec& r : val_f_raw) data.val_f.push_back(ckpt.feature_normalizer.apply(r));

  const NoiseSchedule schedule =
      linear_schedule(cfg.schedule.beta_start, cfg.schedule.beta_end, cfg.schedule.t_max);

  Rng rng(cfg.training.seed);
  Mlp model(hidden_chain(cfg, ckpt.latent_dim + 1 + ckpt.feature_dim, ckpt.latent_dim), rng);
  TrainResult trained = train(data, schedule, std::move(model), cfg.training, rng);
  ckpt.model = std::move(trained.model);

  ensure_output_dir(cfg);
  TrainCmdResult result;
  result.history = std::move(trained.history);
  result.best_epoch = trained.best_epoch;
  result.best_validation_loss = trained.best_validation_loss;
  result.checkpoint_path = cfg.paths.checkpoint;
  result.loss_csv_path = join_path(cfg.paths.output_dir, "loss_history.csv");
  save_checkpoint(ckpt, result.checkpoint_path);
  save_loss_history(result.history, result.loss_csv_path);
  result.checkpoint = std::move(ckpt);

  std::cout << "trained " << result.history.size() << " epochs; best validation loss "
            << result.best_validation_loss << " at epoch " << result.best_epoch << "\n";
  return result;
}

SampleCmdResult cmd_sample(const RunConfig& cfg, const AeroFeatures& features,
                           int count, std::uint64_t seed, bool retry_on_invalid) {
  if (count < 1) throw ConfigError("sample: count must be >= 1");
  const Checkpoint ckpt = load_checkpoint(cfg.paths.checkpoint);
  if (ckpt.latent_dim != CstParams::kDim || ckpt.feature_dim != 3) {
    throw ConfigError("sample: checkpoint dimensions do not match the airfoil pipeline");
  }
  const NoiseSchedule schedule =
      linear_schedule(ckpt.beta_start, ckpt.beta_end, ckpt.t_max);
  const Vec f_norm = ckpt.feature_normalizer.apply({features.cl, features.cd, features.cm});
  const ShapeClass shape;

  ensure_output_dir(cfg);
  SampleCmdResult result;
  const Rng base(seed);
  std::string index = "file," + params_csv_header() + ",self_intersecting\n";
  for (int k = 0; k < count; ++k) {
    Rng stream = base.fork(static_cast<std::uint64_t>(k));
    CstParams params =
        latent_to_params(ckpt, sample_latent(ckpt.model, schedule, f_norm, stream));
    bool valid = !is_self_intersecting(params, shape);
    if (retry_on_invalid) {
      for (int attempt = 0; attempt < 10 && !valid; ++attempt) {
        params = latent_to_params(ckpt, sample_latent(ckpt.model, schedule, f_norm, stream));
        valid = !is_self_intersecting(params, shape);
      }
      if (!valid) ++result.retry_failures;
    }
    char name[48];
    std::snprintf(name, sizeof(name), "sample_%03d", k);
    const std::string dat_path = join_path(cfg.paths.output_dir, std::string(name) + ".dat");
    write_text_file(dat_path, export_dat(discretize(params, shape, 100), name));
    index += std::string(name) + ".dat," + params_csv_cells(params) + "," +
             (valid ? "0" : "1") + "\n";
    result.params.push_back(params);
    result.valid.push_back(valid);
    result.dat_paths.push_back(dat_path);
  }
  result.index_csv_path = join_path(cfg.paths.output_dir, "samples.csv");
  write_text_file(result.index_csv_path, index);

  if (result.retry_failures > 0) {
    std::cerr << "warning: " << result.retry_failures
              << " sample(s) still self-intersecting after 10 retries\n";
  }
  std::cout << "wrote " << count << " airfoils to " << cfg.paths.output_dir << "\n";
  return result;
}

EvalCmdResult cmd_eval(const RunConfig& cfg, std::uint64_t seed,
                       double cd_threshold, int max_retries) {
  const Checkpoint ckpt = load_checkpoint(cfg.paths.checkpoint);
  if (ckpt.latent_dim != CstParams::kDim || ckpt.feature_dim != 3) {
    throw ConfigError("eval: checkpoint dimensions do not match the airfoil pipeline");
  }
  const LabeledDataset dataset = load_csv(cfg.paths.dataset);
  const SolverOptions solver = solver_options_from(cfg);
  const NoiseSchedule schedule =
      linear_schedule(ckpt.beta_start, ckpt.beta_end, ckpt.t_max);
  const ShapeClass shape;

  std::vector<AeroFeatures> desired;
  for (const DatasetRow& row : dataset.rows) {
    if (row.split == Split::test) desired.push_back(row.features);
  }
  if (desired.empty()) throw ConfigError("eval: dataset has no test split");

  const Rng base(seed);
  std::vector<SolverResult> achieved;
  EvalCmdResult result;
  int n_geometry_valid = 0;
  std::string gen_csv = params_csv_header() +
                        ",desired_cl,desired_cd,desired_cm,achieved_cl,achieved_cd,"
                        "achieved_cm,converged\n";
  char buf[64];
  for (std::size_t i = 0; i < desired.size(); ++i) {
    Rng stream = base.fork(static_cast<std::uint64_t>(i));
    const GenerationOutcome outcome = generate_and_evaluate(
        ckpt, schedule, desired[i], solver, shape, stream, max_retries);
    achieved.push_back(outcome.result);
    result.generated.push_back(outcome.params);
    if (outcome.geometry_valid) ++n_geometry_valid;

    gen_csv += params_csv_cells(outcome.params);
    for (double v : {desired[i].cl, desired[i].cd, desired[i].cm}) {
      std::snprintf(buf, sizeof(buf), ",%.17g", v);
      gen_csv += buf;
    }
    if (outcome.result.converged()) {
      const AeroFeatures& a = *outcome.result.features;
      for (double v : {a.cl, a.cd, a.cm}) {
        std::snprintf(buf, sizeof(buf), ",%.17g", v);
        gen_csv += buf;
      }
      gen_csv += ",1\n";
    } else {
      gen_csv += ",nan,nan,nan,0\n";
    }
  }

  result.report = feature_errors(desired, achieved);
  const ThresholdReport thr =
      errors_by_threshold(desired, achieved, FeatureKey::cd, cd_threshold);
  std::snprintf(buf, sizeof(buf), "%g", cd_threshold);
  if (thr.below) result.report.sub_reports["cd_below_" + std::string(buf)] = *thr.below;
  if (thr.above) result.report.sub_reports["cd_above_" + std::string(buf)] = *thr.above;

  // Nearest training neighbor in geometry space for the valid generations.
  std::vector<SurfaceSamples> train_surfaces;
  for (const DatasetRow& row : dataset.rows) {
    if (row.split == Split::train) train_surfaces.push_back(sample_surfaces(row.params, shape));
  }
  double sum = 0.0, lo = 1e300, hi = -1e300;
  int counted = 0;
  for (std::size_t i = 0; i < result.generated.size(); ++i) {
    if (!achieved[i].converged()) continue;
    const SurfaceSamples gen = sample_surfaces(result.generated[i], shape);
    double best = 1e300;
    for (const SurfaceSamples& t : train_surfaces) {
      best = std::min(best, geometry_distance(gen, t));
    }
    sum += best;
    lo = std::min(lo, best);
    hi = std::max(hi, best);
    ++counted;
  }
  if (counted > 0) result.nearest = {sum / counted, lo, hi};

  ensure_output_dir(cfg);
  const nlohmann::json j = report_with_nearest_json(result.report, result.nearest,
                                                    n_geometry_valid, cd_threshold);
  result.report_json = j.dump(2) + "\n";
  result.report_json_path = join_path(cfg.paths.output_dir, "eval_report.json");
  result.report_text_path = join_path(cfg.paths.output_dir, "eval_report.txt");
  result.generated_csv_path = join_path(cfg.paths.output_dir, "eval_generated.csv");

  std::string text = result.report.to_text();
  std::snprintf(buf, sizeof(buf), "%.6g", result.nearest.mean);
  text += "nearest training distance (mean over converged): " + std::string(buf) + "\n";
  write_text_file(result.report_json_path, result.report_json);
  write_text_file(result.report_text_path, text);
  write_text_file(result.generated_csv_path, gen_csv);

  std::cout << text;
  return result;
}

PodCmdResult cmd_pod_baseline(const RunConfig& cfg, double cd_threshold) {
  const LabeledDataset dataset = load_csv(cfg.paths.dataset);
  const SolverOptions solver = solver_options_from(cfg);
  const ShapeClass shape;

  const Matrix train_x = dataset.latents(Split::train);
  const Matrix train_f = dataset.features(Split::train);
  if (train_x.empty()) throw ConfigError("pod-baseline: dataset has no train split");

  PodBasis basis = compute_pod(train_x);
  fit_feature_map(basis, train_f, train_x);

  std::vector<AeroFeatures> desired;
  for (const DatasetRow& row : dataset.rows) {
    if (row.split == Split::test) desired.push_back(row.features);
  }
  if (desired.empty()) throw ConfigError("pod-baseline: dataset has no test split");

  std::vector<SolverResult> achieved;
  for (const AeroFeatures& f : desired) {
    const CstParams params = pod_generate(basis, f);
    SolverResult r;
    r.solver_id = to_string(solver.kind);
    try {
      if (solver.kind == SolverKind::surrogate) {
        r = evaluate_surrogate(params, shape, solver.op);
      } else {
        std::vector<CstParams> one{params};
        r = evaluate_batch(one, shape, solver, 1).front();
      }
    } catch (const std::invalid_argument&) {
      // self-intersecting deterministic output: counted, not retried
    }
    achieved.push_back(r);
  }

  PodCmdResult result;
  result.report = feature_errors(desired, achieved);
  result.non_converged = result.report.n_not_converged;
  const ThresholdReport thr =
      errors_by_threshold(desired, achieved, FeatureKey::cd, cd_threshold);
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%g", cd_threshold);
  if (thr.below) result.report.sub_reports["cd_below_" + std::string(buf)] = *thr.below;
  if (thr.above) result.report.sub_reports["cd_above_" + std::string(buf)] = *thr.above;

  ensure_output_dir(cfg);
  result.report_json = result.report.to_json();
  result.report_json_path = join_path(cfg.paths.output_dir, "pod_report.json");
  result.report_text_path = join_path(cfg.paths.output_dir, "pod_report.txt");
  result.basis_json_path = join_path(cfg.paths.output_dir, "pod_basis.json");
  write_text_file(result.report_json_path, result.report_json);
  write_text_file(result.report_text_path, result.report.to_text());
  write_text_file(result.basis_json_path, pod_basis_to_json(basis));

  std::cout << result.report.to_text();
  return result;
}

PlotMode plot_mode_from_string(const std::string& name) {
  if (name == "airfoils") return PlotMode::airfoils;
  if (name == "feature-scatter") return PlotMode::feature_scatter;
  if (name == "forward-process") return PlotMode::forward_process;
  throw ConfigError("plot: unknown mode '" + name +
                    "' (expected airfoils, feature-scatter or forward-process)");
}

void cmd_plot(const RunConfig& cfg, const PlotArgs& args) {
  const ShapeClass shape;
  std::string svg;
  switch (args.mode) {
    case PlotMode::airfoils: {
      std::vector<AirfoilPlotEntry> entries;
      for (const std::string& path : args.dat_files) {
        const ImportedAirfoil imported = import_dat(read_text_file(path));
        entries.push_back({imported.name, imported.coords, std::nullopt});
      }
      if (!args.dataset_csv.empty()) {
        const LabeledDataset dataset = load_csv(args.dataset_csv);
        const int n = std::min<int>(args.max_airfoils,
                                    static_cast<int>(dataset.rows.size()));
        for (int i = 0; i < n; ++i) {
          entries.push_back({"row " + std::to_string(i),
                             discretize(dataset.rows[i].params, shape, 100),
                             dataset.rows[i].features});
        }
      }
      if (entries.empty()) throw ConfigError("plot: empty selection");
      svg = render_airfoils_svg(entries);
      break;
    }
    case PlotMode::feature_scatter: {
      const LabeledDataset dataset = load_csv(args.dataset_csv);
      std::vector<AeroFeatures> features;
      for (const DatasetRow& row : dataset.rows) features.push_back(row.features);
      if (features.empty()) throw ConfigError("plot: dataset has no rows");
      svg = render_feature_scatter_svg(features);
      break;
    }
    case PlotMode::forward_process: {
      const LabeledDataset dataset = load_csv(args.dataset_csv);
      if (args.row < 0 || args.row >= static_cast<int>(dataset.rows.size())) {
        throw ConfigError("plot: row index out of range");
      }
      const Matrix train_x = dataset.latents(Split::train);
      if (train_x.size() < 2) throw ConfigError("plot: dataset has no train split");
      const Normalizer norm = fit_normalizer(train_x);
      const auto flat = dataset.rows[args.row].params.flatten();
      const Vec x0 = norm.apply(Vec(flat.begin(), flat.end()));
      const NoiseSchedule schedule = linear_schedule(
          cfg.schedule.beta_start, cfg.schedule.beta_end, cfg.schedule.t_max);
      Rng rng(args.seed);
      Vec eps(x0.size());
      for (double& e : eps) e = rng.normal();

      std::vector<ProcessPanel> panels;
      const int t_max = schedule.t_max;
      for (const int t : {0, t_max / 4, t_max / 2, 3 * t_max / 4, t_max}) {
        const Vec x_t = (t == 0) ? x0 : forward_noise(x0, t, eps, schedule);
        const CstParams p = CstParams::unflatten(norm.invert(x_t));
        panels.push_back({"t = " + std::to_string(t), discretize(p, shape, 100)});
      }
      svg = render_process_svg(panels);
      break;
    }
  }
  write_text_file(args.output_svg, svg);
  std::cout << "wrote " << args.output_svg << "\n";
}

std::string side_by_side(const std::string& left_title, const std::string& left,
                         const std::string& right_title, const std::string& right) {
  auto lines_of = [](const std::string& text) {
    std::vector<std::string> lines;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
  };
  std::vector<std::string> l = lines_of(left);
  std::vector<std::string> r = lines_of(right);
  l.insert(l.begin(), left_title);
  r.insert(r.begin(), right_title);
  std::size_t width = 0;
  for (const std::string& s : l) width = std::max(width, s.size());
  width += 4;
  std::string out;
  for (std::size_t i = 0; i < std::max(l.size(), r.size()); ++i) {
    std::string row = (i < l.size()) ? l[i] : "";
    row.resize(width, ' ');
    if (i < r.size()) row += r[i];
    while (!row.empty() && row.back() == ' ') row.pop_back();
    out += row + "\n";
  }
  return out;
}

}  // namespace airfoil
