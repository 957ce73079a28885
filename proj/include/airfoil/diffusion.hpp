#pragma once

#include <functional>
#include <vector>

#include "airfoil/neural.hpp"
#include "airfoil/rng.hpp"

namespace airfoil {

// beta/alpha/alpha_bar tables for T steps; t indexes 1..T and
// alpha_bar(0) is defined as 1.
struct NoiseSchedule {
  int t_max = 0;
  Vec betas;       // betas[t-1] = beta_t
  Vec alphas;      // alphas[t-1] = 1 - beta_t
  Vec alpha_bars;  // alpha_bars[t-1] = prod_{s<=t} alpha_s

  double beta(int t) const;
  double alpha(int t) const;
  double alpha_bar(int t) const;  // accepts t = 0
};

NoiseSchedule linear_schedule(double beta_start, double beta_end, int t_max);

// Closed-form forward process: sqrt(abar_t) x0 + sqrt(1-abar_t) eps.
Vec forward_noise(const Vec& x0, int t, const Vec& eps,
                  const NoiseSchedule& schedule);

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-4;
  int patience = 50;
  int max_epochs = 4000;
  std::uint64_t seed = 0;
};

// Pre-normalized latent rows with their conditioning features.
struct TrainData {
  Matrix train_x;
  Matrix train_f;
  Matrix val_x;
  Matrix val_f;
};

struct EpochLoss {
  int epoch = 0;
  double train_loss = 0.0;
  double validation_loss = 0.0;
};

struct TrainResult {
  Mlp model;  // parameters from the best validation epoch
  std::vector<EpochLoss> history;
  double best_validation_loss = 0.0;
  int best_epoch = 0;
};

// Noise-prediction training: per row draw t ~ U{1..T} and eps ~ N(0,I),
// minimize mean squared error between eps and the model output at
// [x_t, t/T, f]. Validation uses fresh (t, eps) draws from a fixed
// evaluation seed, so early stopping is deterministic.
TrainResult train(const TrainData& data, const NoiseSchedule& schedule,
                  Mlp model, const TrainConfig& config, Rng& rng);

// One reverse update of the sampling procedure; z must be zero at t = 1.
Vec reverse_step(const Mlp& model, const NoiseSchedule& schedule, const Vec& x_t,
                 int t, const Vec& features_norm, const Vec& z);

// Full reverse loop from a given terminal state; z_at(t) supplies the
// per-step noise (ignored at t = 1).
Vec sample_latent_from(const Mlp& model, const NoiseSchedule& schedule,
                       const Vec& features_norm, Vec x_t,
                       const std::function<Vec(int)>& z_at);

// Full reverse loop drawing x_T and all z from the generator.
Vec sample_latent(const Mlp& model, const NoiseSchedule& schedule,
                  const Vec& features_norm, Rng& rng);

void save_loss_history(const std::vector<EpochLoss>& history,
                       const std::string& path);

}  // namespace airfoil
