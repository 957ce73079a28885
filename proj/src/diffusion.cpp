#include "airfoil/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace airfoil {

double NoiseSchedule::beta(int t) const {
  if (t < 1 || t > t_max) throw std::out_of_range("NoiseSchedule::beta: t out of range");
  return betas[t - 1];
}

double NoiseSchedule::alpha(int t) const {
  if (t < 1 || t > t_max) throw std::out_of_range("NoiseSchedule::alpha: t out of range");
  return alphas[t - 1];
}

double NoiseSchedule::alpha_bar(int t) const {
  if (t == 0) return 1.0;
  if (t < 0 || t > t_max) throw std::out_of_range("NoiseSchedule::alpha_bar: t out of range");
  return alpha_bars[t - 1];
}

NoiseSchedule linear_schedule(double beta_start, double beta_end, int t_max) {
  if (t_max < 1) throw std::invalid_argument("linear_schedule: t_max must be >= 1");
  if (!(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0)) {
    throw std::invalid_argument("linear_schedule: need 0 < beta_start <= beta_end < 1");
  }
  NoiseSchedule s;
  s.t_max = t_max;
  s.betas.resize(t_max);
  s.alphas.resize(t_max);
  s.alpha_bars.resize(t_max);
  double running = 1.0;
  for (int t = 1; t <= t_max; ++t) {
    const double frac = (t_max == 1) ? 0.0 : static_cast<double>(t - 1) / (t_max - 1);
    s.betas[t - 1] = beta_start + frac * (beta_end - beta_start);
    s.alphas[t - 1] = 1.0 - s.betas[t - 1];
    running *= s.alphas[t - 1];
    s.alpha_bars[t - 1] = running;
  }
  return s;
}

Vec forward_noise(const Vec& x0, int t, const Vec& eps,
                  const NoiseSchedule& schedule) {
  if (t < 1 || t > schedule.t_max) throw std::out_of_range("forward_noise: t out of range");
  if (x0.size() != eps.size()) throw std::invalid_argument("forward_noise: size mismatch");
  const double signal = std::sqrt(schedule.alpha_bar(t));
  const double noise = std::sqrt(1.0 - schedule.alpha_bar(t));
  Vec out(x0.size());
  for (std::size_t i = 0; i < x0.size(); ++i) out[i] = signal * x0[i] + noise * eps[i];
  return out;
}

namespace {

// Input layout: [x_t (latent), t/T, features].
Vec make_input(const Vec& x_t, int t, int t_max, const Vec& features) {
  Vec input;
  input.reserve(x_t.size() + 1 + features.size());
  input.insert(input.end(), x_t.begin(), x_t.end());
  input.push_back(static_cast<double>(t) / t_max);
  input.insert(input.end(), features.begin(), features.end());
  return input;
}

// Draws (t, eps), forms (input, target) pairs for one pass over rows.
void fill_noise_batch(const Matrix& xs, const Matrix& fs,
                      const std::vector<int>& order, std::size_t begin,
                      std::size_t end, const NoiseSchedule& schedule, Rng& rng,
                      Matrix& inputs, Matrix& targets) {
  inputs.clear();
  targets.clear();
  for (std::size_t k = begin; k < end; ++k) {
    const int row = order[k];
    const int t = 1 + static_cast<int>(rng.integer(static_cast<std::uint64_t>(schedule.t_max)));
    Vec eps(xs[row].size());
    for (double& e : eps) e = rng.normal();
    inputs.push_back(make_input(forward_noise(xs[row], t, eps, schedule), t,
                                schedule.t_max, fs[row]));
    targets.push_back(std::move(eps));
  }
}

double validation_loss(const Mlp& model, const Matrix& xs, const Matrix& fs,
                       const NoiseSchedule& schedule, std::uint64_t eval_seed) {
  Rng rng(eval_seed);
  std::vector<int> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  Matrix inputs, targets;
  fill_noise_batch(xs, fs, order, 0, xs.size(), schedule, rng, inputs, targets);
  return batch_loss(model, inputs, targets);
}

}  // namespace

TrainResult train(const TrainData& data, const NoiseSchedule& schedule,
                  Mlp model, const TrainConfig& config, Rng& rng) {
  if (data.train_x.empty() || data.val_x.empty()) {
    throw std::invalid_argument("train: empty split");
  }
  if (data.train_x.size() != data.train_f.size() ||
      data.val_x.size() != data.val_f.size()) {
    throw std::invalid_argument("train: latent/feature row counts differ");
  }
  if (config.batch_size < 1 || config.patience < 1) {
    throw std::invalid_argument("train: batch_size and patience must be >= 1");
  }

  // Fixed per-run evaluation stream, independent of the training draws.
  const std::uint64_t eval_seed = Rng::splitmix64(config.seed ^ 0x76616c6964ull);

  const std::size_t n = data.train_x.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.model = model;
  result.best_validation_loss =
      validation_loss(model, data.val_x, data.val_f, schedule, eval_seed);
  result.best_epoch = 0;

  AdamState adam = AdamState::for_model(model);
  Gradients grads;
  Matrix inputs, targets;
  int epochs_since_best = 0;

  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    // Fisher-Yates with our own generator; std::shuffle is
    // implementation-defined and would break cross-platform determinism.
    for (std::size_t i = n - 1; i > 0; --i) {
      const std::size_t j = rng.integer(i + 1);
      std::swap(order[i], order[j]);
    }

    double epoch_sse = 0.0;
    for (std::size_t begin = 0; begin < n; begin += config.batch_size) {
      const std::size_t end = std::min(n, begin + config.batch_size);
      fill_noise_batch(data.train_x, data.train_f, order, begin, end, schedule,
                       rng, inputs, targets);
      const double loss = loss_and_gradients(model, inputs, targets, grads);
      if (!std::isfinite(loss)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch));
      }
      epoch_sse += loss * static_cast<double>(end - begin);
      adam_step(model, adam, grads, config.learning_rate);
    }

    const double train_loss = epoch_sse / static_cast<double>(n);
    const double val_loss =
        validation_loss(model, data.val_x, data.val_f, schedule, eval_seed);
    result.history.push_back({epoch, train_loss, val_loss});

    if (val_loss < result.best_validation_loss) {
      result.best_validation_loss = val_loss;
      result.best_epoch = epoch;
      result.model = model;
      epochs_since_best = 0;
    } else {
      ++epochs_since_best;
      if (epochs_since_best >= config.patience) break;
    }
  }
  return result;
}

Vec reverse_step(const Mlp& model, const NoiseSchedule& schedule, const Vec& x_t,
                 int t, const Vec& features_norm, const Vec& z) {
  const double alpha = schedule.alpha(t);
  const double alpha_bar = schedule.alpha_bar(t);
  const double beta = schedule.beta(t);
  const Vec eps_hat = model.forward(make_input(x_t, t, schedule.t_max, features_norm));
  const double eps_scale = (1.0 - alpha) / std::sqrt(1.0 - alpha_bar);
  const double inv_sqrt_alpha = 1.0 / std::sqrt(alpha);
  const double sigma = std::sqrt(beta);
  Vec next(x_t.size());
  for (std::size_t i = 0; i < x_t.size(); ++i) {
    next[i] = inv_sqrt_alpha * (x_t[i] - eps_scale * eps_hat[i]);
    if (t > 1) next[i] += sigma * z[i];
  }
  return next;
}

Vec sample_latent_from(const Mlp& model, const NoiseSchedule& schedule,
                       const Vec& features_norm, Vec x_t,
                       const std::function<Vec(int)>& z_at) {
  for (int t = schedule.t_max; t >= 1; --t) {
    const Vec z = (t > 1) ? z_at(t) : Vec(x_t.size(), 0.0);
    x_t = reverse_step(model, schedule, x_t, t, features_norm, z);
    for (double v : x_t) {
      if (!std::isfinite(v)) {
        throw std::runtime_error("sample: non-finite state at step " + std::to_string(t));
      }
    }
  }
  return x_t;
}

Vec sample_latent(const Mlp& model, const NoiseSchedule& schedule,
                  const Vec& features_norm, Rng& rng) {
  const int latent_dim = model.output_size();
  Vec x_t(latent_dim);
  for (double& v : x_t) v = rng.normal();
  return sample_latent_from(model, schedule, features_norm, std::move(x_t),
                            [&](int) {
                              Vec z(latent_dim);
                              for (double& v : z) v = rng.normal();
                              return z;
                            });
}

void save_loss_history(const std::vector<EpochLoss>& history,
                       const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("loss history: cannot open for write: " + path);
  out << "epoch,train_loss,validation_loss\n";
  char line[96];
  for (const EpochLoss& e : history) {
    std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", e.epoch, e.train_loss,
                  e.validation_loss);
    out << line;
  }
  if (!out) throw std::runtime_error("loss history: write failure: " + path);
}

}  // namespace airfoil
