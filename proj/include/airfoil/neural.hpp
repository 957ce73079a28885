#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "airfoil/rng.hpp"

namespace airfoil {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;  // batch of rows

// Per-column z-score transform. Population standard deviation, floored
// at 1e-8 for constant columns.
struct Normalizer {
  Vec mean;
  Vec std;
  std::vector<int> floored_columns;  // columns whose std hit the floor

  Vec apply(const Vec& v) const;
  Vec invert(const Vec& v) const;
};

Normalizer fit_normalizer(const Matrix& rows);

// Dense tanh network: affine+tanh on every layer except the last, which
// is affine only. weights[l] is row-major (out x in).
class Mlp {
 public:
  Mlp() = default;
  // Glorot-uniform weights (+-sqrt(6/(fan_in+fan_out))), zero biases.
  Mlp(const std::vector<int>& layer_sizes, Rng& rng);

  Vec forward(const Vec& input) const;

  int input_size() const { return layer_sizes_.front(); }
  int output_size() const { return layer_sizes_.back(); }
  const std::vector<int>& layer_sizes() const { return layer_sizes_; }

  std::size_t parameter_count() const;

  // Flat views used by the optimizer and by checkpointing.
  std::vector<Vec>& weights() { return weights_; }
  std::vector<Vec>& biases() { return biases_; }
  const std::vector<Vec>& weights() const { return weights_; }
  const std::vector<Vec>& biases() const { return biases_; }

  static Mlp from_parameters(std::vector<int> layer_sizes,
                             std::vector<Vec> weights, std::vector<Vec> biases);

 private:
  std::vector<int> layer_sizes_;
  std::vector<Vec> weights_;  // weights_[l][o * in + i]
  std::vector<Vec> biases_;   // biases_[l][o]
};

// Gradients in the same layout as the model parameters.
struct Gradients {
  std::vector<Vec> weights;
  std::vector<Vec> biases;
};

// Mean over batch rows and output dimensions of the squared error, with
// exact gradients of that mean.
double loss_and_gradients(const Mlp& model, const Matrix& batch_inputs,
                          const Matrix& batch_targets, Gradients& grads);

double batch_loss(const Mlp& model, const Matrix& batch_inputs,
                  const Matrix& batch_targets);

struct AdamState {
  std::vector<Vec> m_weights, v_weights;
  std::vector<Vec> m_biases, v_biases;
  long step = 0;
  double b1 = 0.9;
  double b2 = 0.999;
  double eps = 1e-8;

  static AdamState for_model(const Mlp& model);
};

void adam_step(Mlp& model, AdamState& state, const Gradients& grads,
               double learning_rate);

// Self-describing JSON checkpoint bundling everything sampling needs.
struct Checkpoint {
  int latent_dim = 0;
  int feature_dim = 0;
  Mlp model;
  Normalizer param_normalizer;
  Normalizer feature_normalizer;
  double beta_start = 0.0;
  double beta_end = 0.0;
  int t_max = 0;
};

void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);

}  // namespace airfoil
