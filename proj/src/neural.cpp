#include "airfoil/neural.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace airfoil {

namespace {
constexpr double kStdFloor = 1e-8;
constexpr int kCheckpointVersion = 1;
}  // namespace

Normalizer fit_normalizer(const Matrix& rows) {
  if (rows.size() < 2) throw std::invalid_argument("fit_normalizer: need >= 2 rows");
  const std::size_t dim = rows.front().size();
  Normalizer norm;
  norm.mean.assign(dim, 0.0);
  norm.std.assign(dim, 0.0);
  for (const Vec& r : rows) {
    if (r.size() != dim) throw std::invalid_argument("fit_normalizer: ragged rows");
    for (std::size_t j = 0; j < dim; ++j) norm.mean[j] += r[j];
  }
  const double n = static_cast<double>(rows.size());
  for (std::size_t j = 0; j < dim; ++j) norm.mean[j] /= n;
  for (const Vec& r : rows) {
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = r[j] - norm.mean[j];
      norm.std[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < dim; ++j) {
    norm.std[j] = std::sqrt(norm.std[j] / n);  // population estimator
    if (norm.std[j] < kStdFloor) {
      norm.std[j] = kStdFloor;
      norm.floored_columns.push_back(static_cast<int>(j));
    }
  }
  return norm;
}

Vec Normalizer::apply(const Vec& v) const {
  if (v.size() != mean.size()) throw std::invalid_argument("Normalizer::apply: size mismatch");
  Vec out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = (v[j] - mean[j]) / std[j];
  return out;
}

Vec Normalizer::invert(const Vec& v) const {
  if (v.size() != mean.size()) throw std::invalid_argument("Normalizer::invert: size mismatch");
  Vec out(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) out[j] = v[j] * std[j] + mean[j];
  return out;
}

Mlp::Mlp(const std::vector<int>& layer_sizes, Rng& rng)
    : layer_sizes_(layer_sizes) {
  if (layer_sizes.size() < 2) throw std::invalid_argument("Mlp: need input and output layer");
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l) {
    const int in = layer_sizes[l];
    const int out = layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (in + out));
    Vec w(static_cast<std::size_t>(in) * out);
    for (double& x : w) x = rng.uniform(-bound, bound);
    weights_.push_back(std::move(w));
    biases_.emplace_back(out, 0.0);
  }
}

Mlp Mlp::from_parameters(std::vector<int> layer_sizes, std::vector<Vec> weights,
                         std::vector<Vec> biases) {
  Mlp m;
  m.layer_sizes_ = std::move(layer_sizes);
  m.weights_ = std::move(weights);
  m.biases_ = std::move(biases);
  if (m.layer_sizes_.size() < 2 ||
      m.weights_.size() != m.layer_sizes_.size() - 1 ||
      m.biases_.size() != m.weights_.size()) {
    throw std::invalid_argument("Mlp::from_parameters: inconsistent layer chain");
  }
  for (std::size_t l = 0; l + 1 < m.layer_sizes_.size(); ++l) {
    const std::size_t in = static_cast<std::size_t>(m.layer_sizes_[l]);
    const std::size_t out = static_cast<std::size_t>(m.layer_sizes_[l + 1]);
    if (m.weights_[l].size() != in * out || m.biases_[l].size() != out) {
      throw std::invalid_argument("Mlp::from_parameters: shape mismatch at layer " +
                                  std::to_string(l));
    }
  }
  return m;
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    n += weights_[l].size() + biases_[l].size();
  }
  return n;
}

Vec Mlp::forward(const Vec& input) const {
  if (static_cast<int>(input.size()) != input_size()) {
    throw std::invalid_argument("Mlp::forward: input size mismatch");
  }
  Vec act = input;
  for (std::size_t l = 0; l < weights_.size(); ++l) {
    const int in = layer_sizes_[l];
    const int out = layer_sizes_[l + 1];
    Vec next(out);
    const Vec& w = weights_[l];
    for (int o = 0; o < out; ++o) {
      double z = biases_[l][o];
      const double* row = &w[static_cast<std::size_t>(o) * in];
      for (int i = 0; i < in; ++i) z += row[i] * act[i];
      next[o] = (l + 1 < weights_.size()) ? std::tanh(z) : z;
    }
    act = std::move(next);
  }
  return act;
}

double loss_and_gradients(const Mlp& model, const Matrix& batch_inputs,
                          const Matrix& batch_targets, Gradients& grads) {
  if (batch_inputs.empty() || batch_inputs.size() != batch_targets.size()) {
    throw std::invalid_argument("loss_and_gradients: empty or mismatched batch");
  }
  const auto& sizes = model.layer_sizes();
  const std::size_t n_layers = sizes.size() - 1;

  grads.weights.assign(n_layers, {});
  grads.biases.assign(n_layers, {});
  for (std::size_t l = 0; l < n_layers; ++l) {
    grads.weights[l].assign(model.weights()[l].size(), 0.0);
    grads.biases[l].assign(model.biases()[l].size(), 0.0);
  }

  const double batch = static_cast<double>(batch_inputs.size());
  const double out_dim = static_cast<double>(sizes.back());
  double loss = 0.0;

  std::vector<Vec> activations(n_layers + 1);
  for (std::size_t row = 0; row < batch_inputs.size(); ++row) {
    const Vec& input = batch_inputs[row];
    const Vec& target = batch_targets[row];
    if (static_cast<int>(input.size()) != sizes.front() ||
        static_cast<int>(target.size()) != sizes.back()) {
      throw std::invalid_argument("loss_and_gradients: row size mismatch");
    }
    for (double x : input) {
      if (!std::isfinite(x)) throw std::invalid_argument("loss_and_gradients: non-finite input");
    }

    activations[0] = input;
    for (std::size_t l = 0; l < n_layers; ++l) {
      const int in = sizes[l];
      const int out = sizes[l + 1];
      Vec next(out);
      const Vec& w = model.weights()[l];
      for (int o = 0; o < out; ++o) {
        double z = model.biases()[l][o];
        const double* wrow = &w[static_cast<std::size_t>(o) * in];
        for (int i = 0; i < in; ++i) z += wrow[i] * activations[l][i];
        next[o] = (l + 1 < n_layers) ? std::tanh(z) : z;
      }
      activations[l + 1] = std::move(next);
    }

    // d(loss)/d(output) for loss = mean over batch and dims of e^2.
    Vec delta(sizes.back());
    for (int o = 0; o < sizes.back(); ++o) {
      const double e = activations[n_layers][o] - target[o];
      loss += e * e;
      delta[o] = 2.0 * e / (batch * out_dim);
    }

    for (std::size_t l = n_layers; l-- > 0;) {
      const int in = sizes[l];
      const int out = sizes[l + 1];
      const Vec& w = model.weights()[l];
      Vec prev_delta(in, 0.0);
      for (int o = 0; o < out; ++o) {
        const double d = delta[o];
        grads.biases[l][o] += d;
        double* grow = &grads.weights[l][static_cast<std::size_t>(o) * in];
        const double* wrow = &w[static_cast<std::size_t>(o) * in];
        for (int i = 0; i < in; ++i) {
          grow[i] += d * activations[l][i];
          prev_delta[i] += d * wrow[i];
        }
      }
      if (l > 0) {
        // tanh'(z) = 1 - tanh(z)^2, and activations[l] stores tanh(z).
        for (int i = 0; i < in; ++i) {
          const double a = activations[l][i];
          prev_delta[i] *= (1.0 - a * a);
        }
        delta = std::move(prev_delta);
      }
    }
  }
  return loss / (batch * out_dim);
}

double batch_loss(const Mlp& model, const Matrix& batch_inputs,
                  const Matrix& batch_targets) {
  if (batch_inputs.empty() || batch_inputs.size() != batch_targets.size()) {
    throw std::invalid_argument("batch_loss: empty or mismatched batch");
  }
  double loss = 0.0;
  for (std::size_t row = 0; row < batch_inputs.size(); ++row) {
    const Vec out = model.forward(batch_inputs[row]);
    for (std::size_t o = 0; o < out.size(); ++o) {
      const double e = out[o] - batch_targets[row][o];
      loss += e * e;
    }
  }
  return loss / (static_cast<double>(batch_inputs.size()) * model.output_size());
}

AdamState AdamState::for_model(const Mlp& model) {
  AdamState s;
  for (std::size_t l = 0; l < model.weights().size(); ++l) {
    s.m_weights.emplace_back(model.weights()[l].size(), 0.0);
    s.v_weights.emplace_back(model.weights()[l].size(), 0.0);
    s.m_biases.emplace_back(model.biases()[l].size(), 0.0);
    s.v_biases.emplace_back(model.biases()[l].size(), 0.0);
  }
  return s;
}

namespace {
void adam_update(Vec& params, Vec& m, Vec& v, const Vec& g, double lr,
                 double b1, double b2, double eps, double b1t, double b2t) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = b1 * m[i] + (1.0 - b1) * g[i];
    v[i] = b2 * v[i] + (1.0 - b2) * g[i] * g[i];
    const double m_hat = m[i] / (1.0 - b1t);
    const double v_hat = v[i] / (1.0 - b2t);
    params[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
  }
}
}  // namespace

void adam_step(Mlp& model, AdamState& state, const Gradients& grads,
               double learning_rate) {
  if (grads.weights.size() != model.weights().size()) {
    throw std::invalid_argument("adam_step: gradient/model mismatch");
  }
  state.step += 1;
  const double b1t = std::pow(state.b1, static_cast<double>(state.step));
  const double b2t = std::pow(state.b2, static_cast<double>(state.step));
  for (std::size_t l = 0; l < model.weights().size(); ++l) {
    if (grads.weights[l].size() != model.weights()[l].size() ||
        grads.biases[l].size() != model.biases()[l].size()) {
      throw std::invalid_argument("adam_step: shape mismatch at layer " + std::to_string(l));
    }
    adam_update(model.weights()[l], state.m_weights[l], state.v_weights[l],
                grads.weights[l], learning_rate, state.b1, state.b2, state.eps,
                b1t, b2t);
    adam_update(model.biases()[l], state.m_biases[l], state.v_biases[l],
                grads.biases[l], learning_rate, state.b1, state.b2, state.eps,
                b1t, b2t);
  }
}

namespace {
nlohmann::json normalizer_to_json(const Normalizer& n) {
  return {{"mean", n.mean}, {"std", n.std}, {"floored_columns", n.floored_columns}};
}

Normalizer normalizer_from_json(const nlohmann::json& j) {
  Normalizer n;
  n.mean = j.at("mean").get<Vec>();
  n.std = j.at("std").get<Vec>();
  n.floored_columns = j.at("floored_columns").get<std::vector<int>>();
  if (n.mean.size() != n.std.size()) {
    throw std::invalid_argument("checkpoint: normalizer mean/std size mismatch");
  }
  return n;
}
}  // namespace

std::string checkpoint_to_json(const Checkpoint& ckpt) {
  nlohmann::json j;
  j["version"] = kCheckpointVersion;
  j["latent_dim"] = ckpt.latent_dim;
  j["feature_dim"] = ckpt.feature_dim;
  j["layer_sizes"] = ckpt.model.layer_sizes();
  j["weights"] = ckpt.model.weights();
  j["biases"] = ckpt.model.biases();
  j["param_normalizer"] = normalizer_to_json(ckpt.param_normalizer);
  j["feature_normalizer"] = normalizer_to_json(ckpt.feature_normalizer);
  j["schedule"] = {{"beta_start", ckpt.beta_start},
                   {"beta_end", ckpt.beta_end},
                   {"t_max", ckpt.t_max}};
  return j.dump(2) + "\n";
}

Checkpoint checkpoint_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: parse failure: ") + e.what());
  }
  Checkpoint ckpt;
  try {
    const int version = j.at("version").get<int>();
    if (version != kCheckpointVersion) {
      throw std::runtime_error("checkpoint: unsupported version " + std::to_string(version));
    }
    ckpt.latent_dim = j.at("latent_dim").get<int>();
    ckpt.feature_dim = j.at("feature_dim").get<int>();
    auto layer_sizes = j.at("layer_sizes").get<std::vector<int>>();
    auto weights = j.at("weights").get<std::vector<Vec>>();
    auto biases = j.at("biases").get<std::vector<Vec>>();
    ckpt.model = Mlp::from_parameters(std::move(layer_sizes), std::move(weights),
                                      std::move(biases));
    ckpt.param_normalizer = normalizer_from_json(j.at("param_normalizer"));
    ckpt.feature_normalizer = normalizer_from_json(j.at("feature_normalizer"));
    ckpt.beta_start = j.at("schedule").at("beta_start").get<double>();
    ckpt.beta_end = j.at("schedule").at("beta_end").get<double>();
    ckpt.t_max = j.at("schedule").at("t_max").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw std::runtime_error(std::string("checkpoint: malformed document: ") + e.what());
  }
  if (ckpt.model.output_size() != ckpt.latent_dim ||
      ckpt.model.input_size() != ckpt.latent_dim + 1 + ckpt.feature_dim) {
    throw std::runtime_error("checkpoint: layer sizes inconsistent with dims");
  }
  if (static_cast<int>(ckpt.param_normalizer.mean.size()) != ckpt.latent_dim ||
      static_cast<int>(ckpt.feature_normalizer.mean.size()) != ckpt.feature_dim) {
    throw std::runtime_error("checkpoint: normalizer dims inconsistent");
  }
  return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("checkpoint: cannot open for write: " + path);
  out << checkpoint_to_json(ckpt);
  if (!out) throw std::runtime_error("checkpoint: write failure: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("checkpoint: cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return checkpoint_from_json(text);
}

}  // namespace airfoil
