#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "airfoil/neural.hpp"
#include "airfoil/rng.hpp"
#include "oracle_helpers.hpp"

using namespace airfoil;
namespace fs = std::filesystem;

namespace {

Mlp zero_model(const std::vector<int>& sizes) {
  std::vector<Vec> weights, biases;
  for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
    weights.emplace_back(static_cast<std::size_t>(sizes[l]) * sizes[l + 1], 0.0);
    biases.emplace_back(sizes[l + 1], 0.0);
  }
  return Mlp::from_parameters(sizes, std::move(weights), std::move(biases));
}

Matrix random_matrix(Rng& rng, int rows, int cols, double scale = 1.0) {
  Matrix m(rows, Vec(cols));
  for (auto& r : m) {
    for (double& v : r) v = scale * rng.normal();
  }
  return m;
}

}  // namespace

TEST_CASE("forward: zero parameters give zero output") {
  const Mlp m = zero_model({4, 8, 3});
  const Vec out = m.forward({1.0, -2.0, 0.5, 3.0});
  for (double v : out) CHECK(v == 0.0);
}

TEST_CASE("forward: zero weights with output bias give a constant") {
  Mlp m = zero_model({4, 8, 3});
  m.biases().back() = {0.25, -1.5, 2.0};
  for (const Vec& input : {Vec{0, 0, 0, 0}, Vec{5, -3, 2, 1}}) {
    const Vec out = m.forward(input);
    CHECK(out[0] == 0.25);
    CHECK(out[1] == -1.5);
    CHECK(out[2] == 2.0);
  }
}

TEST_CASE("forward: single hidden unit tanh chain") {
  Mlp m = zero_model({1, 1, 1});
  m.weights()[0] = {2.0};
  m.biases()[0] = {0.5};
  m.weights()[1] = {-1.5};
  m.biases()[1] = {0.25};
  const double x = 0.3;
  const double expected = -1.5 * std::tanh(2.0 * x + 0.5) + 0.25;
  CHECK(m.forward({x})[0] == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("forward: shape mismatch throws") {
  const Mlp m = zero_model({4, 8, 3});
  CHECK_THROWS_AS(m.forward({1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("initialization is deterministic and bounded") {
  Rng a(77), b(77);
  const Mlp m1({15, 32, 32, 11}, a);
  const Mlp m2({15, 32, 32, 11}, b);
  CHECK(m1.weights() == m2.weights());
  CHECK(m1.biases() == m2.biases());
  const double bound0 = std::sqrt(6.0 / (15 + 32));
  for (double w : m1.weights()[0]) CHECK(std::abs(w) <= bound0);
  for (double bias : m1.biases()[0]) CHECK(bias == 0.0);
  CHECK(m1.parameter_count() == 15u * 32 + 32 + 32u * 32 + 32 + 32u * 11 + 11);
}

TEST_CASE("loss: zero error means zero loss and zero gradients") {
  const Mlp m = zero_model({3, 5, 2});
  const Matrix inputs = {{1, 2, 3}, {-1, 0, 2}};
  const Matrix targets = {{0, 0}, {0, 0}};
  Gradients g;
  CHECK(loss_and_gradients(m, inputs, targets, g) == 0.0);
  for (const Vec& layer : g.weights) {
    for (double v : layer) CHECK(v == 0.0);
  }
  for (const Vec& layer : g.biases) {
    for (double v : layer) CHECK(v == 0.0);
  }
}

TEST_CASE("gradients match central finite differences on 10 random models") {
  Rng rng(31337);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const std::vector<int> sizes = {4, 6, 5, 3};
    Mlp m(sizes, rng);
    const Matrix inputs = random_matrix(rng, 8, 4);
    const Matrix targets = random_matrix(rng, 8, 3);
    Gradients g;
    loss_and_gradients(m, inputs, targets, g);
    for (std::size_t l = 0; l < g.weights.size(); ++l) {
      for (std::size_t i = 0; i < g.weights[l].size(); ++i) {
        const double fd = oracle::fd_gradient(m, l, true, i, inputs, targets);
        const double rel = std::abs(g.weights[l][i] - fd) /
                           std::max(1e-4, std::abs(g.weights[l][i]) + std::abs(fd));
        worst = std::max(worst, rel);
      }
      for (std::size_t i = 0; i < g.biases[l].size(); ++i) {
        const double fd = oracle::fd_gradient(m, l, false, i, inputs, targets);
        const double rel = std::abs(g.biases[l][i] - fd) /
                           std::max(1e-4, std::abs(g.biases[l][i]) + std::abs(fd));
        worst = std::max(worst, rel);
      }
    }
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("loss is invariant under batch duplication and permutation") {
  Rng rng(11);
  Mlp m({3, 6, 2}, rng);
  const Matrix inputs = random_matrix(rng, 4, 3);
  const Matrix targets = random_matrix(rng, 4, 2);

  Gradients g1, g2;
  const double base = loss_and_gradients(m, inputs, targets, g1);

  Matrix doubled_in = inputs, doubled_tg = targets;
  doubled_in.insert(doubled_in.end(), inputs.begin(), inputs.end());
  doubled_tg.insert(doubled_tg.end(), targets.begin(), targets.end());
  const double doubled = loss_and_gradients(m, doubled_in, doubled_tg, g2);
  CHECK(doubled == doctest::Approx(base).epsilon(1e-14));
  for (std::size_t l = 0; l < g1.weights.size(); ++l) {
    for (std::size_t i = 0; i < g1.weights[l].size(); ++i) {
      CHECK(g2.weights[l][i] == doctest::Approx(g1.weights[l][i]).epsilon(1e-13));
    }
  }

  Matrix perm_in = {inputs[2], inputs[0], inputs[3], inputs[1]};
  Matrix perm_tg = {targets[2], targets[0], targets[3], targets[1]};
  Gradients g3;
  CHECK(loss_and_gradients(m, perm_in, perm_tg, g3) ==
        doctest::Approx(base).epsilon(1e-14));

  CHECK_THROWS_AS(loss_and_gradients(m, {}, {}, g3), std::invalid_argument);
}

TEST_CASE("adam: zero gradients leave parameters unchanged") {
  Rng rng(12);
  Mlp m({3, 4, 2}, rng);
  const Mlp before = m;
  AdamState state = AdamState::for_model(m);
  Gradients zero;
  zero.weights = {Vec(12, 0.0), Vec(8, 0.0)};
  zero.biases = {Vec(4, 0.0), Vec(2, 0.0)};
  adam_step(m, state, zero, 1e-3);
  CHECK(state.step == 1);
  CHECK(m.weights() == before.weights());
  CHECK(m.biases() == before.biases());
}

TEST_CASE("adam: first step matches the hand-computed bias-corrected update") {
  // one scalar parameter, gradient g: m_hat = g, v_hat = g^2,
  // theta' = theta - lr * g / (|g| + eps)
  Mlp m = zero_model({1, 1});
  m.weights()[0] = {0.8};
  AdamState state = AdamState::for_model(m);
  Gradients g;
  g.weights = {Vec{0.37}};
  g.biases = {Vec{0.0}};
  const double lr = 1e-2;
  adam_step(m, state, g, lr);
  const double expected = 0.8 - lr * 0.37 / (std::abs(0.37) + state.eps);
  CHECK(m.weights()[0][0] == doctest::Approx(expected).epsilon(1e-15));

  // second step with the same gradient, traced by hand
  adam_step(m, state, g, lr);
  const double m2 = (0.9 * (0.1 * 0.37) + 0.1 * 0.37) / (1.0 - 0.9 * 0.9);
  const double v2 = (0.999 * (0.001 * 0.37 * 0.37) + 0.001 * 0.37 * 0.37) /
                    (1.0 - 0.999 * 0.999);
  const double expected2 = expected - lr * m2 / (std::sqrt(v2) + state.eps);
  CHECK(m.weights()[0][0] == doctest::Approx(expected2).epsilon(1e-12));
}

TEST_CASE("adam: identical states give identical results") {
  Rng rng(13);
  Mlp m1({3, 4, 2}, rng);
  Mlp m2 = m1;
  AdamState s1 = AdamState::for_model(m1);
  AdamState s2 = AdamState::for_model(m2);
  Rng grad_rng(14);
  Gradients g;
  g.weights = {Vec(12), Vec(8)};
  g.biases = {Vec(4), Vec(2)};
  for (auto& layer : g.weights) {
    for (double& v : layer) v = grad_rng.normal();
  }
  for (auto& layer : g.biases) {
    for (double& v : layer) v = grad_rng.normal();
  }
  adam_step(m1, s1, g, 1e-3);
  adam_step(m2, s2, g, 1e-3);
  CHECK(m1.weights() == m2.weights());
  CHECK(m1.biases() == m2.biases());
}

TEST_CASE("normalizer: hand-computed fit and round trip") {
  const Normalizer norm = fit_normalizer({{1.0}, {3.0}});
  CHECK(norm.mean[0] == 2.0);
  CHECK(norm.std[0] == 1.0);  // population std
  CHECK(norm.apply({3.0})[0] == 1.0);
  CHECK(norm.floored_columns.empty());

  Rng rng(15);
  const Matrix rows = random_matrix(rng, 50, 4, 3.0);
  const Normalizer n2 = fit_normalizer(rows);
  for (int i = 0; i < 20; ++i) {
    Vec v(4);
    for (double& x : v) x = rng.normal() * 5.0;
    const Vec back = n2.invert(n2.apply(v));
    for (int j = 0; j < 4; ++j) CHECK(std::abs(back[j] - v[j]) < 1e-10);
  }

  // normalized training columns have mean 0 and std 1
  Vec mean(4, 0.0), var(4, 0.0);
  for (const Vec& r : rows) {
    const Vec z = n2.apply(r);
    for (int j = 0; j < 4; ++j) mean[j] += z[j];
  }
  for (int j = 0; j < 4; ++j) mean[j] /= static_cast<double>(rows.size());
  for (const Vec& r : rows) {
    const Vec z = n2.apply(r);
    for (int j = 0; j < 4; ++j) var[j] += (z[j] - mean[j]) * (z[j] - mean[j]);
  }
  for (int j = 0; j < 4; ++j) {
    CHECK(std::abs(mean[j]) < 1e-10);
    CHECK(std::abs(std::sqrt(var[j] / rows.size()) - 1.0) < 1e-10);
  }

  CHECK_THROWS_AS(fit_normalizer({{1.0}}), std::invalid_argument);
}

TEST_CASE("normalizer: constant column is floored and flagged") {
  const Normalizer norm = fit_normalizer({{5.0, 1.0}, {5.0, 3.0}, {5.0, 2.0}});
  REQUIRE(norm.floored_columns.size() == 1);
  CHECK(norm.floored_columns[0] == 0);
  const Vec z = norm.apply({5.0, 2.0});
  CHECK(z[0] == 0.0);
  CHECK(std::isfinite(z[0]));
}

TEST_CASE("checkpoint: bit-exact round trip") {
  Rng rng(16);
  Checkpoint ckpt;
  ckpt.latent_dim = 11;
  ckpt.feature_dim = 3;
  ckpt.model = Mlp({15, 32, 32, 32, 32, 11}, rng);
  ckpt.param_normalizer = fit_normalizer(random_matrix(rng, 20, 11));
  ckpt.feature_normalizer = fit_normalizer(random_matrix(rng, 20, 3));
  ckpt.beta_start = 1e-3;
  ckpt.beta_end = 0.2;
  ckpt.t_max = 1000;

  const fs::path path = fs::temp_directory_path() / "ckpt_roundtrip.json";
  save_checkpoint(ckpt, path.string());
  const Checkpoint back = load_checkpoint(path.string());

  CHECK(back.latent_dim == 11);
  CHECK(back.feature_dim == 3);
  CHECK(back.t_max == 1000);
  CHECK(back.model.weights() == ckpt.model.weights());
  CHECK(back.model.biases() == ckpt.model.biases());
  CHECK(back.param_normalizer.mean == ckpt.param_normalizer.mean);
  CHECK(back.param_normalizer.std == ckpt.param_normalizer.std);

  for (int i = 0; i < 100; ++i) {
    Vec input(15);
    for (double& v : input) v = rng.normal();
    const Vec a = ckpt.model.forward(input);
    const Vec b = back.model.forward(input);
    CHECK(a == b);  // bitwise
  }
  fs::remove(path);
}

TEST_CASE("checkpoint: truncated or inconsistent files are rejected") {
  Rng rng(17);
  Checkpoint ckpt;
  ckpt.latent_dim = 11;
  ckpt.feature_dim = 3;
  ckpt.model = Mlp({15, 8, 11}, rng);
  ckpt.param_normalizer = fit_normalizer(random_matrix(rng, 5, 11));
  ckpt.feature_normalizer = fit_normalizer(random_matrix(rng, 5, 3));
  ckpt.beta_start = 1e-3;
  ckpt.beta_end = 0.2;
  ckpt.t_max = 10;
  const std::string text = checkpoint_to_json(ckpt);

  CHECK_THROWS(checkpoint_from_json(text.substr(0, text.size() / 2)));
  CHECK_THROWS(checkpoint_from_json("{}"));

  // tampered version
  std::string bad_version = text;
  const auto at = bad_version.find("\"version\": 1");
  REQUIRE(at != std::string::npos);
  bad_version.replace(at, 12, "\"version\": 9");
  CHECK_THROWS(checkpoint_from_json(bad_version));

  // inconsistent latent dim
  std::string bad_dim = text;
  const auto ld = bad_dim.find("\"latent_dim\": 11");
  REQUIRE(ld != std::string::npos);
  bad_dim.replace(ld, 16, "\"latent_dim\": 12");
  CHECK_THROWS(checkpoint_from_json(bad_dim));

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), std::runtime_error);
}
