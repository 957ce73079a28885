#include "airfoil/pod.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>
#include <json.hpp>

namespace airfoil {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& rows) {
  if (rows.empty()) throw std::invalid_argument("pod: empty matrix");
  Eigen::MatrixXd m(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) {
      throw std::invalid_argument("pod: ragged matrix");
    }
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

}  // namespace

Vec PodBasis::project(const Vec& latent) const {
  if (latent.size() != mean.size()) throw std::invalid_argument("pod: latent size mismatch");
  Vec coeffs(modes.size(), 0.0);
  for (std::size_t j = 0; j < modes.size(); ++j) {
    double dot = 0.0;
    for (std::size_t k = 0; k < mean.size(); ++k) {
      dot += modes[j][k] * (latent[k] - mean[k]);
    }
    coeffs[j] = dot;
  }
  return coeffs;
}

Vec PodBasis::reconstruct(const Vec& coeffs) const {
  if (coeffs.size() != modes.size()) throw std::invalid_argument("pod: coeff size mismatch");
  Vec out = mean;
  for (std::size_t j = 0; j < modes.size(); ++j) {
    for (std::size_t k = 0; k < out.size(); ++k) out[k] += coeffs[j] * modes[j][k];
  }
  return out;
}

PodBasis compute_pod(const Matrix& training_latents) {
  const Eigen::MatrixXd x = to_eigen(training_latents);
  const int n = static_cast<int>(x.rows());
  const int dim = static_cast<int>(x.cols());
  if (n < dim + 1) {
    throw std::invalid_argument("compute_pod: need more rows than latent dimensions");
  }

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Eigen::MatrixXd centered = x.rowwise() - mean;
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("compute_pod: eigendecomposition failed");
  }

  PodBasis basis;
  basis.mean.assign(mean.data(), mean.data() + dim);
  basis.modes.resize(dim);
  basis.eigenvalues.resize(dim);
  // Eigen returns ascending eigenvalues; store them descending.
  for (int j = 0; j < dim; ++j) {
    const int src = dim - 1 - j;
    basis.eigenvalues[j] = std::max(0.0, eig.eigenvalues()(src));
    Eigen::VectorXd mode = eig.eigenvectors().col(src);
    int arg_max = 0;
    for (int k = 1; k < dim; ++k) {
      if (std::abs(mode(k)) > std::abs(mode(arg_max))) arg_max = k;
    }
    if (mode(arg_max) < 0.0) mode = -mode;
    basis.modes[j].assign(mode.data(), mode.data() + dim);
  }
  return basis;
}

void fit_feature_map(PodBasis& basis, const Matrix& training_features,
                     const Matrix& training_latents) {
  if (training_features.size() != training_latents.size()) {
    throw std::invalid_argument("fit_feature_map: row count mismatch");
  }
  const int n = static_cast<int>(training_features.size());
  const int n_modes = static_cast<int>(basis.modes.size());

  basis.feature_norm = fit_normalizer(training_features);

  Eigen::MatrixXd design(n, 4);
  Eigen::MatrixXd targets(n, n_modes);
  for (int i = 0; i < n; ++i) {
    const Vec f = basis.feature_norm.apply(training_features[i]);
    design(i, 0) = 1.0;
    for (int j = 0; j < 3; ++j) design(i, 1 + j) = f[j];
    const Vec coeffs = basis.project(training_latents[i]);
    for (int j = 0; j < n_modes; ++j) targets(i, j) = coeffs[j];
  }

  Eigen::MatrixXd normal = design.transpose() * design;
  normal.diagonal().array() += 1e-10;
  const Eigen::MatrixXd solution = normal.ldlt().solve(design.transpose() * targets);
  if (!solution.allFinite()) {
    throw std::runtime_error("fit_feature_map: degenerate feature matrix");
  }

  basis.feature_map.assign(4, Vec(n_modes, 0.0));
  for (int r = 0; r < 4; ++r) {
    for (int j = 0; j < n_modes; ++j) basis.feature_map[r][j] = solution(r, j);
  }
  basis.has_feature_map = true;
}

CstParams pod_generate(const PodBasis& basis, const AeroFeatures& features) {
  if (!basis.has_feature_map) {
    throw std::logic_error("pod_generate: feature map not fitted");
  }
  const Vec f = basis.feature_norm.apply({features.cl, features.cd, features.cm});
  const double phi[4] = {1.0, f[0], f[1], f[2]};
  Vec coeffs(basis.modes.size(), 0.0);
  for (std::size_t j = 0; j < coeffs.size(); ++j) {
    for (int r = 0; r < 4; ++r) coeffs[j] += phi[r] * basis.feature_map[r][j];
  }
  const Vec latent = basis.reconstruct(coeffs);
  return CstParams::unflatten(latent);
}

std::string pod_basis_to_json(const PodBasis& basis) {
  nlohmann::json j;
  j["mean"] = basis.mean;
  j["modes"] = basis.modes;
  j["eigenvalues"] = basis.eigenvalues;
  if (basis.has_feature_map) {
    j["feature_map"] = basis.feature_map;
    j["feature_normalizer"] = {{"mean", basis.feature_norm.mean},
                               {"std", basis.feature_norm.std}};
  }
  return j.dump(2) + "\n";
}

}  // namespace airfoil
