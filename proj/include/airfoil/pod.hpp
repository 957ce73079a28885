#pragma once

#include <string>
#include <vector>

#include "airfoil/aero.hpp"
#include "airfoil/cst.hpp"
#include "airfoil/neural.hpp"

namespace airfoil {

// Orthonormal modes of the training latent vectors, eigenvalues in
// descending order, plus an affine map from normalized features to the
// 11 mode coefficients.
struct PodBasis {
  Vec mean;                 // latent mean, length 11
  Matrix modes;             // modes[j] is the j-th mode, length 11
  Vec eigenvalues;          // descending, non-negative
  Matrix feature_map;       // 4 x 11: rows {intercept, f1, f2, f3}
  Normalizer feature_norm;  // applied to raw features before the map
  bool has_feature_map = false;

  Vec project(const Vec& latent) const;       // mode coefficients
  Vec reconstruct(const Vec& coeffs) const;   // mean + modes * coeffs
};

// Mean-centered covariance eigendecomposition of the training latents.
// Requires at least latent_dim + 1 rows; every mode's largest-magnitude
// component is made positive so results are reproducible.
PodBasis compute_pod(const Matrix& training_latents);

// Least-squares affine fit from normalized (cl, cd, cm) to the mode
// coefficients of each training row; normal equations with diagonal
// regularization 1e-10.
void fit_feature_map(PodBasis& basis, const Matrix& training_features,
                     const Matrix& training_latents);

// Deterministic single airfoil for a feature triple.
CstParams pod_generate(const PodBasis& basis, const AeroFeatures& features);

std::string pod_basis_to_json(const PodBasis& basis);

}  // namespace airfoil
