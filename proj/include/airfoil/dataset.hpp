#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "airfoil/aero.hpp"
#include "airfoil/cst.hpp"
#include "airfoil/neural.hpp"
#include "airfoil/rng.hpp"

namespace airfoil {

enum class Split { train, validation, test, none };

std::string to_string(Split split);
Split split_from_string(const std::string& name);

struct DatasetRow {
  CstParams params;
  AeroFeatures features;
  Split split = Split::none;
};

struct Provenance {
  std::uint64_t seed = 0;
  std::string solver_id;
  OperatingPoint op;
  std::string generated_at;  // in-memory only, not part of the sidecar schema
  long rejected_geometry = 0;
  long rejected_unconverged = 0;
  long filtered_outliers = 0;
};

struct LabeledDataset {
  std::vector<DatasetRow> rows;
  Provenance provenance;

  std::vector<int> split_indices(Split split) const;
  Matrix latents(Split split) const;   // flattened CstParams rows
  Matrix features(Split split) const;  // (cl, cd, cm) rows
};

struct SamplingRanges {
  double a0_min = 0.3;
  double a0_max = 1.0;
  double coeff_min = -0.5;
  double coeff_max = 1.5;
};

// Uniform latent draws: a0 in [a0_min, a0_max], every other coefficient
// in [coeff_min, coeff_max]. Deterministic given the generator state.
std::vector<CstParams> sample_raw(Rng& rng, int n,
                                  const SamplingRanges& ranges = {});

// Draws candidates until n_target rows pass both the geometric check
// and solver convergence; rejections are tallied in provenance. Aborts
// when fewer than 1% of a 10,000-candidate window is accepted.
LabeledDataset build_dataset(int n_target, const SolverOptions& solver, Rng& rng,
                             const SamplingRanges& ranges = {},
                             const ShapeClass& shape = {}, int parallelism = 1);

// Appends accepted rows until the dataset again holds n_target rows,
// continuing the same candidate stream.
void top_up(LabeledDataset& dataset, int n_target, const SolverOptions& solver,
            Rng& rng, const SamplingRanges& ranges = {},
            const ShapeClass& shape = {}, int parallelism = 1);

// Removes rows whose Mahalanobis distance in (cl, cd, cm) space lies
// strictly above the given empirical percentile (linear-interpolation
// quantile). Returns the surviving dataset; the removal count is added
// to provenance.filtered_outliers.
LabeledDataset mahalanobis_filter(const LabeledDataset& dataset,
                                  double percentile = 99.5);

// Distances for every row against the dataset's own feature statistics
// (population covariance, diagonal regularization when ill-conditioned).
std::vector<double> mahalanobis_distances(const LabeledDataset& dataset);

// Linear-interpolation empirical quantile of a sample.
double interpolated_quantile(std::vector<double> values, double percentile);

struct SplitSizes {
  int train = 600;
  int validation = 200;
  int test = 200;
};

// Seeded uniform permutation, then contiguous assignment.
void assign_splits(LabeledDataset& dataset, const SplitSizes& sizes, Rng& rng);

std::string dataset_to_csv(const LabeledDataset& dataset);
LabeledDataset dataset_from_csv(const std::string& text);

void save_csv(const LabeledDataset& dataset, const std::string& path);
LabeledDataset load_csv(const std::string& path);

std::string provenance_to_json(const Provenance& p);

}  // namespace airfoil
