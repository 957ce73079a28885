#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airfoil/aero.hpp"
#include "airfoil/cst.hpp"

namespace airfoil {

struct FeatureErrors {
  double rmse = 0.0;
  double rmdse = 0.0;
  std::optional<double> mape;  // absent for the zero-centered moment coefficient
};

struct ErrorReport {
  int n_pairs = 0;
  int n_converged = 0;
  int n_not_converged = 0;
  FeatureErrors cl;
  FeatureErrors cd;
  FeatureErrors cm;
  std::map<std::string, ErrorReport> sub_reports;

  std::string to_text() const;
  std::string to_json() const;
};

// RMSE, root-median-squared error and MAPE over the converged pairs;
// MAPE uses the desired value in the denominator and is reported for
// cl and cd only.
ErrorReport feature_errors(const std::vector<AeroFeatures>& desired,
                           const std::vector<SolverResult>& achieved);

enum class FeatureKey { cl, cd, cm };

// Splits the pairs by desired-feature value against the threshold
// (below: value < threshold) and reports metrics per side. An empty
// side is reported as absent.
struct ThresholdReport {
  std::optional<ErrorReport> below;
  std::optional<ErrorReport> above;
};

ThresholdReport errors_by_threshold(const std::vector<AeroFeatures>& desired,
                                    const std::vector<SolverResult>& achieved,
                                    FeatureKey key, double threshold);

// Surface heights sampled at 100 fixed cosine stations; the geometry
// distance is the RMS difference over both surfaces at these stations.
struct SurfaceSamples {
  std::vector<double> upper;
  std::vector<double> lower;
};

SurfaceSamples sample_surfaces(const CstParams& params, const ShapeClass& shape);

double geometry_distance(const SurfaceSamples& a, const SurfaceSamples& b);
double geometry_distance(const CstParams& a, const CstParams& b,
                         const ShapeClass& shape);

struct NearestResult {
  double distance = 0.0;
  int index = 0;
};

// Exhaustive scan over the training set; ties break to the lowest index.
NearestResult nearest_training_distance(const CstParams& generated,
                                        const std::vector<CstParams>& training,
                                        const ShapeClass& shape);

struct DiversityStats {
  double mean_pairwise = 0.0;
  double min_pairwise = 0.0;
  int distinct_count = 0;  // greedy clustering at the given tolerance
};

DiversityStats diversity_stats(const std::vector<CstParams>& samples,
                               const ShapeClass& shape, double tolerance = 1e-3);

}  // namespace airfoil
