#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "airfoil/cst.hpp"

namespace airfoil {

struct OperatingPoint {
  double reynolds = 1e6;
  double alpha_deg = 5.0;
};

struct AeroFeatures {
  double cl = 0.0;
  double cd = 0.0;
  double cm = 0.0;  // about the quarter chord
};

// One evaluation outcome. Empty features means the solver did not
// converge; a non-empty error marks a failed evaluation inside a batch.
struct SolverResult {
  std::optional<AeroFeatures> features;
  std::string solver_id;
  double wall_time_s = 0.0;
  std::string error;

  bool converged() const { return features.has_value(); }
  bool failed() const { return !error.empty(); }
};

// Thin-airfoil lift/moment from the camber-line Fourier coefficients
// plus an empirical drag proxy. Hermetic: always converges for finite
// inputs. Throws std::invalid_argument on self-intersecting geometry.
SolverResult evaluate_surrogate(const CstParams& params, const ShapeClass& shape,
                                const OperatingPoint& op);

enum class SolverKind { surrogate, xfoil };

SolverKind solver_kind_from_string(const std::string& name);
std::string to_string(SolverKind kind);

struct SolverOptions {
  SolverKind kind = SolverKind::surrogate;
  OperatingPoint op;
  double timeout_s = 20.0;
  int n_elements = 100;  // discretization handed to the external solver
};

// Evaluates each airfoil in isolation; results come back in input order
// for any parallelism level, and a per-item failure is recorded in its
// slot instead of aborting the batch. Configuration errors (for example
// a missing external binary) propagate.
std::vector<SolverResult> evaluate_batch(std::span<const CstParams> airfoils,
                                         const ShapeClass& shape,
                                         const SolverOptions& options,
                                         int parallelism);

}  // namespace airfoil
