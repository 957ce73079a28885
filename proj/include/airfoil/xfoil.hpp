#pragma once

#include <optional>
#include <string>

#include "airfoil/aero.hpp"
#include "airfoil/cst.hpp"

namespace airfoil {

// Locates the external solver binary: $XFOIL_PATH if set, otherwise a
// binary named "xfoil" on the search path. Throws EnvironmentError when
// neither resolves.
std::string resolve_xfoil_binary();

// Runs the external solver on a Selig-format airfoil at one operating
// point: viscous analysis at the given Reynolds number, iteration cap
// 100, one-alpha polar accumulation. Returns NotConverged when the
// polar data line is absent or the process exceeds the timeout; throws
// on configuration or protocol failures.
SolverResult evaluate_xfoil(const AirfoilCoordinates& coords,
                            const OperatingPoint& op, double timeout_s);

// Extracts (cl, cd, cm) from polar-accumulation text; empty when no
// converged data line is present.
std::optional<AeroFeatures> parse_polar_text(const std::string& text);

}  // namespace airfoil
