#pragma once

#include <optional>
#include <string>
#include <vector>

#include "airfoil/aero.hpp"
#include "airfoil/cst.hpp"

namespace airfoil {

struct AirfoilPlotEntry {
  std::string label;
  AirfoilCoordinates coords;
  std::optional<AeroFeatures> features;
};

// Overlaid outlines with per-airfoil labels; one closed path per airfoil.
std::string render_airfoils_svg(const std::vector<AirfoilPlotEntry>& entries);

// Three pairwise panels: cl-cd, cl-cm, cd-cm.
std::string render_feature_scatter_svg(const std::vector<AeroFeatures>& features);

struct ProcessPanel {
  std::string label;  // e.g. "t = 250"
  AirfoilCoordinates coords;
};

// One panel per snapshot of the noising trajectory.
std::string render_process_svg(const std::vector<ProcessPanel>& panels);

}  // namespace airfoil
