#pragma once

#include <array>
#include <span>
#include <string>
#include <vector>

namespace airfoil {

// Airfoil latent vector: one shared leading-edge coefficient plus five
// Bernstein coefficients per side. Flat layout is
// [a0, lower_1..lower_5, upper_1..upper_5].
struct CstParams {
  double a0 = 0.0;
  std::array<double, 5> lower{};
  std::array<double, 5> upper{};

  static constexpr int kDim = 11;

  std::array<double, 11> flatten() const;
  static CstParams unflatten(std::span<const double> v);

  // Full degree-5 coefficient vectors including the shared a0.
  std::array<double, 6> lower_coeffs() const;
  std::array<double, 6> upper_coeffs() const;
};

// Class-function exponents; n1=0.5, n2=1.0 gives a rounded leading edge
// and a sharp trailing edge. Chord is normalized to 1.
struct ShapeClass {
  double n1 = 0.5;
  double n2 = 1.0;
  double chord = 1.0;
};

enum class Side { upper, lower };

// Selig-ordered coordinates: upper trailing edge -> leading edge ->
// lower trailing edge, x/c in [0, 1].
struct AirfoilCoordinates {
  std::vector<std::array<double, 2>> points;
};

// Degree-5 Bernstein form: sum_i A_i C(5,i) s^i (1-s)^(5-i).
double bernstein_eval(std::span<const double, 6> coeffs, double s);

// y/c at chordwise fraction s. The lower surface is the negation of the
// CST expression so positive coefficients put it below the chord line.
double surface_height(const CstParams& params, const ShapeClass& shape,
                      Side side, double s);

// n_elements/2 cosine-spaced stations per side sharing the leading-edge
// point; 2*(n_elements/2) + 1 points total.
AirfoilCoordinates discretize(const CstParams& params, const ShapeClass& shape,
                              int n_elements);

// True iff the discretized surfaces strictly cross or the thickness is
// negative at any of 200 uniform interior stations. Touching surfaces do
// not count.
bool is_self_intersecting(const CstParams& params, const ShapeClass& shape);

// Selig .dat text: name line, then "x y" pairs at fixed 6 decimals.
std::string export_dat(const AirfoilCoordinates& coords,
                       const std::string& name);

struct ImportedAirfoil {
  std::string name;
  AirfoilCoordinates coords;
};

ImportedAirfoil import_dat(const std::string& text);

// Strict crossing of two closed segments, shared endpoints excluded.
bool segments_properly_intersect(const std::array<double, 2>& p1,
                                 const std::array<double, 2>& p2,
                                 const std::array<double, 2>& q1,
                                 const std::array<double, 2>& q2);

}  // namespace airfoil
