#include "airfoil/cst.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace airfoil {

namespace {
constexpr std::array<double, 6> kBinom5 = {1.0, 5.0, 10.0, 10.0, 5.0, 1.0};

double class_function(const ShapeClass& shape, double s) {
  if (s <= 0.0 || s >= 1.0) return 0.0;
  return std::pow(s, shape.n1) * std::pow(1.0 - s, shape.n2);
}
}  // namespace

std::array<double, 11> CstParams::flatten() const {
  std::array<double, 11> v{};
  v[0] = a0;
  for (int i = 0; i < 5; ++i) v[1 + i] = lower[i];
  for (int i = 0; i < 5; ++i) v[6 + i] = upper[i];
  return v;
}

CstParams CstParams::unflatten(std::span<const double> v) {
  if (v.size() != 11) throw std::invalid_argument("CstParams: expected 11 values");
  CstParams p;
  p.a0 = v[0];
  for (int i = 0; i < 5; ++i) p.lower[i] = v[1 + i];
  for (int i = 0; i < 5; ++i) p.upper[i] = v[6 + i];
  return p;
}

std::array<double, 6> CstParams::lower_coeffs() const {
  return {a0, lower[0], lower[1], lower[2], lower[3], lower[4]};
}

std::array<double, 6> CstParams::upper_coeffs() const {
  return {a0, upper[0], upper[1], upper[2], upper[3], upper[4]};
}

double bernstein_eval(std::span<const double, 6> coeffs, double s) {
  const double t = 1.0 - s;
  // Horner-free direct sum; 6 terms, exact at the endpoints.
  double acc = 0.0;
  double sp = 1.0;  // s^i
  for (int i = 0; i <= 5; ++i) {
    const double tp = std::pow(t, 5 - i);
    acc += coeffs[i] * kBinom5[i] * sp * tp;
    sp *= s;
  }
  return acc;
}

double surface_height(const CstParams& params, const ShapeClass& shape,
                      Side side, double s) {
  const double cls = class_function(shape, s);
  if (cls == 0.0) return 0.0;
  if (side == Side::upper) {
    return cls * bernstein_eval(params.upper_coeffs(), s);
  }
  return -(cls * bernstein_eval(params.lower_coeffs(), s));
}

AirfoilCoordinates discretize(const CstParams& params, const ShapeClass& shape,
                              int n_elements) {
  if (n_elements < 4) throw std::invalid_argument("discretize: n_elements must be >= 4");
  const int m = n_elements / 2;  // stations per side, LE shared
  AirfoilCoordinates out;
  out.points.reserve(2 * m + 1);
  auto station = [&](int k) { return (1.0 - std::cos(M_PI * k / m)) / 2.0; };
  for (int k = m; k >= 0; --k) {
    const double s = station(k);
    out.points.push_back({s, surface_height(params, shape, Side::upper, s)});
  }
  for (int k = 1; k <= m; ++k) {
    const double s = station(k);
    out.points.push_back({s, surface_height(params, shape, Side::lower, s)});
  }
  // Pin the endpoints: cos() noise must not leak into the x column.
  out.points.front()[0] = 1.0;
  out.points.back()[0] = 1.0;
  out.points[m][0] = 0.0;
  return out;
}

bool segments_properly_intersect(const std::array<double, 2>& p1,
                                 const std::array<double, 2>& p2,
                                 const std::array<double, 2>& q1,
                                 const std::array<double, 2>& q2) {
  auto cross = [](const std::array<double, 2>& o, const std::array<double, 2>& a,
                  const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  };
  const double d1 = cross(q1, q2, p1);
  const double d2 = cross(q1, q2, p2);
  const double d3 = cross(p1, p2, q1);
  const double d4 = cross(p1, p2, q2);
  // Strict sign changes on both segments; touching or collinear contact
  // is not a proper crossing.
  return ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) &&
         ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0));
}

bool is_self_intersecting(const CstParams& params, const ShapeClass& shape) {
  // Negative thickness at any of 200 uniform interior stations.
  constexpr int kStations = 200;
  for (int k = 1; k <= kStations; ++k) {
    const double s = static_cast<double>(k) / (kStations + 1);
    const double thickness = surface_height(params, shape, Side::upper, s) -
                             surface_height(params, shape, Side::lower, s);
    if (thickness < 0.0) return true;
  }
  // Strict crossings between discretized upper and lower segments.
  const AirfoilCoordinates coords = discretize(params, shape, 100);
  const int m = (static_cast<int>(coords.points.size()) - 1) / 2;
  // Upper polyline: points [0, m]; lower polyline: points [m, 2m].
  for (int i = 0; i < m; ++i) {
    for (int j = m; j < 2 * m; ++j) {
      if (segments_properly_intersect(coords.points[i], coords.points[i + 1],
                                      coords.points[j], coords.points[j + 1])) {
        return true;
      }
    }
  }
  return false;
}

std::string export_dat(const AirfoilCoordinates& coords,
                       const std::string& name) {
  std::string out = name + "\n";
  char line[64];
  for (const auto& p : coords.points) {
    std::snprintf(line, sizeof(line), "%.6f %.6f\n", p[0], p[1]);
    out += line;
  }
  return out;
}

ImportedAirfoil import_dat(const std::string& text) {
  std::istringstream in(text);
  ImportedAirfoil result;
  if (!std::getline(in, result.name)) {
    throw std::invalid_argument("import_dat: empty file");
  }
  std::string line;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    double x = 0.0;
    double y = 0.0;
    if (std::sscanf(line.c_str(), "%lf %lf", &x, &y) != 2) {
      throw std::invalid_argument("import_dat: bad coordinate line " +
                                  std::to_string(line_no));
    }
    result.coords.points.push_back({x, y});
  }
  if (result.coords.points.size() < 3) {
    throw std::invalid_argument("import_dat: too few points");
  }
  return result;
}

}  // namespace airfoil
