#include "airfoil/aero.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "airfoil/xfoil.hpp"

namespace airfoil {

namespace {

// Camber-line slope dy_c/ds by central differences. The shared
// leading-edge coefficient keeps the slope bounded at s -> 0.
double camber_slope(const CstParams& params, const ShapeClass& shape, double s) {
  const double h = 1e-6;
  const double lo = std::max(0.0, s - h);
  const double hi = std::min(1.0, s + h);
  auto camber = [&](double u) {
    return 0.5 * (surface_height(params, shape, Side::upper, u) +
                  surface_height(params, shape, Side::lower, u));
  };
  return (camber(hi) - camber(lo)) / (hi - lo);
}

}  // namespace

SolverResult evaluate_surrogate(const CstParams& params, const ShapeClass& shape,
                                const OperatingPoint& op) {
  const auto start = std::chrono::steady_clock::now();
  if (is_self_intersecting(params, shape)) {
    throw std::invalid_argument("surrogate: self-intersecting geometry");
  }

  // Glauert integrals over theta in [0, pi] with s = (1 - cos(theta))/2.
  // Midpoint rule keeps the class-function endpoints out of the sum.
  constexpr int kNodes = 256;
  double i0 = 0.0;  // (1/pi) int dy/dx dtheta
  double i1 = 0.0;  // (1/pi) int dy/dx cos(theta) dtheta
  double i2 = 0.0;  // (1/pi) int dy/dx cos(2 theta) dtheta
  double tau_max = 0.0;
  const double dtheta = M_PI / kNodes;
  for (int k = 0; k < kNodes; ++k) {
    const double theta = (k + 0.5) * dtheta;
    const double s = (1.0 - std::cos(theta)) / 2.0;
    const double slope = camber_slope(params, shape, s);
    i0 += slope * dtheta;
    i1 += slope * std::cos(theta) * dtheta;
    i2 += slope * std::cos(2.0 * theta) * dtheta;
    const double tau = surface_height(params, shape, Side::upper, s) -
                       surface_height(params, shape, Side::lower, s);
    tau_max = std::max(tau_max, tau);
  }
  i0 /= M_PI;
  i1 /= M_PI;
  i2 /= M_PI;

  const double alpha_rad = op.alpha_deg * M_PI / 180.0;
  const double a0 = alpha_rad - i0;
  const double a1 = 2.0 * i1;
  const double a2 = 2.0 * i2;

  AeroFeatures f;
  f.cl = 2.0 * M_PI * (a0 + 0.5 * a1);
  f.cm = -M_PI / 4.0 * (a1 - a2);
  const double cf = 0.074 * std::pow(op.reynolds, -0.2);  // turbulent flat plate
  f.cd = 2.0 * cf * (1.0 + 2.0 * tau_max + 60.0 * std::pow(tau_max, 4)) +
         0.01 * f.cl * f.cl;

  SolverResult result;
  result.features = f;
  result.solver_id = "surrogate";
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "surrogate") return SolverKind::surrogate;
  if (name == "xfoil") return SolverKind::xfoil;
  throw std::invalid_argument("unknown solver '" + name + "' (expected surrogate or xfoil)");
}

std::string to_string(SolverKind kind) {
  return kind == SolverKind::surrogate ? "surrogate" : "xfoil";
}

std::vector<SolverResult> evaluate_batch(std::span<const CstParams> airfoils,
                                         const ShapeClass& shape,
                                         const SolverOptions& options,
                                         int parallelism) {
  if (parallelism < 1) throw std::invalid_argument("evaluate_batch: parallelism must be >= 1");
  if (options.kind == SolverKind::xfoil) {
    resolve_xfoil_binary();  // configuration errors surface before any work
  }
  std::vector<SolverResult> results(airfoils.size());
  if (airfoils.empty()) return results;

  auto evaluate_one = [&](std::size_t i) {
    try {
      if (options.kind == SolverKind::surrogate) {
        results[i] = evaluate_surrogate(airfoils[i], shape, options.op);
      } else {
        const AirfoilCoordinates coords = discretize(airfoils[i], shape, options.n_elements);
        results[i] = evaluate_xfoil(coords, options.op, options.timeout_s);
      }
    } catch (const std::exception& e) {
      results[i].solver_id = to_string(options.kind);
      results[i].error = e.what();
    }
  };

  const int workers = std::min<int>(parallelism, static_cast<int>(airfoils.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < airfoils.size(); ++i) evaluate_one(i);
    return results;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < airfoils.size(); i = next.fetch_add(1)) {
        evaluate_one(i);
      }
    });
  }
  for (auto& th : pool) th.join();
  return results;
}

}  // namespace airfoil
