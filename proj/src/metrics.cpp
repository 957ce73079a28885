#include "airfoil/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace airfoil {

namespace {

double median_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n % 2 == 1) return v[n / 2];
  return 0.5 * (v[n / 2 - 1] + v[n / 2]);  // even count: midpoint of the central pair
}

FeatureErrors errors_for(const std::vector<double>& desired,
                         const std::vector<double>& achieved, bool with_mape) {
  const std::size_t n = desired.size();
  std::vector<double> squares(n);
  double sum_sq = 0.0;
  double sum_ape = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = achieved[i] - desired[i];
    squares[i] = e * e;
    sum_sq += e * e;
    if (with_mape) sum_ape += std::abs(e / desired[i]);
  }
  FeatureErrors out;
  out.rmse = std::sqrt(sum_sq / static_cast<double>(n));
  out.rmdse = std::sqrt(median_sorted(squares));
  if (with_mape) out.mape = 100.0 * sum_ape / static_cast<double>(n);
  return out;
}

double select(const AeroFeatures& f, FeatureKey key) {
  switch (key) {
    case FeatureKey::cl: return f.cl;
    case FeatureKey::cd: return f.cd;
    case FeatureKey::cm: return f.cm;
  }
  return f.cl;
}

nlohmann::json feature_errors_to_json(const FeatureErrors& e) {
  nlohmann::json j;
  j["rmse"] = e.rmse;
  j["rmdse"] = e.rmdse;
  j["mape"] = e.mape.has_value() ? nlohmann::json(*e.mape) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json report_to_json_obj(const ErrorReport& r) {
  nlohmann::json j;
  j["n_pairs"] = r.n_pairs;
  j["n_converged"] = r.n_converged;
  j["n_not_converged"] = r.n_not_converged;
  j["cl"] = feature_errors_to_json(r.cl);
  j["cd"] = feature_errors_to_json(r.cd);
  j["cm"] = feature_errors_to_json(r.cm);
  if (!r.sub_reports.empty()) {
    nlohmann::json subs;
    for (const auto& [name, sub] : r.sub_reports) subs[name] = report_to_json_obj(sub);
    j["sub_reports"] = subs;
  }
  return j;
}

}  // namespace

ErrorReport feature_errors(const std::vector<AeroFeatures>& desired,
                           const std::vector<SolverResult>& achieved) {
  if (desired.size() != achieved.size()) {
    throw std::invalid_argument("feature_errors: length mismatch");
  }
  ErrorReport report;
  report.n_pairs = static_cast<int>(desired.size());
  std::vector<double> d_cl, d_cd, d_cm, a_cl, a_cd, a_cm;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    if (!achieved[i].converged()) {
      ++report.n_not_converged;
      continue;
    }
    const AeroFeatures& a = *achieved[i].features;
    d_cl.push_back(desired[i].cl);
    d_cd.push_back(desired[i].cd);
    d_cm.push_back(desired[i].cm);
    a_cl.push_back(a.cl);
    a_cd.push_back(a.cd);
    a_cm.push_back(a.cm);
  }
  report.n_converged = static_cast<int>(d_cl.size());
  if (report.n_converged == 0) {
    throw std::invalid_argument("feature_errors: no converged pairs");
  }
  report.cl = errors_for(d_cl, a_cl, true);
  report.cd = errors_for(d_cd, a_cd, true);
  report.cm = errors_for(d_cm, a_cm, false);
  return report;
}

ThresholdReport errors_by_threshold(const std::vector<AeroFeatures>& desired,
                                    const std::vector<SolverResult>& achieved,
                                    FeatureKey key, double threshold) {
  if (desired.size() != achieved.size()) {
    throw std::invalid_argument("errors_by_threshold: length mismatch");
  }
  std::vector<AeroFeatures> d_below, d_above;
  std::vector<SolverResult> a_below, a_above;
  for (std::size_t i = 0; i < desired.size(); ++i) {
    if (select(desired[i], key) < threshold) {
      d_below.push_back(desired[i]);
      a_below.push_back(achieved[i]);
    } else {
      d_above.push_back(desired[i]);
      a_above.push_back(achieved[i]);
    }
  }
  ThresholdReport out;
  auto converged_count = [](const std::vector<SolverResult>& rs) {
    return std::count_if(rs.begin(), rs.end(),
                         [](const SolverResult& r) { return r.converged(); });
  };
  if (!d_below.empty() && converged_count(a_below) > 0) {
    out.below = feature_errors(d_below, a_below);
  }
  if (!d_above.empty() && converged_count(a_above) > 0) {
    out.above = feature_errors(d_above, a_above);
  }
  return out;
}

SurfaceSamples sample_surfaces(const CstParams& params, const ShapeClass& shape) {
  constexpr int kStations = 100;
  SurfaceSamples out;
  out.upper.resize(kStations);
  out.lower.resize(kStations);
  for (int k = 0; k < kStations; ++k) {
    const double s = (1.0 - std::cos(M_PI * k / (kStations - 1))) / 2.0;
    out.upper[k] = surface_height(params, shape, Side::upper, s);
    out.lower[k] = surface_height(params, shape, Side::lower, s);
  }
  return out;
}

double geometry_distance(const SurfaceSamples& a, const SurfaceSamples& b) {
  double sum_sq = 0.0;
  for (std::size_t k = 0; k < a.upper.size(); ++k) {
    const double du = a.upper[k] - b.upper[k];
    const double dl = a.lower[k] - b.lower[k];
    sum_sq += du * du + dl * dl;
  }
  return std::sqrt(sum_sq / static_cast<double>(2 * a.upper.size()));
}

double geometry_distance(const CstParams& a, const CstParams& b,
                         const ShapeClass& shape) {
  return geometry_distance(sample_surfaces(a, shape), sample_surfaces(b, shape));
}

NearestResult nearest_training_distance(const CstParams& generated,
                                        const std::vector<CstParams>& training,
                                        const ShapeClass& shape) {
  if (training.empty()) {
    throw std::invalid_argument("nearest_training_distance: empty training set");
  }
  const SurfaceSamples gen = sample_surfaces(generated, shape);
  NearestResult best{std::numeric_limits<double>::infinity(), 0};
  for (int i = 0; i < static_cast<int>(training.size()); ++i) {
    const double d = geometry_distance(gen, sample_surfaces(training[i], shape));
    if (d < best.distance) best = {d, i};
  }
  return best;
}

DiversityStats diversity_stats(const std::vector<CstParams>& samples,
                               const ShapeClass& shape, double tolerance) {
  if (samples.size() < 2) {
    throw std::invalid_argument("diversity_stats: need >= 2 samples");
  }
  std::vector<SurfaceSamples> cached;
  cached.reserve(samples.size());
  for (const CstParams& p : samples) cached.push_back(sample_surfaces(p, shape));

  DiversityStats stats;
  stats.min_pairwise = std::numeric_limits<double>::infinity();
  double sum = 0.0;
  long pairs = 0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = i + 1; j < samples.size(); ++j) {
      const double d = geometry_distance(cached[i], cached[j]);
      sum += d;
      ++pairs;
      stats.min_pairwise = std::min(stats.min_pairwise, d);
    }
  }
  stats.mean_pairwise = sum / static_cast<double>(pairs);

  std::vector<std::size_t> representatives;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bool matched = false;
    for (const std::size_t rep : representatives) {
      if (geometry_distance(cached[i], cached[rep]) <= tolerance) {
        matched = true;
        break;
      }
    }
    if (!matched) representatives.push_back(i);
  }
  stats.distinct_count = static_cast<int>(representatives.size());
  return stats;
}

std::string ErrorReport::to_text() const {
  char buf[256];
  std::string out;
  auto metric_row = [&](const char* name, auto getter) {
    std::string row;
    std::snprintf(buf, sizeof(buf), "%-7s", name);
    row += buf;
    for (const FeatureErrors* fe : {&cl, &cd, &cm}) {
      const std::optional<double> v = getter(*fe);
      if (v.has_value()) {
        std::snprintf(buf, sizeof(buf), " %12.4e", *v);
      } else {
        std::snprintf(buf, sizeof(buf), " %12s", "-");
      }
      row += buf;
    }
    return row + "\n";
  };
  out += "         C_L          C_D          C_M\n";
  out += metric_row("RMSE", [](const FeatureErrors& f) -> std::optional<double> { return f.rmse; });
  out += metric_row("RMdSE", [](const FeatureErrors& f) -> std::optional<double> { return f.rmdse; });
  out += metric_row("MAPE%", [](const FeatureErrors& f) { return f.mape; });
  std::snprintf(buf, sizeof(buf), "pairs: %d  converged: %d  not converged: %d\n",
                n_pairs, n_converged, n_not_converged);
  out += buf;
  for (const auto& [name, sub] : sub_reports) {
    out += "[" + name + "]\n" + sub.to_text();
  }
  return out;
}

std::string ErrorReport::to_json() const {
  return report_to_json_obj(*this).dump(2) + "\n";
}

}  // namespace airfoil
