#include "airfoil/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <Eigen/Dense>
#include <json.hpp>

#include "airfoil/errors.hpp"

namespace airfoil {

namespace {
constexpr const char* kCsvHeader =
    "a0,l1,l2,l3,l4,l5,u1,u2,u3,u4,u5,cl,cd,cm,split";
constexpr int kCsvColumns = 15;
constexpr int kAbortWindow = 10000;
constexpr double kMinAcceptanceRate = 0.01;
}  // namespace

std::string to_string(Split split) {
  switch (split) {
    case Split::train: return "train";
    case Split::validation: return "validation";
    case Split::test: return "test";
    case Split::none: return "none";
  }
  return "none";
}

Split split_from_string(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "validation") return Split::validation;
  if (name == "test") return Split::test;
  if (name == "none") return Split::none;
  throw std::invalid_argument("unknown split tag '" + name + "'");
}

std::vector<int> LabeledDataset::split_indices(Split split) const {
  std::vector<int> idx;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i) {
    if (rows[i].split == split) idx.push_back(i);
  }
  return idx;
}

Matrix LabeledDataset::latents(Split split) const {
  Matrix out;
  for (const DatasetRow& r : rows) {
    if (r.split != split) continue;
    const auto flat = r.params.flatten();
    out.emplace_back(flat.begin(), flat.end());
  }
  return out;
}

Matrix LabeledDataset::features(Split split) const {
  Matrix out;
  for (const DatasetRow& r : rows) {
    if (r.split != split) continue;
    out.push_back({r.features.cl, r.features.cd, r.features.cm});
  }
  return out;
}

std::vector<CstParams> sample_raw(Rng& rng, int n, const SamplingRanges& ranges) {
  if (n < 1) throw std::invalid_argument("sample_raw: n must be >= 1");
  std::vector<CstParams> out;
  out.reserve(n);
  for (int k = 0; k < n; ++k) {
    CstParams p;
    p.a0 = rng.uniform(ranges.a0_min, ranges.a0_max);
    for (double& c : p.lower) c = rng.uniform(ranges.coeff_min, ranges.coeff_max);
    for (double& c : p.upper) c = rng.uniform(ranges.coeff_min, ranges.coeff_max);
    out.push_back(p);
  }
  return out;
}

namespace {

// Shared acceptance loop. Candidates are drawn in fixed-size chunks and
// consumed strictly in draw order, so the resulting dataset and the
// rejection tallies are identical for every parallelism level.
void accept_rows(LabeledDataset& dataset, int n_target,
                 const SolverOptions& solver, Rng& rng,
                 const SamplingRanges& ranges, const ShapeClass& shape,
                 int parallelism) {
  constexpr int kChunk = 64;
  long window_candidates = 0;
  long window_accepted = 0;
  while (static_cast<int>(dataset.rows.size()) < n_target) {
    const std::vector<CstParams> candidates = sample_raw(rng, kChunk, ranges);
    std::vector<CstParams> valid;
    std::vector<int> valid_idx;
    for (int ci = 0; ci < kChunk; ++ci) {
      if (!is_self_intersecting(candidates[ci], shape)) {
        valid.push_back(candidates[ci]);
        valid_idx.push_back(ci);
      }
    }
    const std::vector<SolverResult> results =
        evaluate_batch(valid, shape, solver, parallelism);
    std::size_t vi = 0;
    for (int ci = 0; ci < kChunk; ++ci) {
      if (static_cast<int>(dataset.rows.size()) >= n_target) break;
      ++window_candidates;
      if (vi < valid_idx.size() && valid_idx[vi] == ci) {
        if (results[vi].converged()) {
          dataset.rows.push_back({valid[vi], *results[vi].features, Split::none});
          ++window_accepted;
        } else {
          ++dataset.provenance.rejected_unconverged;
        }
        ++vi;
      } else {
        ++dataset.provenance.rejected_geometry;
      }
    }
    if (window_candidates >= kAbortWindow) {
      if (window_accepted < static_cast<long>(kMinAcceptanceRate * window_candidates)) {
        throw ConfigError(
            "dataset generation: acceptance rate below 1% over a 10,000-candidate "
            "window; configuration is likely wrong");
      }
      window_candidates = 0;
      window_accepted = 0;
    }
  }
}

}  // namespace

LabeledDataset build_dataset(int n_target, const SolverOptions& solver, Rng& rng,
                             const SamplingRanges& ranges, const ShapeClass& shape,
                             int parallelism) {
  if (n_target < 1) throw std::invalid_argument("build_dataset: n_target must be >= 1");
  LabeledDataset dataset;
  dataset.provenance.solver_id = to_string(solver.kind);
  dataset.provenance.op = solver.op;
  accept_rows(dataset, n_target, solver, rng, ranges, shape, parallelism);
  return dataset;
}

void top_up(LabeledDataset& dataset, int n_target, const SolverOptions& solver,
            Rng& rng, const SamplingRanges& ranges, const ShapeClass& shape,
            int parallelism) {
  accept_rows(dataset, n_target, solver, rng, ranges, shape, parallelism);
}

double interpolated_quantile(std::vector<double> values, double percentile) {
  if (values.empty()) throw std::invalid_argument("interpolated_quantile: empty sample");
  std::sort(values.begin(), values.end());
  const double h = percentile / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= values.size()) return values.back();
  return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<double> mahalanobis_distances(const LabeledDataset& dataset) {
  const int n = static_cast<int>(dataset.rows.size());
  if (n < 4) throw std::invalid_argument("mahalanobis: need >= 4 rows");

  Eigen::MatrixXd f(n, 3);
  for (int i = 0; i < n; ++i) {
    f(i, 0) = dataset.rows[i].features.cl;
    f(i, 1) = dataset.rows[i].features.cd;
    f(i, 2) = dataset.rows[i].features.cm;
  }
  const Eigen::RowVector3d mean = f.colwise().mean();
  const Eigen::MatrixXd centered = f.rowwise() - mean;
  Eigen::Matrix3d cov = centered.transpose() * centered / static_cast<double>(n);

  const double ridge = 1e-12 * cov.trace() / 3.0;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
  if (eig.eigenvalues().minCoeff() < ridge) {
    cov.diagonal().array() += ridge;
    eig.compute(cov);
  }
  if (!(eig.eigenvalues().minCoeff() > 0.0)) {
    throw ConfigError("mahalanobis: singular feature covariance after regularization");
  }

  const Eigen::LLT<Eigen::Matrix3d> llt(cov);
  std::vector<double> distances(n);
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector3d d = centered.row(i).transpose();
    distances[i] = std::sqrt(d.dot(llt.solve(d)));
  }
  return distances;
}

LabeledDataset mahalanobis_filter(const LabeledDataset& dataset, double percentile) {
  const std::vector<double> distances = mahalanobis_distances(dataset);
  const double cutoff = interpolated_quantile(distances, percentile);
  LabeledDataset filtered;
  filtered.provenance = dataset.provenance;
  for (std::size_t i = 0; i < dataset.rows.size(); ++i) {
    if (distances[i] > cutoff) {
      ++filtered.provenance.filtered_outliers;
    } else {
      filtered.rows.push_back(dataset.rows[i]);
    }
  }
  return filtered;
}

void assign_splits(LabeledDataset& dataset, const SplitSizes& sizes, Rng& rng) {
  const int n = static_cast<int>(dataset.rows.size());
  const long total = static_cast<long>(sizes.train) + sizes.validation + sizes.test;
  if (sizes.train < 0 || sizes.validation < 0 || sizes.test < 0 || total > n) {
    throw std::invalid_argument("assign_splits: sizes exceed row count");
  }
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(rng.integer(static_cast<std::uint64_t>(i) + 1));
    std::swap(perm[i], perm[j]);
  }
  for (DatasetRow& r : dataset.rows) r.split = Split::none;
  int at = 0;
  for (int k = 0; k < sizes.train; ++k) dataset.rows[perm[at++]].split = Split::train;
  for (int k = 0; k < sizes.validation; ++k) dataset.rows[perm[at++]].split = Split::validation;
  for (int k = 0; k < sizes.test; ++k) dataset.rows[perm[at++]].split = Split::test;
}

std::string dataset_to_csv(const LabeledDataset& dataset) {
  std::string out = std::string(kCsvHeader) + "\n";
  char buf[32];
  for (const DatasetRow& r : dataset.rows) {
    const auto flat = r.params.flatten();
    std::string line;
    for (double v : flat) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      line += buf;
      line += ',';
    }
    for (double v : {r.features.cl, r.features.cd, r.features.cm}) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      line += buf;
      line += ',';
    }
    line += to_string(r.split);
    out += line;
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_cell(const std::string& cell, int row, int col) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end == cell.c_str() || *end != '\0') {
    throw std::invalid_argument("dataset csv: non-numeric cell at row " +
                                std::to_string(row) + ", column " + std::to_string(col + 1));
  }
  return v;
}

}  // namespace

LabeledDataset dataset_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("dataset csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const std::vector<std::string> header = split_fields(line);
  const std::vector<std::string> expected = split_fields(kCsvHeader);
  if (header != expected) {
    std::string missing;
    for (const std::string& col : expected) {
      if (std::find(header.begin(), header.end(), col) == header.end()) {
        if (!missing.empty()) missing += ", ";
        missing += col;
      }
    }
    if (!missing.empty()) {
      throw std::invalid_argument("dataset csv: malformed header; missing column(s): " + missing);
    }
    throw std::invalid_argument("dataset csv: malformed header: expected '" +
                                std::string(kCsvHeader) + "'");
  }

  LabeledDataset dataset;
  int row_no = 1;
  while (std::getline(in, line)) {
    ++row_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_fields(line);
    if (static_cast<int>(fields.size()) != kCsvColumns) {
      throw std::invalid_argument("dataset csv: row " + std::to_string(row_no) + " has " +
                                  std::to_string(fields.size()) + " columns, expected " +
                                  std::to_string(kCsvColumns));
    }
    DatasetRow r;
    std::array<double, 11> flat{};
    for (int j = 0; j < 11; ++j) flat[j] = parse_cell(fields[j], row_no, j);
    r.params = CstParams::unflatten(flat);
    r.features.cl = parse_cell(fields[11], row_no, 11);
    r.features.cd = parse_cell(fields[12], row_no, 12);
    r.features.cm = parse_cell(fields[13], row_no, 13);
    r.split = split_from_string(fields[14]);
    dataset.rows.push_back(r);
  }
  return dataset;
}

void save_csv(const LabeledDataset& dataset, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw EnvironmentError("dataset csv: cannot open for write: " + path);
  out << dataset_to_csv(dataset);
  if (!out) throw EnvironmentError("dataset csv: write failure: " + path);
}

LabeledDataset load_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw EnvironmentError("dataset csv: cannot open: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return dataset_from_csv(text);
}

std::string provenance_to_json(const Provenance& p) {
  nlohmann::json j;
  j["seed"] = p.seed;
  j["solver"] = p.solver_id;
  j["reynolds"] = p.op.reynolds;
  j["alpha_deg"] = p.op.alpha_deg;
  j["rejected_geometry"] = p.rejected_geometry;
  j["rejected_unconverged"] = p.rejected_unconverged;
  j["filtered_outliers"] = p.filtered_outliers;
  return j.dump(2) + "\n";
}

}  // namespace airfoil
