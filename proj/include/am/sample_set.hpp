#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <fstream>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "am/csv.hpp"
#include "am/geometry.hpp"
#include "am/kd_tree.hpp"

namespace am {

/// Function value and gradient in cube coordinates.
struct FieldSample {
  double value = 0.0;
  Vec gradient;
};

using CubeField = std::function<FieldSample(std::span<const double>)>;

struct SamplePoint {
  Vec location;
  double value = 0.0;
  Vec gradient;
  Vec unit_gradient;  // zero vector at critical points
  bool critical = false;

  SamplePoint() = default;
  SamplePoint(Vec loc, double f, Vec grad) : location(std::move(loc)), value(f), gradient(std::move(grad)) {
    require_same_dim(location, gradient);
    if (auto u = try_normalize(gradient)) {
      unit_gradient = *std::move(u);
    } else {
      unit_gradient.assign(gradient.size(), 0.0);
      critical = true;
    }
  }
};

struct UniformGridLayout {
  std::size_t points_per_axis = 0;
  double spacing = 0.0;
};

struct ScatteredLayout {};

/// Observations {(p_i, f(p_i), grad f(p_i))} on [-1,1]^m with nearest-sample lookup.
///
/// Full uniform grids answer queries by coordinate rounding; everything else
/// goes through a kd-tree. Both resolve distance ties to the lowest index.
class SampleSet {
 public:
  SampleSet() = default;

  static SampleSet scattered(std::vector<SamplePoint> samples) {
    SampleSet s;
    s.init(std::move(samples));
    s.layout_ = ScatteredLayout{};
    std::vector<double> flat;
    flat.reserve(s.samples_.size() * s.dim_);
    for (const auto& p : s.samples_) flat.insert(flat.end(), p.location.begin(), p.location.end());
    s.tree_ = KdTree(std::move(flat), s.dim_);
    return s;
  }

  /// Samples `field` on n^dim evenly spaced points; axis 0 varies fastest.
  static SampleSet uniform_grid(std::size_t dim, std::size_t n, const CubeField& field) {
    if (dim == 0) throw Error(ErrorCode::DimensionMismatch, "grid dimension must be >= 1");
    if (n < 2) throw Error(ErrorCode::InvalidArgument, "grid needs at least 2 points per axis");
    const double h = 2.0 / static_cast<double>(n - 1);
    std::size_t total = 1;
    for (std::size_t k = 0; k < dim; ++k) total *= n;

    std::vector<SamplePoint> samples;
    samples.reserve(total);
    std::vector<std::size_t> idx(dim, 0);
    Vec loc(dim);
    for (std::size_t flat = 0; flat < total; ++flat) {
      for (std::size_t k = 0; k < dim; ++k) loc[k] = grid_coord(idx[k], n, h);
      FieldSample fs = field(loc);
      samples.emplace_back(loc, fs.value, std::move(fs.gradient));
      for (std::size_t k = 0; k < dim; ++k) {
        if (++idx[k] < n) break;
        idx[k] = 0;
      }
    }
    SampleSet s;
    s.init(std::move(samples));
    s.layout_ = UniformGridLayout{n, h};
    return s;
  }

  /// Subset as a scattered set (used for train/test splits).
  SampleSet subset(std::span<const std::size_t> indices) const {
    std::vector<SamplePoint> out;
    out.reserve(indices.size());
    for (std::size_t i : indices) out.push_back(samples_.at(i));
    return scattered(std::move(out));
  }

  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  std::size_t dimension() const { return dim_; }
  const SamplePoint& operator[](std::size_t i) const { return samples_[i]; }
  const std::vector<SamplePoint>& samples() const { return samples_; }

  std::optional<UniformGridLayout> grid_layout() const {
    if (auto g = std::get_if<UniformGridLayout>(&layout_)) return *g;
    return std::nullopt;
  }

  std::size_t nearest_index(std::span<const double> q) const {
    if (q.size() != dim_) throw Error(ErrorCode::DimensionMismatch, "query dimension mismatch");
    if (empty()) throw Error(ErrorCode::EmptySamples, "nearest-sample query on empty set");
    if (auto g = std::get_if<UniformGridLayout>(&layout_)) return grid_nearest(*g, q);
    return tree_.nearest(q).index;
  }

  const SamplePoint& nearest(std::span<const double> q) const { return samples_[nearest_index(q)]; }

  /// Reference linear scan (first minimum wins).
  std::size_t brute_force_nearest(std::span<const double> q) const {
    std::size_t best = 0;
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      const double d2 = distance_sq(q, samples_[i].location);
      if (d2 < best_d2) best = i, best_d2 = d2;
    }
    return best;
  }

 private:
  static double grid_coord(std::size_t i, std::size_t n, double h) {
    return i + 1 == n ? 1.0 : -1.0 + static_cast<double>(i) * h;
  }

  void init(std::vector<SamplePoint> samples) {
    if (samples.empty()) throw Error(ErrorCode::EmptySamples, "sample set must be non-empty");
    dim_ = samples.front().location.size();
    if (dim_ == 0) throw Error(ErrorCode::DimensionMismatch, "samples must have dimension >= 1");
    for (const auto& p : samples) {
      if (p.location.size() != dim_ || p.gradient.size() != dim_)
        throw Error(ErrorCode::DimensionMismatch, "samples disagree on dimension");
      if (!in_cube(p.location)) throw Error(ErrorCode::OutOfRange, "sample location outside [-1,1]^m");
    }
    samples_ = std::move(samples);
  }

  // Round each axis to the nearest grid index, then settle near-ties by exact
  // distance so the answer matches brute_force_nearest bit for bit.
  std::size_t grid_nearest(const UniformGridLayout& g, std::span<const double> q) const {
    const std::size_t n = g.points_per_axis;
    std::vector<std::array<std::size_t, 2>> cand(dim_);
    std::vector<std::size_t> ncand(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      const double s = (q[k] + 1.0) / g.spacing;
      const double fl = std::floor(s);
      const double frac = s - fl;
      auto clampi = [n](double v) {
        return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n - 1)));
      };
      if (std::abs(frac - 0.5) < 1e-6) {
        cand[k] = {clampi(fl), clampi(fl + 1.0)};
        ncand[k] = cand[k][0] == cand[k][1] ? 1 : 2;
      } else {
        cand[k] = {clampi(frac < 0.5 ? fl : fl + 1.0), 0};
        ncand[k] = 1;
      }
    }
    std::size_t combos = 1;
    for (auto c : ncand) combos *= c;
    std::size_t best = std::numeric_limits<std::size_t>::max();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < combos; ++c) {
      std::size_t rem = c, flat = 0, stride = 1;
      for (std::size_t k = 0; k < dim_; ++k) {
        flat += cand[k][rem % ncand[k]] * stride;
        rem /= ncand[k];
        stride *= n;
      }
      const double d2 = distance_sq(q, samples_[flat].location);
      if (d2 < best_d2 || (d2 == best_d2 && flat < best)) best = flat, best_d2 = d2;
    }
    return best;
  }

  std::vector<SamplePoint> samples_;
  std::size_t dim_ = 0;
  std::variant<ScatteredLayout, UniformGridLayout> layout_;
  KdTree tree_;
};

/// Reads `x1,...,xm,f,g1,...,gm` rows (cube coordinates, gradients already in cube coordinates).
inline SampleSet read_samples_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::ParseError, "empty sample CSV");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = csv::split(line);
  if (header.size() < 3 || header.size() % 2 == 0)
    throw Error(ErrorCode::ParseError, "header must be x1..xm,f,g1..gm");
  const std::size_t m = (header.size() - 1) / 2;
  for (std::size_t k = 0; k < m; ++k) {
    if (header[k] != "x" + std::to_string(k + 1) || header[m + 1 + k] != "g" + std::to_string(k + 1))
      throw Error(ErrorCode::ParseError, "unexpected header column near position " + std::to_string(k + 1));
  }
  if (header[m] != "f") throw Error(ErrorCode::ParseError, "expected column 'f'");

  std::vector<SamplePoint> samples;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (fields.size() != header.size())
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": wrong field count");
    Vec loc(m), grad(m);
    for (std::size_t k = 0; k < m; ++k) {
      loc[k] = csv::parse_double(fields[k]);
      grad[k] = csv::parse_double(fields[m + 1 + k]);
    }
    if (!in_cube(loc)) throw Error(ErrorCode::OutOfRange, "line " + std::to_string(lineno) + ": point outside [-1,1]^m");
    samples.emplace_back(std::move(loc), csv::parse_double(fields[m]), std::move(grad));
  }
  return SampleSet::scattered(std::move(samples));
}

inline SampleSet read_samples_csv(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  return read_samples_csv(f);
}

inline csv::Writer samples_csv(const SampleSet& s) {
  const std::size_t m = s.dimension();
  std::vector<std::string> header;
  for (std::size_t k = 0; k < m; ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("f");
  for (std::size_t k = 0; k < m; ++k) header.push_back("g" + std::to_string(k + 1));
  csv::Writer w(header);
  for (const auto& p : s.samples()) {
    Vec row = p.location;
    row.push_back(p.value);
    row.insert(row.end(), p.gradient.begin(), p.gradient.end());
    w.row(row);
  }
  return w;
}

}  // namespace am
