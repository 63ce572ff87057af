#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "am/csv.hpp"
#include "am/kd_tree.hpp"
#include "am/sample_set.hpp"

namespace am {

/// Step size and tolerances shared by manifold construction and level-set walks.
struct TraversalConfig {
  double delta = 0.0;                    // step length (cube units)
  double epsilon = 0.0;                  // closeness tolerance for reaching the manifold
  double closeness_fraction = 1.0 / 3.0; // loop guard radius as a fraction of delta
  std::size_t max_steps = 0;             // 0 selects 10 * (2 sqrt(m)) / delta
  double colinear_tol = 0.1;             // |v| below this counts as colinear with the gradient

  /// delta = 2d/3 with d the longest diagonal of a grid cell; epsilon = grid spacing.
  static TraversalConfig for_grid(std::size_t dim, std::size_t points_per_axis) {
    const double h = 2.0 / static_cast<double>(points_per_axis - 1);
    const double diag = h * std::sqrt(static_cast<double>(dim));
    return TraversalConfig{2.0 * diag / 3.0, h};
  }

  void validate() const {
    if (!(delta > 0.0)) throw Error(ErrorCode::InvalidArgument, "delta must be > 0");
    if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "epsilon must be > 0");
    if (!(colinear_tol > 0.0 && colinear_tol < 1.0))
      throw Error(ErrorCode::InvalidArgument, "colinear_tol must lie in (0,1)");
    if (!(closeness_fraction > 0.0 && closeness_fraction < 1.0))
      throw Error(ErrorCode::InvalidArgument, "closeness_fraction must lie in (0,1)");
  }

  std::size_t step_cap(std::size_t dim) const {
    if (max_steps > 0) return max_steps;
    return static_cast<std::size_t>(std::ceil(10.0 * 2.0 * std::sqrt(static_cast<double>(dim)) / delta));
  }

  double guard_radius() const { return delta * closeness_fraction; }
};

/// Where f-values recorded along the manifold come from.
enum class ValueSource {
  NearestSample,  // f at the nearest observation
  FirstOrder,     // f + <grad f, gamma - p> at the nearest observation p
  Exact,          // re-evaluate an analytic model at the walker
};

enum class Termination { ExitedCube, LoopDetected, CriticalPoint, MaxSteps };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::ExitedCube: return "ExitedCube";
    case Termination::LoopDetected: return "LoopDetected";
    case Termination::CriticalPoint: return "CriticalPoint";
    case Termination::MaxSteps: return "MaxSteps";
  }
  return "?";
}

/// Growing set of positions with a radius query; linear scan over packed storage.
class PointTrail {
 public:
  explicit PointTrail(std::size_t dim) : dim_(dim) {}

  void push(std::span<const double> p) { flat_.insert(flat_.end(), p.begin(), p.end()); }

  bool any_within(std::span<const double> q, double radius) const {
    const double r2 = radius * radius;
    for (std::size_t off = 0; off < flat_.size(); off += dim_)
      if (distance_sq(q, std::span<const double>(flat_.data() + off, dim_)) <= r2) return true;
    return false;
  }

  std::size_t size() const { return flat_.size() / dim_; }

 private:
  std::size_t dim_;
  std::vector<double> flat_;
};

/// Discretized gradient streamline gamma_0..gamma_N with values z_i and params t_i = i/N.
class ActiveManifold {
 public:
  ActiveManifold() = default;

  const std::vector<Vec>& points() const { return points_; }
  const Vec& values() const { return values_; }
  const Vec& params() const { return params_; }
  std::size_t size() const { return points_.size(); }
  std::size_t dimension() const { return points_.empty() ? 0 : points_.front().size(); }
  std::size_t seed_index() const { return seed_index_; }
  Termination descent_end() const { return descent_end_; }
  Termination ascent_end() const { return ascent_end_; }

  std::size_t nearest_index(std::span<const double> q) const { return index_.nearest(q).index; }

  friend ActiveManifold arclength_parameterize(std::vector<Vec> points, Vec values, std::size_t seed_index);
  friend class ManifoldBuilder;

 private:
  std::vector<Vec> points_;
  Vec values_;
  Vec params_;
  std::size_t seed_index_ = 0;
  Termination descent_end_ = Termination::ExitedCube;
  Termination ascent_end_ = Termination::ExitedCube;
  KdTree index_;
};

/// Attaches t_i = i/N. Values must be strictly increasing.
inline ActiveManifold arclength_parameterize(std::vector<Vec> points, Vec values, std::size_t seed_index = 0) {
  if (points.size() != values.size()) throw Error(ErrorCode::LengthMismatch, "points and values differ in length");
  if (points.size() < 2) throw Error(ErrorCode::DegenerateManifold, "a manifold needs at least 2 points");
  for (std::size_t i = 0; i + 1 < values.size(); ++i)
    if (!(values[i] < values[i + 1]))
      throw Error(ErrorCode::NonMonotoneValues, "values not strictly increasing at index " + std::to_string(i));
  const std::size_t dim = points.front().size();
  std::vector<double> flat;
  flat.reserve(points.size() * dim);
  for (const auto& p : points) {
    if (p.size() != dim) throw Error(ErrorCode::DimensionMismatch, "manifold points disagree on dimension");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  ActiveManifold am;
  const double n = static_cast<double>(points.size() - 1);
  am.params_.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) am.params_[i] = static_cast<double>(i) / n;
  am.points_ = std::move(points);
  am.values_ = std::move(values);
  am.seed_index_ = seed_index;
  am.index_ = KdTree(std::move(flat), dim);
  return am;
}

/// Nearest-neighbour gradient ascent/descent from a seed point.
class ManifoldBuilder {
 public:
  ManifoldBuilder(const SampleSet& samples, TraversalConfig cfg, ValueSource source = ValueSource::FirstOrder,
                  const CubeField* exact = nullptr)
      : samples_(samples), cfg_(cfg), source_(source), exact_(exact) {
    cfg_.validate();
    if (samples_.empty()) throw Error(ErrorCode::EmptySamples, "cannot build a manifold without samples");
    if (source_ == ValueSource::Exact && exact_ == nullptr)
      throw Error(ErrorCode::InvalidArgument, "exact values requested without a model");
  }

  ActiveManifold build(std::span<const double> seed) const {
    if (seed.size() != samples_.dimension()) throw Error(ErrorCode::DimensionMismatch, "seed dimension mismatch");
    if (!in_cube(seed)) throw Error(ErrorCode::SeedOutsideCube, "seed must lie in [-1,1]^m");

    const Vec seed_vec(seed.begin(), seed.end());
    const double seed_value = value_at(seed_vec);
    PointTrail trail(samples_.dimension());
    trail.push(seed_vec);

    Walk down = walk(seed_vec, seed_value, -1.0, trail);
    Walk up = walk(seed_vec, seed_value, +1.0, trail);

    std::vector<Vec> points;
    Vec values;
    points.reserve(down.points.size() + up.points.size() + 1);
    for (std::size_t i = down.points.size(); i-- > 0;) {
      points.push_back(std::move(down.points[i]));
      values.push_back(down.values[i]);
    }
    const std::size_t seed_index = points.size();
    points.push_back(seed_vec);
    values.push_back(seed_value);
    for (std::size_t i = 0; i < up.points.size(); ++i) {
      points.push_back(std::move(up.points[i]));
      values.push_back(up.values[i]);
    }
    if (points.size() < 2)
      throw Error(ErrorCode::DegenerateManifold, "walk from seed produced a single point (critical seed?)");
    ActiveManifold am = arclength_parameterize(std::move(points), std::move(values), seed_index);
    am.descent_end_ = down.end;
    am.ascent_end_ = up.end;
    return am;
  }

  const TraversalConfig& config() const { return cfg_; }

 private:
  struct Walk {
    std::vector<Vec> points;
    Vec values;
    Termination end = Termination::MaxSteps;
  };

  double value_at(const Vec& x) const {
    if (source_ == ValueSource::Exact) return (*exact_)(x).value;
    const SamplePoint& s = samples_.nearest(x);
    if (source_ == ValueSource::NearestSample) return s.value;
    return s.value + dot(s.gradient, subtract(x, s.location));
  }

  Walk walk(const Vec& seed, double seed_value, double sign, PointTrail& trail) const {
    Walk w;
    const std::size_t cap = cfg_.step_cap(samples_.dimension());
    Vec current = seed;
    double current_value = seed_value;
    for (std::size_t step = 0;; ++step) {
      if (step >= cap) {
        w.end = Termination::MaxSteps;
        break;
      }
      const SamplePoint& s = samples_.nearest(current);
      if (s.critical) {
        w.end = Termination::CriticalPoint;
        break;
      }
      Vec next = add_scaled(current, sign * cfg_.delta, s.unit_gradient);
      if (!in_cube(next)) {
        w.end = Termination::ExitedCube;
        break;
      }
      if (trail.any_within(next, cfg_.guard_radius())) {
        w.end = Termination::LoopDetected;
        break;
      }
      const double next_value = value_at(next);
      // A step that fails to move f in the walk direction is discretization
      // noise; stop rather than emit non-monotone values.
      if (!(sign * (next_value - current_value) > 0.0)) {
        w.end = Termination::LoopDetected;
        break;
      }
      trail.push(next);
      w.points.push_back(next);
      w.values.push_back(next_value);
      current = std::move(next);
      current_value = next_value;
    }
    return w;
  }

  const SampleSet& samples_;
  TraversalConfig cfg_;
  ValueSource source_;
  const CubeField* exact_;
};

inline ActiveManifold build_manifold(const SampleSet& samples, std::span<const double> seed, const TraversalConfig& cfg,
                                     ValueSource source = ValueSource::FirstOrder, const CubeField* exact = nullptr) {
  return ManifoldBuilder(samples, cfg, source, exact).build(seed);
}

/// CSV `t,x1,...,xm,f`.
inline csv::Writer manifold_csv(const ActiveManifold& am) {
  std::vector<std::string> header{"t"};
  for (std::size_t k = 0; k < am.dimension(); ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("f");
  csv::Writer w(header);
  for (std::size_t i = 0; i < am.size(); ++i) {
    Vec row{am.params()[i]};
    row.insert(row.end(), am.points()[i].begin(), am.points()[i].end());
    row.push_back(am.values()[i]);
    w.row(row);
  }
  return w;
}

}  // namespace am
