#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "am/manifold.hpp"
#include "am/parallel.hpp"
#include "am/spline.hpp"

namespace am {

inline constexpr double kColinearTol = 0.1;

/// Which rule produced a level-set step direction.
enum class DirectionRule { TowardManifold, Momentum, TowardOrigin, FixedBasis };

struct StepDirection {
  Vec v;  // unit length, orthogonal to the walker gradient
  DirectionRule rule;
};

/// u - <u,g> g, i.e. the part of u tangent to the level set when |g| = 1.
inline Vec tangent_component(std::span<const double> u, std::span<const double> g) {
  return add_scaled(u, -dot(u, g), g);
}

namespace detail {

inline std::optional<Vec> accept_tangent(std::span<const double> u, std::span<const double> g, double tol) {
  Vec v = tangent_component(u, g);
  const double n = norm(v);
  if (!(n > tol)) return std::nullopt;
  for (double& c : v) c /= n;
  // One more projection pass removes the rounding left by the normalization.
  v = tangent_component(v, g);
  const double n2 = norm(v);
  for (double& c : v) c /= n2;
  return v;
}

}  // namespace detail

/// Direction for the next level-set step from p, given the unit gradient g at p
/// and the nearest manifold point. Falls back through momentum, toward-origin,
/// then the first basis vector not colinear with g.
inline std::optional<StepDirection> step_direction(std::span<const double> p, std::span<const double> g,
                                                   std::span<const double> nearest_manifold_point,
                                                   const Vec* prev = nullptr, double colinear_tol = kColinearTol) {
  require_same_dim(p, g);
  require_same_dim(p, nearest_manifold_point);
  auto try_toward = [&](const Vec& w) -> std::optional<Vec> {
    const double n = norm(w);
    if (!(n > 0.0)) return std::nullopt;
    return detail::accept_tangent(scaled(w, 1.0 / n), g, colinear_tol);
  };

  if (auto v = try_toward(subtract(nearest_manifold_point, p))) return StepDirection{*v, DirectionRule::TowardManifold};
  if (prev != nullptr) {
    if (auto v = try_toward(subtract(p, *prev))) return StepDirection{*v, DirectionRule::Momentum};
  }
  if (auto v = try_toward(scaled(p, -1.0))) return StepDirection{*v, DirectionRule::TowardOrigin};
  for (std::size_t k = 0; k < p.size(); ++k) {
    Vec e(p.size(), 0.0);
    e[k] = 1.0;
    if (auto v = detail::accept_tangent(e, g, colinear_tol)) return StepDirection{*v, DirectionRule::FixedBasis};
  }
  return std::nullopt;
}

struct SegmentIntersection {
  double s0 = 0.0;
  bool degenerate = false;  // <m+ - m, g> == 0; fell back to s0 = 0
  bool clamped = false;     // raw s0 fell outside [0,1]
};

/// s0 with (M(s0) - p) ⟂ g on M(s) = m + s (m+ - m), clamped to [0,1].
inline SegmentIntersection segment_intersection(std::span<const double> p, std::span<const double> g,
                                                std::span<const double> m, std::span<const double> m_plus) {
  const Vec seg = subtract(m_plus, m);
  const double denom = dot(seg, g);
  if (denom == 0.0 || !std::isfinite(denom)) return {0.0, true, false};
  const double s = dot(subtract(p, m), g) / denom;
  const double c = std::clamp(s, 0.0, 1.0);
  return {c, false, c != s};
}

enum class ProjectionStatus { Converged, ExitedCube, SelfIntersected, MaxSteps };

inline const char* to_string(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::Converged: return "Converged";
    case ProjectionStatus::ExitedCube: return "ExitedCube";
    case ProjectionStatus::SelfIntersected: return "SelfIntersected";
    case ProjectionStatus::MaxSteps: return "MaxSteps";
  }
  return "?";
}

struct ProjectionOutcome {
  ProjectionStatus status = ProjectionStatus::MaxSteps;
  std::optional<double> estimate;
  std::optional<double> t_star;
  std::vector<Vec> path;
  std::size_t steps = 0;
  double max_tangent_residual = 0.0;  // max |<v, g>| over accepted steps
  SegmentIntersection segment;

  bool converged() const { return status == ProjectionStatus::Converged; }
};

/// Walks a point along its level set until it reaches the active manifold, then
/// reads the surrogate at the intersection parameter.
class LevelSetProjector {
 public:
  LevelSetProjector(const SampleSet& samples, const ActiveManifold& manifold, const MonotoneSpline& spline,
                    TraversalConfig cfg, const CubeField* exact = nullptr)
      : samples_(samples), manifold_(manifold), spline_(spline), cfg_(cfg), exact_(exact) {
    cfg_.validate();
    if (manifold_.size() < 2) throw Error(ErrorCode::DegenerateManifold, "projection needs a built manifold");
  }

  ProjectionOutcome project(std::span<const double> start) const {
    if (start.size() != samples_.dimension()) throw Error(ErrorCode::DimensionMismatch, "point dimension mismatch");
    if (!in_cube(start)) throw Error(ErrorCode::OutOfRange, "projection start must lie in [-1,1]^m");

    ProjectionOutcome out;
    const std::size_t cap = cfg_.step_cap(samples_.dimension());
    PointTrail trail(samples_.dimension());
    Vec p(start.begin(), start.end());
    Vec prev;
    out.path.push_back(p);
    trail.push(p);

    for (;;) {
      const std::size_t k = manifold_.nearest_index(p);
      const Vec& m = manifold_.points()[k];
      const Vec g = unit_gradient_at(p);
      if (distance(p, m) <= cfg_.epsilon) {
        finish(out, p, g, k);
        return out;
      }
      if (out.steps >= cap) {
        out.status = ProjectionStatus::MaxSteps;
        return out;
      }
      auto dir = step_direction(p, g, m, prev.empty() ? nullptr : &prev, cfg_.colinear_tol);
      if (!dir) {
        out.status = ProjectionStatus::SelfIntersected;
        return out;
      }
      out.max_tangent_residual = std::max(out.max_tangent_residual, std::abs(dot(dir->v, g)));
      Vec next = add_scaled(p, cfg_.delta, dir->v);
      if (!in_cube(next)) {
        out.status = ProjectionStatus::ExitedCube;
        return out;
      }
      if (trail.any_within(next, cfg_.guard_radius())) {
        out.status = ProjectionStatus::SelfIntersected;
        return out;
      }
      trail.push(next);
      out.path.push_back(next);
      ++out.steps;
      prev = std::move(p);
      p = std::move(next);
    }
  }

  /// Projects every point; outcome i belongs to points[i].
  std::vector<ProjectionOutcome> project_all(const std::vector<Vec>& points, std::size_t workers = 0) const {
    std::vector<ProjectionOutcome> out(points.size());
    parallel_for(points.size(), [&](std::size_t i) { out[i] = project(points[i]); }, workers);
    return out;
  }

 private:
  Vec unit_gradient_at(const Vec& p) const {
    if (exact_ != nullptr) {
      const FieldSample fs = (*exact_)(p);
      if (auto u = try_normalize(fs.gradient)) return *u;
      return Vec(p.size(), 0.0);
    }
    return samples_.nearest(p).unit_gradient;
  }

  void finish(ProjectionOutcome& out, const Vec& p, const Vec& g, std::size_t k) const {
    const auto& pts = manifold_.points();
    const auto& ts = manifold_.params();
    std::size_t other;
    if (k == 0) {
      other = 1;
    } else if (k + 1 == pts.size()) {
      other = k - 1;
    } else {
      other = distance_sq(p, pts[k - 1]) <= distance_sq(p, pts[k + 1]) ? k - 1 : k + 1;
    }
    out.segment = segment_intersection(p, g, pts[k], pts[other]);
    const double t0 = ts[k] + out.segment.s0 * (ts[other] - ts[k]);
    out.status = ProjectionStatus::Converged;
    out.t_star = t0;
    out.estimate = spline_(t0);
  }

  const SampleSet& samples_;
  const ActiveManifold& manifold_;
  const MonotoneSpline& spline_;
  TraversalConfig cfg_;
  const CubeField* exact_;
};

inline ProjectionOutcome project_to_manifold(std::span<const double> p, const SampleSet& samples,
                                             const ActiveManifold& manifold, const MonotoneSpline& spline,
                                             const TraversalConfig& cfg, const CubeField* exact = nullptr) {
  return LevelSetProjector(samples, manifold, spline, cfg, exact).project(p);
}

/// CSV `step,x1,...,xm,status`; consecutive traces restart at step 0.
inline csv::Writer trace_csv(const std::vector<ProjectionOutcome>& outcomes, std::size_t dim) {
  std::vector<std::string> header{"step"};
  for (std::size_t k = 0; k < dim; ++k) header.push_back("x" + std::to_string(k + 1));
  header.push_back("status");
  csv::Writer w(header);
  for (const auto& o : outcomes) {
    for (std::size_t i = 0; i < o.path.size(); ++i) {
      std::vector<std::string> row{std::to_string(i)};
      for (double c : o.path[i]) row.push_back(csv::format(c));
      row.emplace_back(to_string(o.status));
      w.row_strings(row);
    }
  }
  return w;
}

}  // namespace am
