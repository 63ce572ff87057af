#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "am/am.hpp"

using namespace am;

namespace {

struct Fitted {
  SampleSet samples;
  ActiveManifold manifold;
  MonotoneSpline spline;
  TraversalConfig cfg;
};

const Fitted& fitted(const std::string& name, Vec seed) {
  static std::map<std::string, Fitted> cache;
  auto it = cache.find(name);
  if (it == cache.end()) {
    Fitted f;
    f.samples = make_model(name).sample_grid(100);
    f.cfg = TraversalConfig::for_grid(2, 100);
    f.manifold = build_manifold(f.samples, seed, f.cfg);
    f.spline = MonotoneSpline::fit(f.manifold.params(), f.manifold.values());
    it = cache.emplace(name, std::move(f)).first;
  }
  return it->second;
}

void expect_vec_near(const Vec& a, const Vec& b, double tol) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], tol);
}

}  // namespace

TEST(StepDirection, AlreadyTangent) {
  auto d = step_direction(Vec{0, 0}, Vec{0, 1}, Vec{1, 0});
  ASSERT_TRUE(d);
  expect_vec_near(d->v, {1, 0}, 1e-15);
  EXPECT_EQ(d->rule, DirectionRule::TowardManifold);
}

TEST(StepDirection, RemovesGradientPart) {
  auto d = step_direction(Vec{0, 0}, Vec{0, 1}, Vec{0.6, 0.8});
  ASSERT_TRUE(d);
  expect_vec_near(d->v, {1, 0}, 1e-15);
}

TEST(StepDirection, FallsBackTowardOrigin) {
  // u = (0,1) is colinear with g; no previous position
  auto d = step_direction(Vec{0.5, 0}, Vec{0, 1}, Vec{0.5, 1});
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule, DirectionRule::TowardOrigin);
  expect_vec_near(d->v, {-1, 0}, 1e-15);
}

TEST(StepDirection, MomentumBeforeOrigin) {
  Vec prev{0.6, 0};
  auto d = step_direction(Vec{0.5, 0}, Vec{0, 1}, Vec{0.5, 1}, &prev);
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule, DirectionRule::Momentum);
  expect_vec_near(d->v, {-1, 0}, 1e-15);
}

TEST(StepDirection, FixedBasisAtOrigin) {
  auto d = step_direction(Vec{0, 0}, Vec{1, 0}, Vec{1, 0});
  ASSERT_TRUE(d);
  EXPECT_EQ(d->rule, DirectionRule::FixedBasis);
  expect_vec_near(d->v, {0, 1}, 1e-15);
}

TEST(StepDirection, OrthogonalOnRandomInput) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> N;
  for (int i = 0; i < 1000; ++i) {
    Vec p{N(rng), N(rng), N(rng)}, m{N(rng), N(rng), N(rng)};
    auto g = normalize_gradient(Vec{N(rng), N(rng), N(rng)});
    auto d = step_direction(p, g, m);
    ASSERT_TRUE(d);
    EXPECT_LE(std::abs(dot(d->v, g)), 1e-14);
    EXPECT_NEAR(norm(d->v), 1.0, 1e-14);
  }
}

TEST(Segment, Examples) {
  Vec m{0, 0.4}, mp{0, 0.6}, g{0, 1};
  EXPECT_DOUBLE_EQ(segment_intersection(Vec{0.5, 0.5}, g, m, mp).s0, 0.5);
  EXPECT_DOUBLE_EQ(segment_intersection(Vec{0.5, 0.4}, g, m, mp).s0, 0.0);
  EXPECT_NEAR(segment_intersection(Vec{1, 0.55}, g, m, mp).s0, 0.75, 1e-14);
}

TEST(Segment, ClampAndDegenerate) {
  Vec m{0, 0.4}, mp{0, 0.6};
  auto c = segment_intersection(Vec{0, 0.9}, Vec{0, 1}, m, mp);
  EXPECT_EQ(c.s0, 1.0);
  EXPECT_TRUE(c.clamped);
  auto d = segment_intersection(Vec{0, 0.5}, Vec{1, 0}, m, mp);
  EXPECT_TRUE(d.degenerate);
  EXPECT_EQ(d.s0, 0.0);
}

TEST(Project, F1ParabolaPoint) {
  const auto& f = fitted("f1", {0, 0});
  auto o = project_to_manifold(Vec{0.5, 0.25}, f.samples, f.manifold, f.spline, f.cfg);
  ASSERT_EQ(o.status, ProjectionStatus::Converged);
  EXPECT_NEAR(*o.estimate, 1.0, 0.05);
  ASSERT_TRUE(o.t_star);
  EXPECT_GE(*o.t_star, 0.0);
  EXPECT_LE(*o.t_star, 1.0);
  EXPECT_EQ(o.path.front(), (Vec{0.5, 0.25}));
}

TEST(Project, StartOnManifold) {
  const auto& f = fitted("f1", {0, 0});
  const Vec& m = f.manifold.points()[f.manifold.size() / 2];
  Vec p{m[0] + 0.5 * f.cfg.epsilon, m[1]};
  auto o = project_to_manifold(p, f.samples, f.manifold, f.spline, f.cfg);
  ASSERT_EQ(o.status, ProjectionStatus::Converged);
  EXPECT_LE(o.steps, 1u);
  EXPECT_NEAR(*o.estimate, eval_f1(p[0], p[1]).value, 0.02);
}

TEST(Project, F3CornerMisses) {
  const auto& f = fitted("f3", {-0.5, 0.0});
  // f3 at this corner exceeds every value on the manifold
  ASSERT_GT(eval_f3(1, 1).value, f.manifold.values().back());
  auto o = project_to_manifold(Vec{1, 1}, f.samples, f.manifold, f.spline, f.cfg);
  EXPECT_EQ(o.status, ProjectionStatus::ExitedCube);
  EXPECT_FALSE(o.estimate);
}

TEST(Project, EstimateIffConverged) {
  const auto& f = fitted("f3", {-0.5, 0.0});
  LevelSetProjector pr(f.samples, f.manifold, f.spline, f.cfg);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<Vec> pts;
  for (int i = 0; i < 300; ++i) pts.push_back({U(rng), U(rng)});
  auto all = pr.project_all(pts, 2);
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].estimate.has_value(), all[i].converged());
    EXPECT_EQ(all[i].path.front(), pts[i]);
    EXPECT_LE(all[i].steps, f.cfg.step_cap(2));
    EXPECT_LE(all[i].max_tangent_residual, 1e-10);
    // parallel and sequential agree
    auto one = pr.project(pts[i]);
    EXPECT_EQ(one.status, all[i].status);
    EXPECT_EQ(one.path, all[i].path);
  }
}

TEST(Project, DriftBounded) {
  for (auto [name, seed] : {std::pair<std::string, Vec>{"f1", {0, 0}}, {"f3", {-0.5, 0.0}}}) {
    const auto& f = fitted(name, seed);
    auto field = make_model(name).cube_field();
    const double range = f.manifold.values().back() - f.manifold.values().front();
    LevelSetProjector pr(f.samples, f.manifold, f.spline, f.cfg);
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> U(-1, 1);
    for (int i = 0; i < 200; ++i) {
      Vec p{U(rng), U(rng)};
      auto o = pr.project(p);
      if (!o.converged()) continue;
      EXPECT_LE(std::abs(field(o.path.back()).value - field(p).value), 0.05 * range) << name;
    }
  }
}

TEST(Project, RejectsBadInput) {
  const auto& f = fitted("f1", {0, 0});
  EXPECT_THROW(project_to_manifold(Vec{2, 0}, f.samples, f.manifold, f.spline, f.cfg), Error);
  EXPECT_THROW(project_to_manifold(Vec{0, 0, 0}, f.samples, f.manifold, f.spline, f.cfg), Error);
}

TEST(Project, TraceCsv) {
  ProjectionOutcome a;
  a.status = ProjectionStatus::Converged;
  a.path = {{0, 0}, {0.5, 0}};
  ProjectionOutcome b;
  b.status = ProjectionStatus::ExitedCube;
  b.path = {{1, 1}};
  EXPECT_EQ(trace_csv({a, b}, 2).str(), "step,x1,x2,status\n0,0,0,Converged\n1,0.5,0,Converged\n0,1,1,ExitedCube\n");
}
