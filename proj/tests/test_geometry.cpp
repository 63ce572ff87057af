#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "am/am.hpp"

using namespace am;

TEST(Normalize, ThreeFourFive) {
  auto u = normalize_gradient(Vec{3, 4});
  EXPECT_DOUBLE_EQ(u[0], 0.6);
  EXPECT_DOUBLE_EQ(u[1], 0.8);
}

TEST(Normalize, ZeroIsCritical) {
  try {
    normalize_gradient(Vec{0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroGradient);
  }
  EXPECT_FALSE(try_normalize(Vec{1e-13, 0}).has_value());
}

TEST(Normalize, AxisVector) {
  EXPECT_EQ(normalize_gradient(Vec{0, -2, 0}), (Vec{0, -1, 0}));
}

TEST(Normalize, UnitAndParallel) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> N;
  for (int i = 0; i < 200; ++i) {
    Vec g{N(rng), N(rng), N(rng), N(rng)};
    auto u = normalize_gradient(g);
    EXPECT_NEAR(norm(u), 1.0, 1e-12);
    EXPECT_GE(dot(u, g) / norm(g), 1.0 - 1e-12);
  }
}

TEST(SamplePoint, CriticalFlag) {
  SamplePoint s({0, 0}, 1.0, {0, 0});
  EXPECT_TRUE(s.critical);
  EXPECT_EQ(s.unit_gradient, (Vec{0, 0}));
  SamplePoint t({0, 0}, 1.0, {0, 5});
  EXPECT_FALSE(t.critical);
  EXPECT_EQ(t.unit_gradient, (Vec{0, 1}));
}

namespace {
CubeField linear_field(Vec a) {
  return [a](std::span<const double> x) { return FieldSample{dot(a, x), a}; };
}
}  // namespace

TEST(Nearest, GridRounding) {
  auto s = SampleSet::uniform_grid(2, 3, linear_field({1, 1}));
  const auto& p = s.nearest(Vec{0.3, -0.2});
  EXPECT_EQ(p.location, (Vec{0, 0}));
}

TEST(Nearest, ExactHit) {
  auto s = SampleSet::uniform_grid(2, 5, linear_field({1, 2}));
  for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(s.nearest_index(s[i].location), i);
}

TEST(Nearest, ScatteredPair) {
  auto s = SampleSet::scattered({SamplePoint({0, 0}, 0, {1, 0}), SamplePoint({1, 1}, 0, {1, 0})});
  EXPECT_EQ(s.nearest_index(Vec{0.4, 0.4}), 0u);
  // equidistant: lowest index wins
  EXPECT_EQ(s.nearest_index(Vec{0.5, 0.5}), 0u);
}

TEST(Nearest, DimensionMismatch) {
  auto s = SampleSet::uniform_grid(2, 3, linear_field({1, 1}));
  try {
    s.nearest(Vec{0.0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Nearest, GridAgreesWithScan) {
  for (std::size_t dim : {1u, 2u, 3u}) {
    auto s = SampleSet::uniform_grid(dim, 7, linear_field(Vec(dim, 1.0)));
    std::mt19937_64 rng(dim);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
      Vec q(dim);
      for (auto& c : q) c = U(rng);
      ASSERT_EQ(s.nearest_index(q), s.brute_force_nearest(q));
    }
    // queries sitting exactly between grid points
    Vec q(dim, 1.0 / 6.0);
    EXPECT_EQ(s.nearest_index(q), s.brute_force_nearest(q));
  }
}

TEST(Nearest, KdTreeAgreesWithScan) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (std::size_t dim : {2u, 5u}) {
    std::vector<SamplePoint> pts;
    for (int i = 0; i < 500; ++i) {
      Vec x(dim);
      for (auto& c : x) c = U(rng);
      pts.emplace_back(x, 0.0, Vec(dim, 1.0));
    }
    auto s = SampleSet::scattered(pts);
    for (int i = 0; i < 1000; ++i) {
      Vec q(dim);
      for (auto& c : q) c = U(rng);
      ASSERT_EQ(s.nearest_index(q), s.brute_force_nearest(q));
    }
  }
}

TEST(Nearest, DuplicatePointsLowestIndex) {
  KdTree t({0.5, 0.5, 0.1, 0.1, 0.5, 0.5}, 2);
  EXPECT_EQ(t.nearest(Vec{0.5, 0.5}).index, 0u);
}

TEST(Scaler, LogEndpointsAndMidpoint) {
  DomainScaler d({AxisRange{0.1, 1.0, true, "log(B0)"}});
  EXPECT_NEAR(d.from_cube(Vec{-1})[0], 0.1, 1e-12 * 0.1);
  EXPECT_NEAR(d.from_cube(Vec{1})[0], 1.0, 1e-12);
  EXPECT_NEAR(d.from_cube(Vec{0})[0], 0.31622776601683794, 1e-14);
}

TEST(Scaler, LinearPullback) {
  EXPECT_EQ(DomainScaler::identity(2).pullback_gradient(Vec{2, -3}, Vec{0.1, 0.2}), (Vec{2, -3}));
  DomainScaler d({AxisRange{0.0, 2.0, false, "x"}});
  EXPECT_DOUBLE_EQ(d.pullback_gradient(Vec{1}, Vec{0.3})[0], 1.0);
}

TEST(Scaler, LogPullback) {
  DomainScaler d({AxisRange{0.1, 1.0, true, "log(B0)"}});
  EXPECT_NEAR(d.pullback_gradient(Vec{1}, Vec{0})[0], 0.36407067001059005, 1e-14);
  // finite difference of D itself
  const double h = 1e-6;
  const double fd = (d.from_cube(Vec{h})[0] - d.from_cube(Vec{-h})[0]) / (2 * h);
  EXPECT_NEAR(fd, 0.36407067001059005, 1e-8);
}

TEST(Scaler, Errors) {
  auto code = [](auto fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([] { DomainScaler({AxisRange{0.0, 1.0, true, ""}}); }), ErrorCode::NonPositiveBound);
  EXPECT_EQ(code([] { DomainScaler({AxisRange{-1.0, 1.0, true, ""}}); }), ErrorCode::NonPositiveBound);
  DomainScaler d({AxisRange{0.1, 1.0, true, ""}});
  EXPECT_EQ(code([&] { d.to_cube(Vec{2.0}); }), ErrorCode::OutOfRange);
  EXPECT_EQ(code([&] { d.from_cube(Vec{1.5}); }), ErrorCode::OutOfRange);
}

TEST(Scaler, RoundTrip) {
  auto d = hartmann_scaler();
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    Vec x(5);
    for (auto& c : x) c = U(rng);
    auto back = d.to_cube(d.from_cube(x));
    for (int k = 0; k < 5; ++k) ASSERT_NEAR(back[k], x[k], 1e-10);
  }
  for (const auto& a : d.axes()) {
    DomainScaler one({a});
    EXPECT_NEAR(one.from_cube(Vec{-1})[0], a.lo, 1e-12 * a.lo);
    EXPECT_NEAR(one.from_cube(Vec{1})[0], a.hi, 1e-12 * a.hi);
  }
}

TEST(Csv, FormatRoundTrips) {
  for (double v : {0.1, -2.5e-17, 1.0 / 3.0, 12345678.9, 0.0}) EXPECT_EQ(csv::parse_double(csv::format(v)), v);
}

TEST(Csv, ReadSamples) {
  std::istringstream in("\xEF\xBB\xBFx1,x2,f,g1,g2\n0,0,1,1e0,0\n0.5,-0.5,2.5,0,2\n");
  auto s = read_samples_csv(in);
  EXPECT_EQ(s.dimension(), 2u);
  EXPECT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[1].value, 2.5);
  EXPECT_EQ(s[1].unit_gradient, (Vec{0, 1}));
}

TEST(Csv, RejectsBadHeader) {
  std::istringstream in("a,b,c\n1,2,3\n");
  EXPECT_THROW(read_samples_csv(in), Error);
  std::istringstream short_row("x1,f,g1\n1,2\n");
  EXPECT_THROW(read_samples_csv(short_row), Error);
}
