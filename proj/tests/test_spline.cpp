#include <gtest/gtest.h>

#include <cmath>

#include "am/am.hpp"
#include "oracles.hpp"

using namespace am;

TEST(Spline, ThreePoints) {
  auto s = MonotoneSpline::fit(Vec{0, 0.5, 1}, Vec{0, 1, 2});
  EXPECT_EQ(s(0.5), 1.0);
  EXPECT_GT(s(0.25), 0.0);
  EXPECT_LT(s(0.25), 1.0);
}

TEST(Spline, TwoPointsLinear) {
  auto s = MonotoneSpline::fit(Vec{0, 1}, Vec{0, 5});
  EXPECT_NEAR(s(0.4), 2.0, 1e-15);
}

TEST(Spline, Exponential) {
  Vec t, z;
  for (int i = 0; i <= 10; ++i) {
    t.push_back(i / 10.0);
    z.push_back(std::exp(i / 10.0));
  }
  auto s = MonotoneSpline::fit(t, z);
  double worst = 0.0;
  for (int i = 0; i <= 10000; ++i) worst = std::max(worst, std::abs(s(i / 1e4) - std::exp(i / 1e4)));
  EXPECT_LE(worst, 1e-3);
}

TEST(Spline, Clamp) {
  auto s = MonotoneSpline::fit(Vec{0, 0.5, 1}, Vec{0, 1, 3});
  auto hi = s.evaluate(1.2);
  EXPECT_EQ(hi.value, 3.0);
  EXPECT_TRUE(hi.clamped);
  auto lo = s.evaluate(-0.1);
  EXPECT_EQ(lo.value, 0.0);
  EXPECT_TRUE(lo.clamped);
  EXPECT_FALSE(s.evaluate(1.0).clamped);
}

TEST(Spline, FlatSegmentMidpoint) {
  // zero tangents everywhere: segment midpoint is the average of its ends
  auto s = MonotoneSpline::fit(Vec{0, 1, 2, 3}, Vec{0, 0, 2, 2});
  EXPECT_EQ(s.tangents()[1], 0.0);
  EXPECT_EQ(s.tangents()[2], 0.0);
  EXPECT_DOUBLE_EQ(s(1.5), 1.0);
  EXPECT_EQ(s(0.5), 0.0);
}

TEST(Spline, Errors) {
  try {
    MonotoneSpline::fit(Vec{0, 0.5, 0.5}, Vec{0, 1, 2});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::UnsortedKnots);
  }
  try {
    MonotoneSpline::fit(Vec{0, 1}, Vec{0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::LengthMismatch);
  }
  EXPECT_THROW(MonotoneSpline::fit(Vec{0}, Vec{0}), Error);
  EXPECT_THROW(MonotoneSpline{}(0.5), Error);
}

TEST(Spline, RandomMonotoneData) {
  auto r = oracle::spline_properties(100, 2024);
  EXPECT_LE(r.knot_error, 1e-12);
  EXPECT_LE(r.monotone_drop, 0.0);
  EXPECT_LE(r.derivative_jump, 1e-10);
}

TEST(Spline, CsvShape) {
  auto s = MonotoneSpline::fit(Vec{0, 1}, Vec{1, 2});
  auto text = spline_csv(s, 3).str();
  EXPECT_EQ(text, "t,fhat\n0,1\n0.5,1.5\n1,2\n");
}
