#pragma once

// Reference checks shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>

#include "am/am.hpp"

namespace am::oracle {

// Frozen high-precision values (mpmath, 50 digits) at mu=0.1, eta=1, B0=0.5, dp0dx=1, l=mu0=1.
inline constexpr double kUavgReference = 2.883648270981682;
inline constexpr double kBindReference = 0.1667632535251572;

/// Worst relative error of the cube-coordinate gradient of `model` against
/// central differences (step 1e-6 times the cube width) at `points` random interior points.
inline double worst_gradient_error(const ModelSpec& model, std::size_t points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-0.999, 0.999);
  const std::size_t m = model.dimension();
  const double h = 1e-6 * 2.0;
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    Vec x(m);
    for (auto& c : x) c = U(rng);
    const Vec g = model.at_cube(x).gradient;
    Vec fd(m);
    for (std::size_t k = 0; k < m; ++k) {
      Vec a = x, b = x;
      a[k] += h;
      b[k] -= h;
      fd[k] = (model.at_cube(a).value - model.at_cube(b).value) / (2.0 * h);
    }
    const double scale = std::max(norm(g), 1e-3);
    worst = std::max(worst, norm(subtract(g, fd)) / scale);
  }
  return worst;
}

/// Largest |d/d log rho| over random physical points in the Hartmann box.
inline double worst_rho_partial(std::size_t points, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  const auto scaler = hartmann_scaler();
  double worst = 0.0;
  for (std::size_t i = 0; i < points; ++i) {
    Vec x(kHartmannDim);
    for (auto& c : x) c = U(rng);
    const auto p = hartmann_params(scaler.from_cube(x));
    worst = std::max({worst, std::abs(hartmann_u_avg_with_gradient(p).d_log[1]),
                      std::abs(hartmann_B_ind_with_gradient(p).d_log[1])});
  }
  return worst;
}

struct SplineCheck {
  double knot_error = 0.0;      // max |fhat(t_i) - z_i|
  double monotone_drop = 0.0;   // largest decrease between consecutive dense evaluations
  double derivative_jump = 0.0; // max |left - right| derivative at interior knots
};

/// Random nondecreasing datasets (with flat runs and uneven knots) fitted and probed.
inline SplineCheck spline_properties(std::size_t datasets, std::uint64_t seed, std::size_t dense = 10000) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> size(2, 60);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  SplineCheck out;
  for (std::size_t d = 0; d < datasets; ++d) {
    const int n = size(rng);
    Vec t(n), z(n);
    double tt = 0.0, zz = U(rng) * 10.0 - 5.0;
    for (int i = 0; i < n; ++i) {
      tt += 0.05 + U(rng);
      t[i] = tt;
      if (U(rng) > 0.2) zz += std::pow(U(rng), 3) * 4.0;  // occasional flats, wide slope spread
      z[i] = zz;
    }
    for (auto& v : t) v = (v - t.front()) / (t.back() - t.front());
    t.back() = 1.0;
    const auto s = MonotoneSpline::fit(t, z);
    for (int i = 0; i < n; ++i) out.knot_error = std::max(out.knot_error, std::abs(s(t[i]) - z[i]));
    double prev = s(0.0);
    for (std::size_t k = 1; k <= dense; ++k) {
      const double v = s(static_cast<double>(k) / static_cast<double>(dense));
      out.monotone_drop = std::max(out.monotone_drop, prev - v);
      prev = v;
    }
    for (int i = 1; i + 1 < n; ++i) {
      const double left = s.segment_derivative(static_cast<std::size_t>(i - 1), t[i]);
      const double right = s.segment_derivative(static_cast<std::size_t>(i), t[i]);
      out.derivative_jump = std::max(out.derivative_jump, std::abs(left - right));
    }
  }
  return out;
}

}  // namespace am::oracle
