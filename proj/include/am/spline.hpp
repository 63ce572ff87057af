#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "am/csv.hpp"
#include "am/errors.hpp"

namespace am {

/// C^1 piecewise-cubic Hermite interpolant with monotonicity-preserving tangents.
///
/// Interior tangents are the weighted harmonic mean of adjacent secants (zero
/// at local extrema or flat secants); end tangents use the shape-preserving
/// three-point formula. Every tangent is then bounded by three times the
/// adjacent secants, which keeps each cubic segment monotone.
class MonotoneSpline {
 public:
  struct Sample {
    double value;
    bool clamped;
  };

  MonotoneSpline() = default;

  static MonotoneSpline fit(std::span<const double> ts, std::span<const double> zs) {
    if (ts.size() != zs.size()) throw Error(ErrorCode::LengthMismatch, "knots and values differ in length");
    if (ts.size() < 2) throw Error(ErrorCode::LengthMismatch, "need at least 2 knots");
    for (std::size_t i = 0; i + 1 < ts.size(); ++i)
      if (!(ts[i] < ts[i + 1])) throw Error(ErrorCode::UnsortedKnots, "knots must be strictly increasing");

    MonotoneSpline s;
    s.t_.assign(ts.begin(), ts.end());
    s.z_.assign(zs.begin(), zs.end());
    const std::size_t n = ts.size();
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = ts[i + 1] - ts[i];
      d[i] = (zs[i + 1] - zs[i]) / h[i];
    }
    s.m_.assign(n, 0.0);
    if (n == 2) {
      s.m_[0] = s.m_[1] = d[0];
      return s;
    }
    for (std::size_t k = 1; k + 1 < n; ++k) {
      const double a = d[k - 1], b = d[k];
      if (a * b <= 0.0) continue;
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      s.m_[k] = (w1 + w2) / (w1 / a + w2 / b);
    }
    s.m_[0] = end_tangent(h[0], h[1], d[0], d[1]);
    s.m_[n - 1] = end_tangent(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
    return s;
  }

  std::size_t size() const { return t_.size(); }
  const std::vector<double>& knots() const { return t_; }
  const std::vector<double>& values() const { return z_; }
  const std::vector<double>& tangents() const { return m_; }

  /// Value at t; arguments outside the knot range clamp to the nearest end knot.
  Sample evaluate(double t) const {
    if (t_.empty()) throw Error(ErrorCode::NotFitted, "spline has no knots");
    if (t <= t_.front()) return {z_.front(), t < t_.front()};
    if (t >= t_.back()) return {z_.back(), t > t_.back()};
    return {segment_value(segment(t), t), false};
  }

  double operator()(double t) const { return evaluate(t).value; }

  double derivative(double t) const {
    if (t_.empty()) throw Error(ErrorCode::NotFitted, "spline has no knots");
    t = std::clamp(t, t_.front(), t_.back());
    return segment_derivative(segment(t), t);
  }

  /// Derivative of segment i's cubic at t (t may sit on either end of the segment).
  double segment_derivative(std::size_t i, double t) const {
    const double h = t_[i + 1] - t_[i];
    const double u = (t - t_[i]) / h;
    const double dh00 = 6.0 * u * u - 6.0 * u;
    const double dh10 = 3.0 * u * u - 4.0 * u + 1.0;
    const double dh01 = -dh00;
    const double dh11 = 3.0 * u * u - 2.0 * u;
    return (dh00 * z_[i] + dh01 * z_[i + 1]) / h + dh10 * m_[i] + dh11 * m_[i + 1];
  }

  double segment_value(std::size_t i, double t) const {
    const double h = t_[i + 1] - t_[i];
    const double u = (t - t_[i]) / h;
    const double u2 = u * u, u3 = u2 * u;
    const double h10 = u3 - 2.0 * u2 + u;
    const double h01 = -2.0 * u3 + 3.0 * u2;
    const double h11 = u3 - u2;
    if (u == 0.0) return z_[i];
    if (u == 1.0) return z_[i + 1];
    // increment form: exact on flat segments
    return z_[i] + h01 * (z_[i + 1] - z_[i]) + h * (h10 * m_[i] + h11 * m_[i + 1]);
  }

  std::size_t segment(double t) const {
    auto it = std::upper_bound(t_.begin(), t_.end(), t);
    std::size_t i = static_cast<std::size_t>(it - t_.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, t_.size() - 2);
  }

 private:
  static double end_tangent(double h0, double h1, double d0, double d1) {
    double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (std::signbit(m) != std::signbit(d0) || d0 == 0.0) return 0.0;
    if (std::abs(m) > 3.0 * std::abs(d0)) m = 3.0 * d0;
    return m;
  }

  std::vector<double> t_, z_, m_;
};

/// CSV `t,fhat` at `resolution` evenly spaced parameters over the knot range.
inline csv::Writer spline_csv(const MonotoneSpline& s, std::size_t resolution = 200) {
  csv::Writer w({"t", "fhat"});
  const double lo = s.knots().front(), hi = s.knots().back();
  const std::size_t n = std::max<std::size_t>(resolution, 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    w.row({t, s(t)});
  }
  return w;
}

}  // namespace am
