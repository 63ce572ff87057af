#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "am/errors.hpp"

namespace am {

using Vec = std::vector<double>;

inline void require_same_dim(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                "expected dimension " + std::to_string(a.size()) + ", got " + std::to_string(b.size()));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline double distance_sq(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

inline double distance(std::span<const double> a, std::span<const double> b) {
  return std::sqrt(distance_sq(a, b));
}

inline Vec subtract(std::span<const double> a, std::span<const double> b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

/// a + s*b
inline Vec add_scaled(std::span<const double> a, double s, std::span<const double> b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + s * b[i];
  return out;
}

inline Vec scaled(std::span<const double> a, double s) {
  Vec out(a.begin(), a.end());
  for (double& x : out) x *= s;
  return out;
}

inline bool in_cube(std::span<const double> x) {
  for (double c : x)
    if (!(c >= -1.0 && c <= 1.0)) return false;
  return true;
}

}  // namespace am
