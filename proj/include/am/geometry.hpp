#pragma once

#include <optional>
#include <span>

#include "am/vector_ops.hpp"

namespace am {

inline constexpr double kZeroGradientTol = 1e-12;

/// Unit vector along g, or nullopt when |g| <= zero_tol (a critical point).
inline std::optional<Vec> try_normalize(std::span<const double> g, double zero_tol = kZeroGradientTol) {
  const double n = norm(g);
  if (!(n > zero_tol)) return std::nullopt;
  return scaled(g, 1.0 / n);
}

inline Vec normalize_gradient(std::span<const double> g, double zero_tol = kZeroGradientTol) {
  if (g.empty()) throw Error(ErrorCode::DimensionMismatch, "gradient has dimension 0");
  auto u = try_normalize(g, zero_tol);
  if (!u) throw Error(ErrorCode::ZeroGradient, "gradient norm below tolerance");
  return *std::move(u);
}

}  // namespace am
