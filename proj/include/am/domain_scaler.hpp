#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "am/vector_ops.hpp"

namespace am {

struct AxisRange {
  double lo = -1.0;
  double hi = 1.0;
  bool log_scaled = false;
  std::string label;
};

/// Affine (or log-affine) map D between the cube [-1,1]^m and a physical box.
///
/// Linear axes: D(x) = lo + (hi - lo)(x + 1)/2.
/// Log axes:    D(x) = exp((log hi - log lo)(x + 1)/2 + log lo).
class DomainScaler {
 public:
  DomainScaler() = default;

  explicit DomainScaler(std::vector<AxisRange> axes) : axes_(std::move(axes)) {
    for (const auto& a : axes_) {
      if (!(a.hi > a.lo)) throw Error(ErrorCode::InvalidArgument, "axis requires hi > lo");
      if (a.log_scaled && !(a.lo > 0.0))
        throw Error(ErrorCode::NonPositiveBound, "log-scaled axis needs lo > 0");
    }
  }

  static DomainScaler identity(std::size_t dim) {
    std::vector<AxisRange> axes(dim);
    for (std::size_t k = 0; k < dim; ++k) axes[k].label = "x" + std::to_string(k + 1);
    return DomainScaler(std::move(axes));
  }

  std::size_t dimension() const { return axes_.size(); }
  const std::vector<AxisRange>& axes() const { return axes_; }

  Vec from_cube(std::span<const double> x) const {
    check_dim(x);
    Vec out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (!(x[k] >= -1.0 && x[k] <= 1.0))
        throw Error(ErrorCode::OutOfRange, "cube coordinate outside [-1,1]");
      out[k] = axis_from_cube(axes_[k], x[k]);
    }
    return out;
  }

  Vec to_cube(std::span<const double> physical) const {
    check_dim(physical);
    Vec out(physical.size());
    for (std::size_t k = 0; k < physical.size(); ++k) {
      const auto& a = axes_[k];
      const double p = physical[k];
      if (!(p >= a.lo && p <= a.hi)) throw Error(ErrorCode::OutOfRange, "physical value outside axis range");
      double x = a.log_scaled ? 2.0 * (std::log(p) - std::log(a.lo)) / (std::log(a.hi) - std::log(a.lo)) - 1.0
                              : 2.0 * (p - a.lo) / (a.hi - a.lo) - 1.0;
      out[k] = std::clamp(x, -1.0, 1.0);
    }
    return out;
  }

  /// Chain rule: gradient of f∘D at cube point x given ∂f/∂(physical) at D(x).
  Vec pullback_gradient(std::span<const double> physical_grad, std::span<const double> x) const {
    check_dim(physical_grad);
    check_dim(x);
    Vec out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = physical_grad[k] * jacobian(k, x[k]);
    return out;
  }

  /// dD_k/dx_k at cube coordinate x.
  double jacobian(std::size_t k, double x) const {
    const auto& a = axes_[k];
    if (a.log_scaled) {
      const double half = 0.5 * (std::log(a.hi) - std::log(a.lo));
      return half * axis_from_cube(a, x);
    }
    return 0.5 * (a.hi - a.lo);
  }

 private:
  static double axis_from_cube(const AxisRange& a, double x) {
    if (x == -1.0) return a.lo;
    if (x == 1.0) return a.hi;
    if (a.log_scaled) {
      const double llo = std::log(a.lo);
      return std::exp(0.5 * (std::log(a.hi) - llo) * (x + 1.0) + llo);
    }
    return a.lo + 0.5 * (a.hi - a.lo) * (x + 1.0);
  }

  void check_dim(std::span<const double> v) const {
    if (v.size() != axes_.size())
      throw Error(ErrorCode::DimensionMismatch,
                  "scaler has dimension " + std::to_string(axes_.size()) + ", got " + std::to_string(v.size()));
  }

  std::vector<AxisRange> axes_;
};

}  // namespace am
