#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "am/domain_scaler.hpp"
#include "am/sample_set.hpp"

namespace am {

// ---------------------------------------------------------------------------
// Two-dimensional test functions
// ---------------------------------------------------------------------------

struct Value2 {
  double value;
  std::array<double, 2> gradient;
};

/// e^{y - x^2}
inline Value2 eval_f1(double x, double y) {
  const double e = std::exp(y - x * x);
  return {e, {-2.0 * x * e, e}};
}

/// x^2 + y^2
inline Value2 eval_f2(double x, double y) { return {x * x + y * y, {2.0 * x, 2.0 * y}}; }

/// x^3 + y^3 + 0.2x + 0.6y
inline Value2 eval_f3(double x, double y) {
  return {x * x * x + y * y * y + 0.2 * x + 0.6 * y, {3.0 * x * x + 0.2, 3.0 * y * y + 0.6}};
}

// ---------------------------------------------------------------------------
// Hartmann channel flow
// ---------------------------------------------------------------------------

struct HartmannParams {
  double mu = 0.1;     // fluid viscosity
  double rho = 1.0;    // fluid density
  double dp0dx = 1.0;  // applied pressure gradient
  double eta = 1.0;    // resistivity
  double B0 = 0.5;     // applied magnetic field
  double mu0 = 1.0;    // magnetic constant
  double l = 1.0;      // length
};

/// Variable order shared by every 5-vector below: mu, rho, dp0dx, eta, B0.
inline constexpr std::size_t kHartmannDim = 5;

struct HartmannValue {
  double value;
  std::array<double, kHartmannDim> d_log;  // ∂/∂(log p_k)
};

namespace detail {

inline void check_positive(const HartmannParams& p) {
  for (double v : {p.mu, p.rho, p.dp0dx, p.eta, p.B0, p.mu0, p.l})
    if (!(v > 0.0)) throw Error(ErrorCode::NonPositiveParameter, "Hartmann parameters must be positive");
}

inline constexpr double kSeriesSwitch = 0.1;

// x coth x - 1 and x * d/dx of it.
inline std::pair<double, double> xcoth_minus_one(double x) {
  if (std::abs(x) < kSeriesSwitch) {
    // Bernoulli series; closed form cancels badly for small x
    const double y = x * x;
    const double a = y * (1.0 / 3 + y * (-1.0 / 45 + y * (2.0 / 945 + y * (-1.0 / 4725 + y * 2.0 / 93555))));
    const double e = y * (2.0 / 3 + y * (-4.0 / 45 + y * (12.0 / 945 + y * (-8.0 / 4725 + y * 20.0 / 93555))));
    return {a, e};
  }
  const double c = 1.0 / std::tanh(x);
  const double s = std::sinh(x);
  return {x * c - 1.0, x * c - x * x / (s * s)};
}

// 1 - (2/x) tanh(x/2) and x * d/dx of it.
inline std::pair<double, double> one_minus_tanh_ratio(double x) {
  if (std::abs(x) < kSeriesSwitch) {
    const double y = x * x;
    const double c5 = 1382.0 / (155925.0 * 1024.0);
    const double h = y * (1.0 / 12 + y * (-1.0 / 120 + y * (17.0 / 20160 + y * (-31.0 / 362880 + y * c5))));
    const double e = y * (2.0 / 12 + y * (-4.0 / 120 + y * (6.0 * 17 / 20160 + y * (-8.0 * 31 / 362880 + y * 10 * c5))));
    return {h, e};
  }
  const double t = std::tanh(0.5 * x);
  const double sech2 = 1.0 - t * t;
  return {1.0 - 2.0 * t / x, 2.0 * t / x - sech2};
}

}  // namespace detail

/// u_avg = -(dp0/dx) (eta / B0^2) (1 - x coth x),  x = B0 l / sqrt(eta mu).
inline HartmannValue hartmann_u_avg_with_gradient(const HartmannParams& p) {
  detail::check_positive(p);
  const double x = p.B0 * p.l / std::sqrt(p.eta * p.mu);
  const auto [a, xa] = detail::xcoth_minus_one(x);
  const double k = p.dp0dx * p.eta / (p.B0 * p.B0);
  const double u = k * a;
  const double ue = k * xa;  // u * elasticity of a w.r.t. x
  return {u, {-0.5 * ue, 0.0, u, u - 0.5 * ue, -2.0 * u + ue}};
}

/// B_ind = (dp0/dx)(l mu0 / 2 B0)(1 - 2 sqrt(eta mu)/(B0 l) tanh(B0 l / 2 sqrt(eta mu))).
inline HartmannValue hartmann_B_ind_with_gradient(const HartmannParams& p) {
  detail::check_positive(p);
  const double x = p.B0 * p.l / std::sqrt(p.eta * p.mu);
  const auto [h, xh] = detail::one_minus_tanh_ratio(x);
  const double k = p.dp0dx * p.l * p.mu0 / (2.0 * p.B0);
  const double b = k * h;
  const double be = k * xh;
  return {b, {-0.5 * be, 0.0, b, -0.5 * be, -b + be}};
}

inline double hartmann_u_avg(const HartmannParams& p) { return hartmann_u_avg_with_gradient(p).value; }
inline double hartmann_B_ind(const HartmannParams& p) { return hartmann_B_ind_with_gradient(p).value; }

inline HartmannParams hartmann_params(std::span<const double> physical) {
  if (physical.size() != kHartmannDim) throw Error(ErrorCode::DimensionMismatch, "Hartmann needs 5 parameters");
  HartmannParams p;
  p.mu = physical[0];
  p.rho = physical[1];
  p.dp0dx = physical[2];
  p.eta = physical[3];
  p.B0 = physical[4];
  return p;
}

/// Hartmann ranges, all log-scaled.
inline DomainScaler hartmann_scaler() {
  return DomainScaler({
      {0.05, 0.2, true, "log(mu)"},
      {1.0, 5.0, true, "log(rho)"},
      {0.5, 3.0, true, "log(dp0dx)"},
      {0.5, 3.0, true, "log(eta)"},
      {0.1, 1.0, true, "log(B0)"},
  });
}

// ---------------------------------------------------------------------------
// Uniform model interface
// ---------------------------------------------------------------------------

struct ModelSpec {
  std::string name;
  DomainScaler scaler;
  std::function<double(std::span<const double>)> eval;  // physical parameters
  std::function<Vec(std::span<const double>)> grad;     // ∂f/∂(physical)

  std::size_t dimension() const { return scaler.dimension(); }

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& a : scaler.axes()) out.push_back(a.label);
    return out;
  }

  /// f∘D and its gradient in cube coordinates.
  FieldSample at_cube(std::span<const double> x) const {
    const Vec phys = scaler.from_cube(x);
    return {eval(phys), scaler.pullback_gradient(grad(phys), x)};
  }

  CubeField cube_field() const {
    return [self = *this](std::span<const double> x) { return self.at_cube(x); };
  }

  SampleSet sample_grid(std::size_t points_per_axis) const {
    return SampleSet::uniform_grid(dimension(), points_per_axis, cube_field());
  }
};

namespace detail {

inline ModelSpec planar(std::string name, Value2 (*fn)(double, double)) {
  return ModelSpec{
      std::move(name), DomainScaler::identity(2),
      [fn](std::span<const double> p) { return fn(p[0], p[1]).value; },
      [fn](std::span<const double> p) {
        const auto g = fn(p[0], p[1]).gradient;
        return Vec{g[0], g[1]};
      }};
}

inline ModelSpec hartmann(std::string name, HartmannValue (*fn)(const HartmannParams&)) {
  return ModelSpec{std::move(name), hartmann_scaler(),
                   [fn](std::span<const double> p) { return fn(hartmann_params(p)).value; },
                   [fn](std::span<const double> p) {
                     const auto v = fn(hartmann_params(p));
                     Vec g(kHartmannDim);
                     for (std::size_t k = 0; k < kHartmannDim; ++k) g[k] = v.d_log[k] / p[k];
                     return g;
                   }};
}

}  // namespace detail

/// |x|^2 on [-1,1]^m.
inline ModelSpec make_sphere(std::size_t dim) {
  return ModelSpec{"sphere" + std::to_string(dim), DomainScaler::identity(dim),
                   [](std::span<const double> p) { return dot(p, p); },
                   [](std::span<const double> p) { return scaled(p, 2.0); }};
}

inline ModelSpec make_constant(std::size_t dim, double c) {
  return ModelSpec{"constant", DomainScaler::identity(dim), [c](std::span<const double>) { return c; },
                   [](std::span<const double> p) { return Vec(p.size(), 0.0); }};
}

/// a·x on [-1,1]^m.
inline ModelSpec make_linear(Vec a) {
  const std::size_t dim = a.size();
  return ModelSpec{"linear", DomainScaler::identity(dim),
                   [a](std::span<const double> p) { return dot(a, p); },
                   [a](std::span<const double>) { return a; }};
}

inline std::vector<std::string> model_names() { return {"f1", "f2", "f3", "hartmann_u", "hartmann_B", "constant"}; }

inline ModelSpec make_model(const std::string& name) {
  if (name == "f1") return detail::planar("f1", eval_f1);
  if (name == "f2") return detail::planar("f2", eval_f2);
  if (name == "f3") return detail::planar("f3", eval_f3);
  if (name == "hartmann_u") return detail::hartmann("hartmann_u", hartmann_u_avg_with_gradient);
  if (name == "hartmann_B") return detail::hartmann("hartmann_B", hartmann_B_ind_with_gradient);
  if (name == "constant") return make_constant(2, 1.0);
  throw Error(ErrorCode::UnknownModel, "no model named '" + name + "'");
}

}  // namespace am
