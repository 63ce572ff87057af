#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "am/csv.hpp"
#include "am/sample_set.hpp"

namespace am {

/// Least-squares polynomial of total degree <= d in a handful of variables.
class PolynomialSurrogate {
 public:
  PolynomialSurrogate() = default;

  static PolynomialSurrogate fit(const std::vector<Vec>& inputs, std::span<const double> targets, unsigned degree) {
    if (inputs.empty()) throw Error(ErrorCode::EmptySamples, "polynomial fit needs data");
    if (inputs.size() != targets.size()) throw Error(ErrorCode::LengthMismatch, "inputs and targets differ");
    PolynomialSurrogate p;
    p.vars_ = inputs.front().size();
    p.degree_ = degree;
    p.exponents_ = monomials(p.vars_, degree);
    const auto rows = static_cast<Eigen::Index>(inputs.size());
    const auto cols = static_cast<Eigen::Index>(p.exponents_.size());
    Eigen::MatrixXd A(rows, cols);
    Eigen::VectorXd b(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Vec row = p.features(inputs[static_cast<std::size_t>(r)]);
      for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = row[static_cast<std::size_t>(c)];
      b(r) = targets[static_cast<std::size_t>(r)];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(b);
    p.coef_.assign(coef.data(), coef.data() + coef.size());
    p.residual_ss_ = (A * coef - b).squaredNorm();
    return p;
  }

  double operator()(std::span<const double> y) const {
    if (coef_.empty()) throw Error(ErrorCode::NotFitted, "polynomial not fitted");
    if (y.size() != vars_) throw Error(ErrorCode::DimensionMismatch, "polynomial input dimension mismatch");
    const Vec f = features(y);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += coef_[i] * f[i];
    return s;
  }

  bool fitted() const { return !coef_.empty(); }
  unsigned degree() const { return degree_; }
  std::size_t terms() const { return exponents_.size(); }
  double residual_sum_of_squares() const { return residual_ss_; }

 private:
  static std::vector<std::vector<unsigned>> monomials(std::size_t vars, unsigned degree) {
    std::vector<std::vector<unsigned>> out;
    std::vector<unsigned> e(vars, 0);
    for (unsigned total = 0; total <= degree; ++total) {
      // all exponent tuples summing to `total`, lexicographic
      auto rec = [&](auto&& self, std::size_t k, unsigned left) -> void {
        if (k + 1 == vars) {
          e[k] = left;
          out.push_back(e);
          return;
        }
        for (unsigned a = left + 1; a-- > 0;) {
          e[k] = a;
          self(self, k + 1, left - a);
        }
      };
      rec(rec, 0, total);
    }
    return out;
  }

  Vec features(std::span<const double> y) const {
    Vec f(exponents_.size());
    for (std::size_t i = 0; i < exponents_.size(); ++i) {
      double v = 1.0;
      for (std::size_t k = 0; k < vars_; ++k)
        for (unsigned a = 0; a < exponents_[i][k]; ++a) v *= y[k];
      f[i] = v;
    }
    return f;
  }

  std::size_t vars_ = 0;
  unsigned degree_ = 0;
  std::vector<std::vector<unsigned>> exponents_;
  std::vector<double> coef_;
  double residual_ss_ = 0.0;
};

/// Eigen-decomposition of C = (1/N) sum grad f grad f^T plus a polynomial
/// surrogate over the leading eigenvector coordinates.
class ActiveSubspace {
 public:
  static constexpr unsigned kDefaultDegree = 4;

  /// Uses the raw (un-normalized) sample gradients.
  static ActiveSubspace fit(const SampleSet& samples, std::optional<std::size_t> dim_override = std::nullopt,
                            unsigned degree = kDefaultDegree) {
    if (samples.empty()) throw Error(ErrorCode::EmptySamples, "active subspace needs samples");
    const std::size_t m = samples.dimension();
    ActiveSubspace as;
    as.C_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    for (const auto& s : samples.samples()) {
      const Eigen::Map<const Eigen::VectorXd> g(s.gradient.data(), static_cast<Eigen::Index>(m));
      as.C_.noalias() += g * g.transpose();
    }
    as.C_ /= static_cast<double>(samples.size());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(as.C_);
    const Eigen::Index n = static_cast<Eigen::Index>(m);
    as.lambda_.resize(m);
    as.W_.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      // descending order; sign fixed so the largest-magnitude entry is positive
      as.lambda_[static_cast<std::size_t>(i)] = solver.eigenvalues()(n - 1 - i);
      Eigen::VectorXd w = solver.eigenvectors().col(n - 1 - i);
      Eigen::Index imax = 0;
      w.cwiseAbs().maxCoeff(&imax);
      if (w(imax) < 0.0) w = -w;
      as.W_.col(i) = w;
    }

    if (dim_override) {
      if (*dim_override < 1 || *dim_override > m)
        throw Error(ErrorCode::InvalidArgument, "subspace dimension must be in [1, m]");
      as.dim_ = *dim_override;
    } else {
      as.dim_ = eigengap_dimension(as.lambda_);
    }

    std::vector<Vec> ys;
    Vec fs;
    ys.reserve(samples.size());
    fs.reserve(samples.size());
    for (const auto& s : samples.samples()) {
      ys.push_back(as.reduce(s.location));
      fs.push_back(s.value);
    }
    as.poly_ = PolynomialSurrogate::fit(ys, fs, degree);
    return as;
  }

  /// argmax_j lambda_j / lambda_{j+1} over j < m (denominator floored at 1e-15).
  static std::size_t eigengap_dimension(const Vec& lambda) {
    if (lambda.size() < 2) return 1;
    std::size_t best = 1;
    double best_ratio = -1.0;
    for (std::size_t j = 0; j + 1 < lambda.size(); ++j) {
      const double ratio = lambda[j] / std::max(lambda[j + 1], 1e-15);
      if (ratio > best_ratio) best_ratio = ratio, best = j + 1;
    }
    return best;
  }

  /// Coordinates of p in the active subspace, W_j^T p.
  Vec reduce(std::span<const double> p) const {
    if (p.size() != static_cast<std::size_t>(W_.rows())) throw Error(ErrorCode::DimensionMismatch, "point dimension");
    Vec y(dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < p.size(); ++k) s += W_(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) * p[k];
      y[j] = s;
    }
    return y;
  }

  double predict(std::span<const double> p) const {
    if (!poly_.fitted()) throw Error(ErrorCode::NotFitted, "active subspace surrogate not fitted");
    return poly_(reduce(p));
  }

  const Eigen::MatrixXd& matrix() const { return C_; }
  const Vec& eigenvalues() const { return lambda_; }
  const Eigen::MatrixXd& eigenvectors() const { return W_; }
  std::size_t active_dimension() const { return dim_; }
  const PolynomialSurrogate& surrogate() const { return poly_; }

 private:
  Eigen::MatrixXd C_;
  Vec lambda_;
  Eigen::MatrixXd W_;
  std::size_t dim_ = 0;
  PolynomialSurrogate poly_;
};

inline double as_predict(const ActiveSubspace& space, std::span<const double> p) { return space.predict(p); }

/// CSV `index,lambda` (1-based index, descending eigenvalues).
inline csv::Writer eigenvalue_csv(const ActiveSubspace& as) {
  csv::Writer w({"index", "lambda"});
  for (std::size_t i = 0; i < as.eigenvalues().size(); ++i)
    w.row({static_cast<double>(i + 1), as.eigenvalues()[i]});
  return w;
}

}  // namespace am
