#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "am/csv.hpp"
#include "am/errors.hpp"
#include "am/manifold.hpp"
#include "am/sample_set.hpp"

namespace am {

/// Partial derivatives along a manifold, one curve per input variable.
struct SensitivityProfile {
  Vec params;
  std::vector<Vec> curves;  // |df/dx_k| at each manifold point
  std::vector<Vec> signed_curves;
  std::vector<std::string> labels;

  std::size_t variables() const { return curves.size(); }
  std::size_t size() const { return params.size(); }
};

inline std::vector<std::string> default_labels(std::size_t dim) {
  std::vector<std::string> out;
  for (std::size_t k = 0; k < dim; ++k) out.push_back("x" + std::to_string(k + 1));
  return out;
}

/// Gradient of the nearest sample at each manifold point, or the exact
/// gradient when a field is supplied.
inline SensitivityProfile profile(const ActiveManifold& manifold, const SampleSet& samples,
                                  const CubeField* exact = nullptr, std::vector<std::string> labels = {}) {
  const std::size_t m = manifold.dimension();
  if (m != samples.dimension()) throw Error(ErrorCode::DimensionMismatch, "manifold and samples differ in dimension");
  if (labels.empty()) labels = default_labels(m);
  if (labels.size() != m) throw Error(ErrorCode::LengthMismatch, "one label per variable");

  SensitivityProfile out;
  out.params = manifold.params();
  out.labels = std::move(labels);
  out.curves.assign(m, Vec(manifold.size(), 0.0));
  out.signed_curves = out.curves;
  for (std::size_t i = 0; i < manifold.size(); ++i) {
    const auto& p = manifold.points()[i];
    const Vec g = exact ? (*exact)(p).gradient : samples.nearest(p).gradient;
    for (std::size_t k = 0; k < m; ++k) {
      out.signed_curves[k][i] = g[k];
      out.curves[k][i] = std::abs(g[k]);
    }
  }
  return out;
}

/// Centered moving average; the window shrinks at the ends.
inline Vec moving_average(const Vec& y, std::size_t window) {
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
  const std::size_t left = (window - 1) / 2, right = window / 2;
  Vec out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const std::size_t lo = i >= left ? i - left : 0;
    const std::size_t hi = std::min(y.size() - 1, i + right);
    double s = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) s += y[j];
    out[i] = s / static_cast<double>(hi - lo + 1);
  }
  return out;
}

struct RankSegment {
  double t_begin = 0.0;
  double t_end = 0.0;
  std::vector<std::size_t> ranking;  // variable indices, most influential first
};

/// Descending argsort of each smoothed curve at every t, merged into maximal runs.
/// Ties keep the lower variable index first.
inline std::vector<RankSegment> rank_segments(const SensitivityProfile& prof, std::size_t window = 5) {
  if (window == 0) throw Error(ErrorCode::InvalidArgument, "window must be >= 1");
  const std::size_t n = prof.size(), m = prof.variables();
  std::vector<RankSegment> out;
  if (n == 0 || m == 0) return out;

  std::vector<Vec> smooth;
  for (const auto& c : prof.curves) smooth.push_back(moving_average(c, window));

  auto ranking_at = [&](std::size_t i) {
    std::vector<std::size_t> r(m);
    std::iota(r.begin(), r.end(), 0);
    std::stable_sort(r.begin(), r.end(), [&](std::size_t a, std::size_t b) { return smooth[a][i] > smooth[b][i]; });
    return r;
  };

  out.push_back({0.0, 1.0, ranking_at(0)});
  for (std::size_t i = 1; i < n; ++i) {
    auto r = ranking_at(i);
    if (r == out.back().ranking) continue;
    const double cut = 0.5 * (prof.params[i - 1] + prof.params[i]);
    out.back().t_end = cut;
    out.push_back({cut, 1.0, std::move(r)});
  }
  return out;
}

inline std::size_t rank_of(const std::vector<std::size_t>& ranking, std::size_t var) {
  return static_cast<std::size_t>(std::find(ranking.begin(), ranking.end(), var) - ranking.begin());
}

/// Boundaries t in [t_lo, t_hi] where `riser` moves from below `incumbent` to above it.
inline std::vector<double> overtakes(const std::vector<RankSegment>& segs, std::size_t riser, std::size_t incumbent,
                                     double t_lo = 0.0, double t_hi = 1.0) {
  std::vector<double> out;
  for (std::size_t s = 1; s < segs.size(); ++s) {
    const double t = segs[s].t_begin;
    if (t < t_lo || t > t_hi) continue;
    const bool before = rank_of(segs[s - 1].ranking, riser) > rank_of(segs[s - 1].ranking, incumbent);
    const bool after = rank_of(segs[s].ranking, riser) < rank_of(segs[s].ranking, incumbent);
    if (before && after) out.push_back(t);
  }
  return out;
}

/// CSV `t,<label1>,...,<labelm>` of magnitudes (or signed partials).
inline csv::Writer profile_csv(const SensitivityProfile& prof, bool signed_values = false) {
  std::vector<std::string> header{"t"};
  header.insert(header.end(), prof.labels.begin(), prof.labels.end());
  csv::Writer w(header);
  const auto& curves = signed_values ? prof.signed_curves : prof.curves;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    Vec row{prof.params[i]};
    for (const auto& c : curves) row.push_back(c[i]);
    w.row(row);
  }
  return w;
}

inline std::string segments_markdown(const std::vector<RankSegment>& segs, const std::vector<std::string>& labels) {
  std::ostringstream os;
  os << "| t from | t to | ranking |\n|---|---|---|\n";
  for (const auto& s : segs) {
    os << "| " << csv::format(s.t_begin) << " | " << csv::format(s.t_end) << " | ";
    for (std::size_t k = 0; k < s.ranking.size(); ++k) os << (k ? " > " : "") << labels.at(s.ranking[k]);
    os << " |\n";
  }
  return os.str();
}

/// Line plot, one polyline per variable.
inline std::string profile_svg(const SensitivityProfile& prof) {
  const double W = 640, H = 400, L = 50, R = 150, T = 20, B = 40;
  double ymax = 0.0;
  for (const auto& c : prof.curves)
    for (double v : c) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  static const char* colors[] = {"#e377c2", "#7f7f7f", "#1f77b4", "#ff7f0e", "#2ca02c",
                                 "#d62728", "#9467bd", "#8c564b", "#17becf", "#bcbd22"};
  auto sx = [&](double t) { return L + t * (W - L - R); };
  auto sy = [&](double v) { return H - B - v / ymax * (H - T - B); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  os << "<text x=\"" << (W - R + L) / 2 << "\" y=\"" << H - 8 << "\" font-size=\"12\">t</text>\n";
  os << "<text x=\"4\" y=\"" << T + 4 << "\" font-size=\"10\">" << csv::format(ymax) << "</text>\n";
  for (std::size_t k = 0; k < prof.variables(); ++k) {
    const char* col = colors[k % std::size(colors)];
    os << "<polyline fill=\"none\" stroke=\"" << col << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < prof.size(); ++i) os << sx(prof.params[i]) << ',' << sy(prof.curves[k][i]) << ' ';
    os << "\"/>\n";
    const double ly = T + 16 * (k + 1);
    os << "<line x1=\"" << W - R + 10 << "\" y1=\"" << ly << "\" x2=\"" << W - R + 30 << "\" y2=\"" << ly
       << "\" stroke=\"" << col << "\" stroke-width=\"2\"/>";
    os << "<text x=\"" << W - R + 35 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">" << prof.labels[k] << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace am
