#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "am/active_subspace.hpp"
#include "am/models.hpp"
#include "am/projector.hpp"
#include "am/sensitivity.hpp"

namespace am {

inline constexpr std::uint64_t kDefaultRngSeed = 46;

struct ExperimentConfig {
  std::string model = "f1";
  std::size_t grid = 100;               // points per axis
  std::optional<std::string> csv_path;  // scattered samples instead of a model grid
  double train_fraction = 0.8;
  std::size_t n_splits = 3;
  std::size_t n_seeds = 3;  // manifold start points per split
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<double> colinear_tol;
  std::uint64_t rng_seed = kDefaultRngSeed;
  std::optional<std::size_t> dim_override;  // active subspace dimension
  bool exact_values = false;
  ValueSource value_source = ValueSource::FirstOrder;
  std::size_t max_retries = 5;
  std::size_t workers = 0;

  void validate() const {
    if (!(train_fraction > 0.0 && train_fraction < 1.0))
      throw Error(ErrorCode::InvalidArgument, "train fraction must lie in (0,1)");
    if (n_splits < 1 || n_seeds < 1) throw Error(ErrorCode::InvalidArgument, "splits and seeds must be >= 1");
    if (!csv_path && grid < 2) throw Error(ErrorCode::InvalidArgument, "grid needs >= 2 points per axis");
  }

  /// Setup for the 5-D Hartmann comparison: 10^5 grid, step 0.15, 98/2 split.
  static ExperimentConfig hartmann(const std::string& output) {
    ExperimentConfig c;
    c.model = output;
    c.grid = 10;
    c.delta = 0.15;
    c.epsilon = 0.15;
    c.train_fraction = 0.98;
    return c;
  }

  /// Setup for the sensitivity profile: 14^5 grid, delta = epsilon = 0.02.
  static ExperimentConfig sensitivity(const std::string& output) {
    ExperimentConfig c;
    c.model = output;
    c.grid = 14;
    c.delta = 0.02;
    c.epsilon = 0.02;
    return c;
  }
};

struct OutcomeCounts {
  std::size_t converged = 0, exited = 0, self_intersected = 0, max_steps = 0;
  std::size_t total() const { return converged + exited + self_intersected + max_steps; }
};

struct RunRecord {
  std::size_t split = 0;
  std::size_t am_seed = 0;
  bool failed = false;
  std::size_t attempts = 0;
  Vec seed_point;
  std::size_t manifold_points = 0;
  bool manifold_monotone = false;
  OutcomeCounts counts;
  double l1 = 0.0;
  double l2 = 0.0;
  double coverage = 0.0;
  double max_tangent_residual = 0.0;
  double build_seconds = 0.0;
  double project_seconds = 0.0;
};

struct SubspaceRecord {
  std::size_t split = 0;
  std::size_t active_dimension = 0;
  Vec eigenvalues;
  double l1 = 0.0;
  double l2 = 0.0;
  double seconds = 0.0;
};

struct MethodStats {
  double l1_mean = 0.0, l1_std = 0.0, l2_mean = 0.0, l2_std = 0.0, coverage_mean = 0.0;
  std::size_t runs = 0;
};

struct ErrorReport {
  std::string label;
  MethodStats am;
  MethodStats as;
  std::vector<RunRecord> runs;
  std::vector<SubspaceRecord> subspaces;
  std::size_t failed_runs = 0;
  double am_seconds = 0.0;
  double as_seconds = 0.0;

  bool all_failed() const { return failed_runs == runs.size(); }
};

namespace detail {

inline std::pair<double, double> mean_std(const Vec& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

}  // namespace detail

/// Everything a run needs: the full sample set and, for analytic models, the exact field.
struct ExperimentData {
  SampleSet samples;
  std::optional<ModelSpec> model;
  std::optional<CubeField> exact;
  std::vector<std::string> labels;
};

inline ExperimentData load_data(const ExperimentConfig& cfg) {
  ExperimentData d;
  if (cfg.csv_path) {
    d.samples = read_samples_csv(*cfg.csv_path);
    for (const auto& a : DomainScaler::identity(d.samples.dimension()).axes()) d.labels.push_back(a.label);
  } else {
    d.model = make_model(cfg.model);
    d.samples = d.model->sample_grid(cfg.grid);
    d.exact = d.model->cube_field();
    d.labels = d.model->labels();
  }
  return d;
}

inline TraversalConfig traversal_for(const ExperimentConfig& cfg, const SampleSet& samples) {
  TraversalConfig t;
  const std::size_t m = samples.dimension();
  if (auto g = samples.grid_layout()) {
    t = TraversalConfig::for_grid(m, g->points_per_axis);
  } else {
    // scattered data: treat the mean sample spacing as the grid spacing
    const double h = 2.0 / (std::pow(static_cast<double>(samples.size()), 1.0 / static_cast<double>(m)) - 1.0);
    t = TraversalConfig{2.0 * h * std::sqrt(static_cast<double>(m)) / 3.0, h};
  }
  if (cfg.delta) t.delta = *cfg.delta;
  if (cfg.epsilon) t.epsilon = *cfg.epsilon;
  if (cfg.colinear_tol) t.colinear_tol = *cfg.colinear_tol;
  t.validate();
  return t;
}

/// Train/test regression comparison of the active manifold against the active subspace.
inline ErrorReport run_regression(const ExperimentConfig& cfg, const ExperimentData& data) {
  cfg.validate();
  const SampleSet& all = data.samples;
  const TraversalConfig tcfg = traversal_for(cfg, all);
  const CubeField* exact = cfg.exact_values && data.exact ? &*data.exact : nullptr;
  if (cfg.exact_values && !exact) throw Error(ErrorCode::InvalidArgument, "exact values need an analytic model");
  const ValueSource source = exact ? ValueSource::Exact : cfg.value_source;

  ErrorReport report;
  report.label = cfg.csv_path ? *cfg.csv_path : cfg.model;
  std::mt19937_64 rng(cfg.rng_seed);
  const std::size_t n = all.size();
  const auto n_train = static_cast<std::size_t>(std::llround(cfg.train_fraction * static_cast<double>(n)));
  if (n_train < 1 || n_train >= n) throw Error(ErrorCode::InvalidArgument, "split leaves an empty train or test set");

  Vec am_l1, am_l2, am_cov, as_l1, as_l2;
  for (std::size_t split = 0; split < cfg.n_splits; ++split) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end());
    std::sort(train.begin(), train.end());
    std::sort(test.begin(), test.end());
    const SampleSet train_set = all.subset(train);
    std::vector<Vec> test_points;
    Vec truth;
    for (std::size_t i : test) {
      test_points.push_back(all[i].location);
      truth.push_back(all[i].value);
    }

    {
      const auto t0 = detail::Clock::now();
      const ActiveSubspace as = ActiveSubspace::fit(train_set, cfg.dim_override);
      SubspaceRecord rec;
      rec.split = split;
      rec.active_dimension = as.active_dimension();
      rec.eigenvalues = as.eigenvalues();
      double s1 = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < test_points.size(); ++i) {
        const double e = as.predict(test_points[i]) - truth[i];
        s1 += std::abs(e);
        s2 += e * e;
      }
      rec.l1 = s1 / static_cast<double>(test_points.size());
      rec.l2 = s2 / static_cast<double>(test_points.size());
      rec.seconds = detail::seconds_since(t0);
      report.as_seconds += rec.seconds;
      as_l1.push_back(rec.l1);
      as_l2.push_back(rec.l2);
      report.subspaces.push_back(std::move(rec));
    }

    std::uniform_int_distribution<std::size_t> pick(0, train_set.size() - 1);
    for (std::size_t s = 0; s < cfg.n_seeds; ++s) {
      RunRecord run;
      run.split = split;
      run.am_seed = s;
      const auto t_build = detail::Clock::now();
      std::optional<ActiveManifold> manifold;
      const ManifoldBuilder builder(train_set, tcfg, source, exact);
      while (!manifold && run.attempts <= cfg.max_retries) {
        ++run.attempts;
        run.seed_point = train_set[pick(rng)].location;
        try {
          manifold = builder.build(run.seed_point);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateManifold) throw;
        }
      }
      if (!manifold) {
        run.failed = true;
        report.failed_runs++;
        report.runs.push_back(std::move(run));
        continue;
      }
      const MonotoneSpline spline = MonotoneSpline::fit(manifold->params(), manifold->values());
      run.build_seconds = detail::seconds_since(t_build);
      run.manifold_points = manifold->size();
      run.manifold_monotone = true;
      for (std::size_t i = 0; i + 1 < manifold->size(); ++i)
        if (!(manifold->values()[i] < manifold->values()[i + 1])) run.manifold_monotone = false;

      const auto t_proj = detail::Clock::now();
      const LevelSetProjector projector(train_set, *manifold, spline, tcfg, exact);
      const auto outcomes = projector.project_all(test_points, cfg.workers);
      run.project_seconds = detail::seconds_since(t_proj);

      double s1 = 0.0, s2 = 0.0;
      for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const auto& o = outcomes[i];
        run.max_tangent_residual = std::max(run.max_tangent_residual, o.max_tangent_residual);
        switch (o.status) {
          case ProjectionStatus::Converged: {
            run.counts.converged++;
            const double e = *o.estimate - truth[i];
            s1 += std::abs(e);
            s2 += e * e;
            break;
          }
          case ProjectionStatus::ExitedCube: run.counts.exited++; break;
          case ProjectionStatus::SelfIntersected: run.counts.self_intersected++; break;
          case ProjectionStatus::MaxSteps: run.counts.max_steps++; break;
        }
      }
      run.coverage = static_cast<double>(run.counts.converged) / static_cast<double>(outcomes.size());
      if (run.counts.converged > 0) {
        run.l1 = s1 / static_cast<double>(run.counts.converged);
        run.l2 = s2 / static_cast<double>(run.counts.converged);
        am_l1.push_back(run.l1);
        am_l2.push_back(run.l2);
      }
      am_cov.push_back(run.coverage);
      report.am_seconds += run.build_seconds + run.project_seconds;
      report.runs.push_back(std::move(run));
    }
  }

  auto fill = [](MethodStats& st, const Vec& l1, const Vec& l2) {
    std::tie(st.l1_mean, st.l1_std) = detail::mean_std(l1);
    std::tie(st.l2_mean, st.l2_std) = detail::mean_std(l2);
    st.runs = l1.size();
  };
  fill(report.am, am_l1, am_l2);
  report.am.coverage_mean = detail::mean_std(am_cov).first;
  fill(report.as, as_l1, as_l2);
  report.as.coverage_mean = 1.0;
  return report;
}

inline ErrorReport run_regression(const ExperimentConfig& cfg) { return run_regression(cfg, load_data(cfg)); }

/// Both Hartmann outputs; `base` is normally ExperimentConfig::hartmann(...) with
/// any overrides applied. Its model field is ignored.
inline std::pair<ErrorReport, ErrorReport> run_hartmann(const ExperimentConfig& base = ExperimentConfig::hartmann("hartmann_B")) {
  ExperimentConfig b = base, u = base;
  b.model = "hartmann_B";
  u.model = "hartmann_u";
  b.csv_path = u.csv_path = std::nullopt;
  return {run_regression(b), run_regression(u)};
}

struct SensitivityRun {
  ActiveManifold manifold;
  SensitivityProfile profile;
  std::vector<RankSegment> segments;
  std::size_t attempts = 0;
};

/// One manifold over the full sample set from a random sample, then its derivative profile.
inline SensitivityRun run_sensitivity(const ExperimentConfig& cfg, const ExperimentData& data, std::size_t window = 5) {
  const SampleSet& all = data.samples;
  const TraversalConfig tcfg = traversal_for(cfg, all);
  const CubeField* exact = cfg.exact_values && data.exact ? &*data.exact : nullptr;
  if (cfg.exact_values && !exact) throw Error(ErrorCode::InvalidArgument, "exact values need an analytic model");
  const ManifoldBuilder builder(all, tcfg, exact ? ValueSource::Exact : cfg.value_source, exact);

  std::mt19937_64 rng(cfg.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  SensitivityRun out;
  std::optional<ActiveManifold> manifold;
  while (!manifold) {
    ++out.attempts;
    try {
      manifold = builder.build(all[pick(rng)].location);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::DegenerateManifold || out.attempts > cfg.max_retries) throw;
    }
  }
  out.manifold = *std::move(manifold);
  out.profile = profile(out.manifold, all, exact, data.labels);
  out.segments = rank_segments(out.profile, window);
  return out;
}

inline SensitivityRun run_sensitivity(const ExperimentConfig& cfg, std::size_t window = 5) {
  return run_sensitivity(cfg, load_data(cfg), window);
}

// ---------------------------------------------------------------------------
// Report formatting
// ---------------------------------------------------------------------------

/// Deterministic summary CSV (no timings).
inline csv::Writer summary_csv(const ErrorReport& r) {
  csv::Writer w({"method", "l1_mean", "l1_std", "l2_mean", "l2_std", "coverage_mean", "runs", "failed_runs"});
  auto row = [&](const char* name, const MethodStats& s, std::size_t failed) {
    w.row_strings({name, csv::format(s.l1_mean), csv::format(s.l1_std), csv::format(s.l2_mean), csv::format(s.l2_std),
                   csv::format(s.coverage_mean), std::to_string(s.runs), std::to_string(failed)});
  };
  row("AM", r.am, r.failed_runs);
  row("AS", r.as, 0);
  return w;
}

/// Per-run detail CSV (no timings).
inline csv::Writer runs_csv(const ErrorReport& r) {
  csv::Writer w({"split", "am_seed", "failed", "attempts", "manifold_points", "converged", "exited_cube",
                 "self_intersected", "max_steps", "coverage", "l1", "l2"});
  for (const auto& run : r.runs) {
    w.row_strings({std::to_string(run.split), std::to_string(run.am_seed), run.failed ? "1" : "0",
                   std::to_string(run.attempts), std::to_string(run.manifold_points),
                   std::to_string(run.counts.converged), std::to_string(run.counts.exited),
                   std::to_string(run.counts.self_intersected), std::to_string(run.counts.max_steps),
                   csv::format(run.coverage), csv::format(run.l1), csv::format(run.l2)});
  }
  return w;
}

inline std::string sci(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

inline std::string markdown_table(const std::vector<ErrorReport>& reports) {
  std::ostringstream os;
  os << "| function | method | l1 mean | l1 std | l2 mean | l2 std | n/N mean | runs | wall time |\n"
     << "|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& r : reports) {
    os << "| " << r.label << " | AM | " << sci(r.am.l1_mean) << " | " << sci(r.am.l1_std) << " | "
       << sci(r.am.l2_mean) << " | " << sci(r.am.l2_std) << " | " << sci(100.0 * r.am.coverage_mean) << "% | "
       << r.am.runs << (r.failed_runs ? " (" + std::to_string(r.failed_runs) + " failed)" : std::string()) << " | "
       << sci(r.am_seconds) << "s |\n";
    os << "| " << r.label << " | AS | " << sci(r.as.l1_mean) << " | " << sci(r.as.l1_std) << " | "
       << sci(r.as.l2_mean) << " | " << sci(r.as.l2_std) << " | 100% | " << r.as.runs << " | " << sci(r.as_seconds)
       << "s |\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Timing comparison
// ---------------------------------------------------------------------------

struct BenchRow {
  std::size_t dim = 0;
  std::size_t points_per_axis = 0;
  double test_fraction = 0.0;
  std::size_t test_points = 0;
  double am_seconds = 0.0;  // build + project, averaged over runs
  double as_seconds = 0.0;  // fit + predict, averaged over splits
  double am_build_seconds = 0.0;
  double am_project_seconds = 0.0;
};

/// Times AM and AS on |x|^2 for one (m, n, test fraction) cell.
inline BenchRow bench_cell(std::size_t dim, std::size_t n, double test_fraction, std::uint64_t seed,
                           std::size_t splits = 3, std::size_t seeds = 3, std::size_t workers = 1) {
  const ModelSpec model = make_sphere(dim);
  const SampleSet all = model.sample_grid(n);
  const TraversalConfig tcfg = TraversalConfig::for_grid(dim, n);
  std::mt19937_64 rng(seed);
  BenchRow row{dim, n, test_fraction};
  const auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(all.size())));
  const std::size_t n_train = all.size() - n_test;
  std::size_t am_runs = 0;
  for (std::size_t split = 0; split < splits; ++split) {
    std::vector<std::size_t> perm(all.size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::size_t> train(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::sort(train.begin(), train.end());
    std::vector<Vec> test;
    for (std::size_t i = n_train; i < perm.size(); ++i) test.push_back(all[perm[i]].location);
    row.test_points = test.size();
    const SampleSet train_set = all.subset(train);

    auto t0 = detail::Clock::now();
    const ActiveSubspace as = ActiveSubspace::fit(train_set);
    double sink = 0.0;
    for (const auto& p : test) sink += as.predict(p);
    row.as_seconds += detail::seconds_since(t0);

    std::uniform_int_distribution<std::size_t> pick(0, train_set.size() - 1);
    for (std::size_t s = 0; s < seeds; ++s) {
      t0 = detail::Clock::now();
      std::optional<ActiveManifold> manifold;
      for (int attempt = 0; attempt < 6 && !manifold; ++attempt) {
        try {
          manifold = build_manifold(train_set, train_set[pick(rng)].location, tcfg);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::DegenerateManifold) throw;
        }
      }
      if (!manifold) continue;
      const MonotoneSpline spline = MonotoneSpline::fit(manifold->params(), manifold->values());
      row.am_build_seconds += detail::seconds_since(t0);
      if (!test.empty()) {
        const auto tp = detail::Clock::now();
        const LevelSetProjector projector(train_set, *manifold, spline, tcfg);
        for (const auto& o : projector.project_all(test, workers)) sink += o.estimate.value_or(0.0);
        row.am_project_seconds += detail::seconds_since(tp);
      }
      ++am_runs;
    }
    volatile double keep = sink;
    (void)keep;
  }
  row.as_seconds /= static_cast<double>(splits);
  if (am_runs > 0) {
    row.am_build_seconds /= static_cast<double>(am_runs);
    row.am_project_seconds /= static_cast<double>(am_runs);
  }
  row.am_seconds = row.am_build_seconds + row.am_project_seconds;
  return row;
}

inline std::vector<BenchRow> bench(std::uint64_t seed = kDefaultRngSeed, std::size_t workers = 1) {
  std::vector<BenchRow> rows;
  for (std::size_t m : {2u, 3u})
    for (std::size_t n : {15u, 30u})
      for (double frac : {1.0 / 6.0, 1.0 / 3.0}) rows.push_back(bench_cell(m, n, frac, seed, 3, 3, workers));
  return rows;
}

inline std::string bench_markdown(const std::vector<BenchRow>& rows) {
  std::ostringstream os;
  os << "| m | n | test fraction | AM time | AS time | AM/AS |\n|---|---|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.dim << " | " << r.points_per_axis << " | " << sci(r.test_fraction) << " | "
       << sci(1e3 * r.am_seconds) << "ms | " << sci(1e3 * r.as_seconds) << "ms | "
       << sci(r.as_seconds > 0 ? r.am_seconds / r.as_seconds : 0.0) << " |\n";
  }
  return os.str();
}

}  // namespace am
