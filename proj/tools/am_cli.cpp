// am: command-line front end for manifold building, projection, regression
// comparisons, the Hartmann study, sensitivity profiles and timing.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "am/am.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kDegenerate = 2;

struct Options {
  std::string function = "f1";
  std::optional<std::size_t> grid;
  std::optional<std::string> csv;
  std::optional<double> delta, epsilon, colinear_tol;
  std::uint64_t seed = am::kDefaultRngSeed;
  std::size_t splits = 3, am_seeds = 3;
  std::optional<double> train_frac;
  std::optional<std::size_t> dim_override;
  bool exact = false;
  std::string value_source = "first-order";
  std::string out = "am_out";
  std::size_t workers = 0;
  std::size_t window = 5;
  std::optional<std::string> points;
  bool save_samples = false;
};

void common_flags(CLI::App* cmd, Options& o) {
  std::vector<std::string> names = am::model_names();
  cmd->add_option("--function", o.function, "model name")->check(CLI::IsMember(names));
  cmd->add_option("--grid", o.grid, "grid points per axis");
  cmd->add_option("--csv", o.csv, "scattered samples x1..xm,f,g1..gm")->check(CLI::ExistingFile);
  cmd->add_option("--delta", o.delta, "step size");
  cmd->add_option("--epsilon", o.epsilon, "closeness tolerance");
  cmd->add_option("--colinear-tol", o.colinear_tol, "threshold on |v| before falling back");
  cmd->add_option("--seed", o.seed, "rng seed");
  cmd->add_flag("--exact-values", o.exact, "evaluate the analytic model instead of nearest samples");
  cmd->add_option("--value-source", o.value_source, "manifold values: nearest|first-order")
      ->check(CLI::IsMember({"nearest", "first-order"}));
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--workers", o.workers, "projection threads (0 = hardware)");
}

void split_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--splits", o.splits, "train/test splits")->check(CLI::PositiveNumber);
  cmd->add_option("--am-seeds", o.am_seeds, "manifold start points per split")->check(CLI::PositiveNumber);
  cmd->add_option("--train-frac", o.train_frac, "training fraction")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--dim-override", o.dim_override, "active subspace dimension");
}

am::ExperimentConfig to_config(const Options& o, am::ExperimentConfig c) {
  if (o.csv) c.csv_path = *o.csv;
  else c.model = o.function;
  if (o.grid) c.grid = *o.grid;
  if (o.delta) c.delta = o.delta;
  if (o.epsilon) c.epsilon = o.epsilon;
  if (o.colinear_tol) c.colinear_tol = o.colinear_tol;
  if (o.train_frac) c.train_fraction = *o.train_frac;
  c.rng_seed = o.seed;
  c.n_splits = o.splits;
  c.n_seeds = o.am_seeds;
  c.dim_override = o.dim_override;
  c.exact_values = o.exact;
  c.value_source = o.value_source == "nearest" ? am::ValueSource::NearestSample : am::ValueSource::FirstOrder;
  c.workers = o.workers;
  return c;
}

fs::path outdir(const Options& o) {
  fs::path p(o.out);
  fs::create_directories(p);
  return p;
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << text;
}

struct Built {
  am::ExperimentData data;
  am::TraversalConfig cfg;
  const am::CubeField* exact = nullptr;
  am::ActiveManifold manifold;
  am::MonotoneSpline spline;
};

Built build(const Options& o) {
  Built b;
  const auto c = to_config(o, {});
  b.data = am::load_data(c);
  b.cfg = am::traversal_for(c, b.data.samples);
  if (c.exact_values) {
    if (!b.data.exact) throw am::Error(am::ErrorCode::InvalidArgument, "--exact-values needs an analytic model");
    b.exact = &*b.data.exact;
  }
  const am::ManifoldBuilder builder(b.data.samples, b.cfg, b.exact ? am::ValueSource::Exact : c.value_source, b.exact);
  std::mt19937_64 rng(c.rng_seed);
  std::uniform_int_distribution<std::size_t> pick(0, b.data.samples.size() - 1);
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      b.manifold = builder.build(b.data.samples[pick(rng)].location);
      break;
    } catch (const am::Error& e) {
      if (e.code() != am::ErrorCode::DegenerateManifold || attempt >= c.max_retries) throw;
      std::cerr << "seed point degenerate, retrying\n";
    }
  }
  b.spline = am::MonotoneSpline::fit(b.manifold.params(), b.manifold.values());
  return b;
}

std::vector<am::Vec> read_points(const std::string& path, std::size_t dim) {
  std::ifstream f(path);
  if (!f) throw am::Error(am::ErrorCode::ParseError, "cannot open '" + path + "'");
  std::string line;
  std::getline(f, line);
  std::vector<am::Vec> pts;
  while (std::getline(f, line)) {
    if (am::csv::trim(line).empty()) continue;
    auto fields = am::csv::split(line);
    if (fields.size() < dim) throw am::Error(am::ErrorCode::ParseError, "point row too short");
    am::Vec p(dim);
    for (std::size_t k = 0; k < dim; ++k) p[k] = am::csv::parse_double(fields[k]);
    pts.push_back(std::move(p));
  }
  return pts;
}

int cmd_build(const Options& o) {
  Built b = build(o);
  const auto dir = outdir(o);
  am::manifold_csv(b.manifold).save((dir / "manifold.csv").string());
  am::spline_csv(b.spline).save((dir / "spline.csv").string());
  if (o.save_samples) am::samples_csv(b.data.samples).save((dir / "samples.csv").string());
  std::cout << "manifold: " << b.manifold.size() << " points, f in [" << b.manifold.values().front() << ", "
            << b.manifold.values().back() << "], ends " << am::to_string(b.manifold.descent_end()) << " / "
            << am::to_string(b.manifold.ascent_end()) << "\n";
  return 0;
}

int cmd_project(const Options& o) {
  Built b = build(o);
  std::vector<am::Vec> pts;
  am::Vec truth;
  if (o.points) {
    pts = read_points(*o.points, b.data.samples.dimension());
  } else {
    for (const auto& s : b.data.samples.samples()) {
      pts.push_back(s.location);
      truth.push_back(s.value);
    }
  }
  const am::LevelSetProjector pr(b.data.samples, b.manifold, b.spline, b.cfg, b.exact);
  const auto outcomes = pr.project_all(pts, o.workers);
  const auto dir = outdir(o);
  am::manifold_csv(b.manifold).save((dir / "manifold.csv").string());
  am::trace_csv(outcomes, b.data.samples.dimension()).save((dir / "trace.csv").string());

  std::vector<std::string> header;
  for (std::size_t k = 0; k < b.data.samples.dimension(); ++k) header.push_back("x" + std::to_string(k + 1));
  for (const char* h : {"status", "t", "fhat"}) header.emplace_back(h);
  am::csv::Writer est(header);
  std::size_t converged = 0;
  double l1 = 0.0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    std::vector<std::string> row;
    for (double c : pts[i]) row.push_back(am::csv::format(c));
    row.emplace_back(am::to_string(outcomes[i].status));
    row.push_back(outcomes[i].t_star ? am::csv::format(*outcomes[i].t_star) : "");
    row.push_back(outcomes[i].estimate ? am::csv::format(*outcomes[i].estimate) : "");
    est.row_strings(row);
    if (outcomes[i].converged()) {
      ++converged;
      if (!truth.empty()) l1 += std::abs(*outcomes[i].estimate - truth[i]);
    }
  }
  est.save((dir / "estimates.csv").string());
  std::cout << "projected " << pts.size() << " points, converged " << converged;
  if (!truth.empty() && converged) std::cout << ", l1 " << l1 / static_cast<double>(converged);
  std::cout << "\n";
  return 0;
}

void save_report(const fs::path& dir, const std::string& stem, const am::ErrorReport& r) {
  am::summary_csv(r).save((dir / (stem + "_summary.csv")).string());
  am::runs_csv(r).save((dir / (stem + "_runs.csv")).string());
}

int cmd_regress(const Options& o) {
  const auto r = am::run_regression(to_config(o, {}));
  const auto dir = outdir(o);
  const std::string stem = o.csv ? fs::path(*o.csv).stem().string() : o.function;
  save_report(dir, stem, r);
  if (!r.subspaces.empty()) {
    am::csv::Writer w({"index", "lambda"});
    for (std::size_t i = 0; i < r.subspaces.front().eigenvalues.size(); ++i)
      w.row({static_cast<double>(i + 1), r.subspaces.front().eigenvalues[i]});
    w.save((dir / (stem + "_eigenvalues.csv")).string());
  }
  std::cout << am::markdown_table({r});
  if (r.all_failed()) {
    std::cerr << "every manifold attempt was degenerate\n";
    return kDegenerate;
  }
  return 0;
}

int cmd_hartmann(const Options& o) {
  auto base = to_config(o, am::ExperimentConfig::hartmann("hartmann_B"));
  const auto [b, u] = am::run_hartmann(base);
  const auto dir = outdir(o);
  save_report(dir, "hartmann_B", b);
  save_report(dir, "hartmann_u", u);
  std::cout << am::markdown_table({b, u});
  return b.all_failed() || u.all_failed() ? kDegenerate : 0;
}

int cmd_sense(const Options& o) {
  auto c = to_config(o, o.function.rfind("hartmann", 0) == 0 && !o.csv ? am::ExperimentConfig::sensitivity(o.function)
                                                                       : am::ExperimentConfig{});
  const auto run = am::run_sensitivity(c, o.window);
  const auto dir = outdir(o);
  am::manifold_csv(run.manifold).save((dir / "manifold.csv").string());
  am::profile_csv(run.profile).save((dir / "profile.csv").string());
  am::profile_csv(run.profile, true).save((dir / "profile_signed.csv").string());
  const std::string md = am::segments_markdown(run.segments, run.profile.labels);
  write_text(dir / "segments.md", md);
  write_text(dir / "profile.svg", am::profile_svg(run.profile));
  std::cout << "manifold: " << run.manifold.size() << " points\n\n" << md;
  return 0;
}

int cmd_bench(const Options& o) {
  const auto rows = am::bench(o.seed, o.workers == 0 ? 1 : o.workers);
  const auto dir = outdir(o);
  am::csv::Writer w({"m", "n", "test_fraction", "test_points", "am_seconds", "as_seconds", "ratio"});
  for (const auto& r : rows)
    w.row({static_cast<double>(r.dim), static_cast<double>(r.points_per_axis), r.test_fraction,
           static_cast<double>(r.test_points), r.am_seconds, r.as_seconds,
           r.as_seconds > 0 ? r.am_seconds / r.as_seconds : 0.0});
  w.save((dir / "bench.csv").string());
  std::cout << am::bench_markdown(rows);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Active manifold toolkit"};
  app.require_subcommand(1);
  Options o;

  auto* build_cmd = app.add_subcommand("build", "build a manifold from a random sample and fit its spline");
  common_flags(build_cmd, o);
  build_cmd->add_flag("--save-samples", o.save_samples, "also write the sample set");

  auto* project_cmd = app.add_subcommand("project", "project points onto a manifold along level sets");
  common_flags(project_cmd, o);
  project_cmd->add_option("--points", o.points, "CSV of points (x1..xm header); default: every sample");

  auto* regress_cmd = app.add_subcommand("regress", "train/test comparison of AM against AS");
  common_flags(regress_cmd, o);
  split_flags(regress_cmd, o);

  auto* hartmann_cmd = app.add_subcommand("hartmann", "both Hartmann outputs on the 5-D grid");
  common_flags(hartmann_cmd, o);
  split_flags(hartmann_cmd, o);

  auto* sense_cmd = app.add_subcommand("sense", "partial-derivative profile along a manifold");
  common_flags(sense_cmd, o);
  sense_cmd->add_option("--window", o.window, "moving-average width before ranking")->check(CLI::PositiveNumber);

  auto* bench_cmd = app.add_subcommand("bench", "AM vs AS wall time on |x|^2");
  bench_cmd->add_option("--seed", o.seed, "rng seed");
  bench_cmd->add_option("--out", o.out, "output directory");
  bench_cmd->add_option("--workers", o.workers, "projection threads");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*build_cmd) return cmd_build(o);
    if (*project_cmd) return cmd_project(o);
    if (*regress_cmd) return cmd_regress(o);
    if (*hartmann_cmd) return cmd_hartmann(o);
    if (*sense_cmd) return cmd_sense(o);
    if (*bench_cmd) return cmd_bench(o);
  } catch (const am::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == am::ErrorCode::InvalidArgument || e.code() == am::ErrorCode::UnknownModel ? 1 : kDegenerate;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
