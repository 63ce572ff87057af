#include <gtest/gtest.h>

#include "am/am.hpp"

using namespace am;

namespace {

ExperimentConfig small(const std::string& model) {
  ExperimentConfig c;
  c.model = model;
  c.grid = 40;
  return c;
}

void check_report(const ErrorReport& r, std::size_t test_size) {
  for (const auto& run : r.runs) {
    if (run.failed) continue;
    EXPECT_EQ(run.counts.total(), test_size);
    EXPECT_GT(run.coverage, 0.0);
    EXPECT_LE(run.coverage, 1.0);
    EXPECT_DOUBLE_EQ(run.coverage, static_cast<double>(run.counts.converged) / static_cast<double>(test_size));
    EXPECT_GE(run.l2, run.l1 * run.l1 * (1 - 1e-12));
    EXPECT_TRUE(run.manifold_monotone);
    EXPECT_LE(run.max_tangent_residual, 1e-10);
  }
  for (const auto& s : r.subspaces) EXPECT_GE(s.l2, s.l1 * s.l1 * (1 - 1e-12));
  for (double v : {r.am.l1_mean, r.am.l1_std, r.am.l2_mean, r.am.l2_std, r.as.l1_mean, r.as.l2_mean})
    EXPECT_GE(v, 0.0);
  EXPECT_EQ(r.as.coverage_mean, 1.0);
}

}  // namespace

TEST(Config, Validation) {
  ExperimentConfig c;
  c.train_fraction = 1.0;
  EXPECT_THROW(c.validate(), Error);
  c.train_fraction = 0.5;
  c.n_seeds = 0;
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, Presets) {
  auto h = ExperimentConfig::hartmann("hartmann_B");
  EXPECT_EQ(h.grid, 10u);
  EXPECT_EQ(*h.delta, 0.15);
  EXPECT_EQ(h.train_fraction, 0.98);
  auto s = ExperimentConfig::sensitivity("hartmann_B");
  EXPECT_EQ(s.grid, 14u);
  EXPECT_EQ(*s.delta, 0.02);
  EXPECT_EQ(s.rng_seed, 46u);
}

TEST(Regression, SmallGridReports) {
  for (const char* name : {"f1", "f3"}) {
    auto r = run_regression(small(name));
    EXPECT_EQ(r.runs.size(), 9u);
    EXPECT_EQ(r.subspaces.size(), 3u);
    EXPECT_EQ(r.failed_runs, 0u);
    check_report(r, 320);
    EXPECT_LT(r.am.l1_mean, r.as.l1_mean);
  }
}

TEST(Regression, Deterministic) {
  auto a = run_regression(small("f2"));
  auto b = run_regression(small("f2"));
  EXPECT_EQ(summary_csv(a).str(), summary_csv(b).str());
  EXPECT_EQ(runs_csv(a).str(), runs_csv(b).str());
  auto c = small("f2");
  c.rng_seed = 7;
  EXPECT_NE(runs_csv(run_regression(c)).str(), runs_csv(a).str());
}

TEST(Regression, ConstantModelReportedNotThrown) {
  auto c = small("constant");
  c.grid = 10;
  auto r = run_regression(c);
  EXPECT_EQ(r.failed_runs, 9u);
  EXPECT_TRUE(r.all_failed());
  for (const auto& run : r.runs) EXPECT_EQ(run.attempts, c.max_retries + 1);
  EXPECT_NEAR(r.as.l1_mean, 0.0, 1e-12);
}

TEST(Regression, ExactValues) {
  auto c = small("f1");
  c.exact_values = true;
  auto r = run_regression(c);
  check_report(r, 320);
  EXPECT_LT(r.am.l1_mean, 0.05);
}

TEST(Regression, CsvInput) {
  auto s = make_model("f3").sample_grid(30);
  std::string path = ::testing::TempDir() + "/samples.csv";
  {
    csv::Writer w({"x1", "x2", "f", "g1", "g2"});
    for (const auto& p : s.samples()) w.row({p.location[0], p.location[1], p.value, p.gradient[0], p.gradient[1]});
    w.save(path);
  }
  ExperimentConfig c;
  c.csv_path = path;
  auto r = run_regression(c);
  check_report(r, 180);
  EXPECT_LT(r.am.l1_mean, r.as.l1_mean);
  c.exact_values = true;
  EXPECT_THROW(run_regression(c), Error);
}

TEST(Regression, Formatting) {
  auto r = run_regression(small("f3"));
  auto md = markdown_table({r});
  EXPECT_NE(md.find("| f3 | AM |"), std::string::npos);
  EXPECT_NE(md.find("| f3 | AS |"), std::string::npos);
  auto sum = summary_csv(r).str();
  EXPECT_EQ(sum.substr(0, sum.find('\n')), "method,l1_mean,l1_std,l2_mean,l2_std,coverage_mean,runs,failed_runs");
}

TEST(Sensitivity, HartmannRhoCurveFlat) {
  auto c = ExperimentConfig::sensitivity("hartmann_u");
  c.grid = 6;
  c.delta = c.epsilon = 0.05;
  auto run = run_sensitivity(c);
  EXPECT_GE(run.manifold.size(), 2u);
  for (double v : run.profile.curves[1]) EXPECT_LE(v, 1e-12);
  EXPECT_EQ(run.profile.labels[2], "log(dp0dx)");
}

TEST(Bench, AmSlowerThanAs) {
  auto row = bench_cell(2, 15, 1.0 / 6.0, 46);
  EXPECT_GT(row.am_seconds, row.as_seconds);
  EXPECT_EQ(row.test_points, 38u);
}

TEST(Bench, EmptyTestSet) {
  auto row = bench_cell(2, 15, 0.0, 46);
  EXPECT_EQ(row.test_points, 0u);
  EXPECT_EQ(row.am_project_seconds, 0.0);
  EXPECT_GT(row.am_build_seconds, 0.0);
}

TEST(Bench, GrowsWithGrid) {
  auto a = bench_cell(3, 15, 1.0 / 3.0, 46);
  auto b = bench_cell(3, 30, 1.0 / 3.0, 46);
  EXPECT_GT(b.am_seconds, a.am_seconds);
}
