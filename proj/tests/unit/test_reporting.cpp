// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <sstream>
#include <gtest/gtest.h>
#include "fixtures.hpp"
#include "tdinv/reporting.hpp"

using namespace tdinv;

namespace
{

std::vector<std::string> ReadLines(const std::string &path)
{
  std::ifstream in(path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
  {
    lines.push_back(line);
  }
  return lines;
}

int Fields(const std::string &line)
{
  return static_cast<int>(std::count(line.begin(), line.end(), ',')) + 1;
}

std::string TempPath(const std::string &name)
{
  return (std::filesystem::temp_directory_path() / ("tdinv_report_" + name)).string();
}

DataSet SmallData()
{
  DataSet data;
  data.times = {1e-5, 1e-4, 1e-3};
  data.receivers = {{0.0, 0.0}, {1.0, 2.0}};
  data.d_obs = Vector::LinSpaced(6, 1.0, 6.0);
  data.sigma_d = Vector::Constant(6, 0.5);
  return data;
}

}  // namespace

TEST(FitTimingModel, ExactLinearRelation)
{
  std::vector<double> n = {3, 7, 12, 20, 41}, t;
  for (double k : n)
  {
    t.push_back(100.0 + 5.0 * k);
  }
  const TimingModel m = FitTimingModel(n, t);
  EXPECT_TRUE(m.valid);
  EXPECT_NEAR(m.a, 100.0, 1e-10);
  EXPECT_NEAR(m.b, 5.0, 1e-12);
  EXPECT_NEAR(m.r2, 1.0, 1e-14);
  EXPECT_EQ(m.samples, 5);
  EXPECT_TRUE(m.note.empty());
}

TEST(FitTimingModel, TooFewIterationsAreFlagged)
{
  const TimingModel m = FitTimingModel(std::vector<double>{3, 7}, std::vector<double>{1, 2});
  EXPECT_FALSE(m.valid);
  EXPECT_FALSE(m.note.empty());
}

TEST(FitTimingModel, EqualCountsAreFlagged)
{
  const TimingModel m = FitTimingModel(std::vector<double>{50, 50, 50, 50}, std::vector<double>{1, 2, 3, 4});
  EXPECT_FALSE(m.valid);
  EXPECT_NE(m.note.find("equal"), std::string::npos);
}

TEST(FitTimingModel, HistoryOverloadSkipsIterationZero)
{
  std::vector<IterationRecord> history(5);
  for (int k = 0; k < 5; k++)
  {
    history[k].iteration = k;
    history[k].lsqr_iters = k == 0 ? 0 : 10 * k;
    history[k].wall_ms = k == 0 ? 1e6 : 2.0 + 0.5 * history[k].lsqr_iters;
  }
  const TimingModel m = FitTimingModel(history);
  EXPECT_EQ(m.samples, 4);
  EXPECT_NEAR(m.a, 2.0, 1e-10);
  EXPECT_NEAR(m.b, 0.5, 1e-12);
}

TEST(ScalingBenchmark, SingleWorkerHasUnitEfficiencyAndChecksumsAgree)
{
  const auto spec = tdinv::testing::SmallPlanSpec();
  const Problem p = BuildProblem(spec);
  const auto rows = ScalingBenchmark(p, BuildTrueModel(spec, p), tdinv::testing::StandardApprox(12), {1, 2, 4});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_DOUBLE_EQ(rows[0].efficiency, 1.0);
  for (const auto &row : rows)
  {
    EXPECT_EQ(row.checksum, rows[0].checksum);
    EXPECT_GT(row.total_ms, 0.0);
    EXPECT_NEAR(row.total_ms, row.factorize_ms + row.solve_ms, 1e-12 * row.total_ms);
  }
  const Json j = ToJson(rows);
  EXPECT_EQ(j.size(), 3u);
  EXPECT_EQ(j[2]["workers"], 4);
}

TEST(ChecksumPoleSolutions, SensitiveToEveryEntry)
{
  std::vector<ComplexVector> g = {ComplexVector::Ones(3), ComplexVector::Zero(2)};
  const std::string base = ChecksumPoleSolutions(g);
  EXPECT_EQ(base.size(), 16u);
  EXPECT_EQ(ChecksumPoleSolutions(g), base);
  g[1](1) = Complex(0.0, 1e-300);
  EXPECT_NE(ChecksumPoleSolutions(g), base);
}

TEST(Csv, ConvergenceHasOneRowPerRecord)
{
  std::vector<IterationRecord> history(3);
  history[1].iteration = 1;
  history[2].iteration = 2;
  history[2].accepted = true;
  const auto path = TempPath("convergence.csv");
  WriteConvergenceCsv(path, history);
  const auto lines = ReadLines(path);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0].rfind("iteration,phi,misfit", 0), 0u);
  for (const auto &line : lines)
  {
    EXPECT_EQ(Fields(line), 13);
  }
  std::filesystem::remove(path);
}

TEST(Csv, ResidualHeatmapIsChannelsByReceivers)
{
  const DataSet data = SmallData();
  Vector pred = data.d_obs;
  pred(3) += 1.0;  // channel 1, receiver 1
  const auto path = TempPath("heatmap.csv");
  WriteResidualHeatmapCsv(path, data, pred);
  const auto lines = ReadLines(path);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "time,r0,r1");
  EXPECT_EQ(lines[2].substr(lines[2].rfind(',') + 1), "2");
  EXPECT_THROW(WriteResidualHeatmapCsv(path, data, Vector::Zero(5)), Error);
  std::filesystem::remove(path);
}

TEST(Csv, TransientsListEveryDatum)
{
  const DataSet data = SmallData();
  const auto path = TempPath("transients.csv");
  WriteTransientsCsv(path, data, data.d_obs);
  const auto lines = ReadLines(path);
  ASSERT_EQ(lines.size(), 7u);
  EXPECT_EQ(Fields(lines[1]), 7);
  EXPECT_EQ(lines[4].rfind("1,1,2,", 0), 0u);
  std::filesystem::remove(path);
}

TEST(Csv, TimingScalingAndTaylor)
{
  std::vector<IterationRecord> history(4);
  for (int k = 0; k < 4; k++)
  {
    history[k].iteration = k;
    history[k].lsqr_iters = 5 * k;
    history[k].wall_ms = 1.0 + k;
  }
  const auto timing = TempPath("timing.csv");
  WriteTimingCsv(timing, history, FitTimingModel(history));
  EXPECT_EQ(ReadLines(timing).size(), 4u);

  const auto scaling = TempPath("scaling.csv");
  WriteScalingCsv(scaling, {ScalingRow{}, ScalingRow{}});
  EXPECT_EQ(ReadLines(scaling).size(), 3u);

  TaylorReport report;
  report.h = {0.1, 0.01};
  report.e0 = {1.0, 0.1};
  report.e1 = {0.01, 0.0001};
  const auto taylor = TempPath("taylor.csv");
  WriteTaylorCsv(taylor, report);
  const auto lines = ReadLines(taylor);
  ASSERT_EQ(lines.size(), 3u);
  EXPECT_EQ(lines[0], "h,e0,e1");
  for (const auto &p : {timing, scaling, taylor})
  {
    std::filesystem::remove(p);
  }
  EXPECT_THROW(WriteTaylorCsv("/nonexistent/dir/taylor.csv", report), Error);
}

TEST(RunReport, ContainsFinalStateAndTiming)
{
  InversionState state;
  state.status = "target_reached";
  state.phi = 3.0;
  state.chi2 = 0.9;
  state.iteration = 2;
  state.history.resize(3);
  SolveCounters counters;
  counters.factorizations = 42;
  const Json j = RunReport(state, counters);
  EXPECT_EQ(j["status"], "target_reached");
  EXPECT_EQ(j["final"]["gn_iterations"], 2);
  EXPECT_EQ(j["iterations"].size(), 3u);
  EXPECT_EQ(j["counters"]["factorizations"], 42);
  EXPECT_FALSE(j["timing_model"]["valid"].get<bool>());
}
