// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_REPORTING_HPP
#define TDINV_REPORTING_HPP

#include <string>
#include <vector>
#include "tdinv/serialization.hpp"

namespace tdinv
{

// Ordinary least squares of wall time against LSQR iterations, T = a + b n.
struct TimingModel
{
  double a = 0.0;
  double b = 0.0;
  double r2 = 0.0;
  int samples = 0;
  bool valid = false;
  std::string note;  // set when the fit is flagged
};

TimingModel FitTimingModel(const std::vector<double> &lsqr_iters, const std::vector<double> &wall_ms);

// Uses the Gauss-Newton records (iteration ≥ 1).
TimingModel FitTimingModel(const std::vector<IterationRecord> &history);

struct ScalingRow
{
  int workers = 1;
  double factorize_ms = 0.0;
  double solve_ms = 0.0;
  double total_ms = 0.0;
  double efficiency = 1.0;  // T_1 / (W T_W) on total time
  std::string checksum;     // hash of all g_i
};

// Times factorize-all and solve-all for each worker count (best of `repeats`).
std::vector<ScalingRow> ScalingBenchmark(const Problem &problem, const Model &model,
                                         const RationalApproximant &approx,
                                         const std::vector<int> &worker_counts, int repeats = 1,
                                         FactorBackend backend = FactorBackend::SparseLU);

std::string ChecksumPoleSolutions(const std::vector<ComplexVector> &g);

Json ToJson(const TimingModel &model);
Json ToJson(const std::vector<ScalingRow> &rows);

// Consolidated run report from an inversion state.
Json RunReport(const InversionState &state, const SolveCounters &counters);

// iteration, phi, misfit, reg, chi2, lambda, eta, accepted, lsqr_iters, line_search_trials,
// wall_ms, factorizations, solves
void WriteConvergenceCsv(const std::string &path, const std::vector<IterationRecord> &history);

// Rows are channels, columns receivers; entries (d_pred - d_obs) / σ_d.
void WriteResidualHeatmapCsv(const std::string &path, const DataSet &data, const Vector &d_pred);

// receiver, x, y, time, observed, predicted, sigma
void WriteTransientsCsv(const std::string &path, const DataSet &data, const Vector &d_pred);

// iteration, lsqr_iters, wall_ms, model_ms (the fitted a + b n)
void WriteTimingCsv(const std::string &path, const std::vector<IterationRecord> &history,
                    const TimingModel &model);

// workers, factorize_ms, solve_ms, total_ms, efficiency, checksum
void WriteScalingCsv(const std::string &path, const std::vector<ScalingRow> &rows);

// h, e0, e1
void WriteTaylorCsv(const std::string &path, const TaylorReport &report);

}  // namespace tdinv

#endif  // TDINV_REPORTING_HPP
