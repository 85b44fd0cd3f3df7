// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/reporting.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>

namespace tdinv
{

namespace
{

std::ofstream OpenCsv(const std::string &path)
{
  std::ofstream out(path);
  if (!out)
  {
    throw Error(Error::Kind::Io, "cannot write '" + path + "'");
  }
  out << std::setprecision(17);
  return out;
}

double Since(std::chrono::steady_clock::time_point t0)
{
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

TimingModel FitTimingModel(const std::vector<double> &n, const std::vector<double> &t)
{
  Require(n.size() == t.size(), "timing samples differ in length");
  TimingModel model;
  model.samples = static_cast<int>(n.size());
  if (model.samples < 3)
  {
    model.note = "insufficient: fewer than 3 iterations";
    return model;
  }
  if (std::set<double>(n.begin(), n.end()).size() < 2)
  {
    model.note = "slope undefined: all LSQR counts equal";
    return model;
  }
  double mn = 0, mt = 0;
  for (std::size_t k = 0; k < n.size(); k++)
  {
    mn += n[k];
    mt += t[k];
  }
  mn /= n.size();
  mt /= n.size();
  double snn = 0, snt = 0, stt = 0;
  for (std::size_t k = 0; k < n.size(); k++)
  {
    snn += (n[k] - mn) * (n[k] - mn);
    snt += (n[k] - mn) * (t[k] - mt);
    stt += (t[k] - mt) * (t[k] - mt);
  }
  model.b = snt / snn;
  model.a = mt - model.b * mn;
  double sse = 0;
  for (std::size_t k = 0; k < n.size(); k++)
  {
    const double e = t[k] - model.a - model.b * n[k];
    sse += e * e;
  }
  model.r2 = stt > 0.0 ? 1.0 - sse / stt : 1.0;
  model.valid = true;
  if (model.samples < 3 || std::set<double>(n.begin(), n.end()).size() < 3)
  {
    model.note = "fewer than 3 distinct LSQR counts";
  }
  return model;
}

TimingModel FitTimingModel(const std::vector<IterationRecord> &history)
{
  std::vector<double> n, t;
  for (const auto &r : history)
  {
    if (r.iteration >= 1)
    {
      n.push_back(r.lsqr_iters);
      t.push_back(r.wall_ms);
    }
  }
  return FitTimingModel(n, t);
}

std::string ChecksumPoleSolutions(const std::vector<ComplexVector> &g)
{
  std::vector<Complex> all;
  for (const auto &v : g)
  {
    all.insert(all.end(), v.data(), v.data() + v.size());
  }
  return HashBytes(all.data(), all.size() * sizeof(Complex));
}

std::vector<ScalingRow> ScalingBenchmark(const Problem &problem, const Model &model,
                                         const RationalApproximant &approx,
                                         const std::vector<int> &worker_counts, int repeats,
                                         FactorBackend backend)
{
  Require(repeats >= 1, "repeats must be positive");
  std::vector<ScalingRow> rows;
  const ComplexVector f = problem.f.cast<Complex>();
  for (int w : worker_counts)
  {
    ScalingRow row;
    row.workers = w;
    row.factorize_ms = row.solve_ms = std::numeric_limits<double>::infinity();
    for (int r = 0; r < repeats; r++)
    {
      SolverOptions opts;
      opts.workers = w;
      opts.backend = backend;
      ShiftedFactorCache cache(opts);
      cache.Bind(problem, model.m, approx.poles);
      auto t0 = std::chrono::steady_clock::now();
      cache.FactorizeAll();
      row.factorize_ms = std::min(row.factorize_ms, Since(t0));
      std::vector<ComplexVector> g(approx.PoleCount());
      t0 = std::chrono::steady_clock::now();
      cache.ForEachPole([&](int i) { g[i] = cache.Solve(i, f); });
      row.solve_ms = std::min(row.solve_ms, Since(t0));
      row.checksum = ChecksumPoleSolutions(g);
    }
    row.total_ms = row.factorize_ms + row.solve_ms;
    rows.push_back(row);
  }
  double t1 = 0.0;
  for (const auto &row : rows)
  {
    if (row.workers == 1)
    {
      t1 = row.total_ms;
    }
  }
  for (auto &row : rows)
  {
    row.efficiency = t1 > 0.0 ? t1 / (row.workers * row.total_ms) : 0.0;
  }
  return rows;
}

Json ToJson(const TimingModel &m)
{
  return {{"a_ms", m.a}, {"b_ms_per_lsqr_iter", m.b}, {"r2", m.r2},
          {"samples", m.samples}, {"valid", m.valid}, {"note", m.note}};
}

Json ToJson(const std::vector<ScalingRow> &rows)
{
  Json j = Json::array();
  for (const auto &r : rows)
  {
    j.push_back({{"workers", r.workers},
                 {"factorize_ms", r.factorize_ms},
                 {"solve_ms", r.solve_ms},
                 {"total_ms", r.total_ms},
                 {"efficiency", r.efficiency},
                 {"checksum", r.checksum}});
  }
  return j;
}

Json RunReport(const InversionState &state, const SolveCounters &counters)
{
  Json iterations = Json::array();
  for (const auto &r : state.history)
  {
    iterations.push_back(ToJson(r));
  }
  return {{"status", state.status},
          {"message", state.message},
          {"iterations", iterations},
          {"final", {{"phi", state.phi}, {"chi2", state.chi2}, {"lambda", state.lambda},
                     {"gn_iterations", state.iteration}}},
          {"timing_model", ToJson(FitTimingModel(state.history))},
          {"counters", ToJson(counters)}};
}

void WriteConvergenceCsv(const std::string &path, const std::vector<IterationRecord> &history)
{
  auto out = OpenCsv(path);
  out << "iteration,phi,misfit,reg,chi2,lambda,eta,accepted,lsqr_iters,line_search_trials,"
         "wall_ms,factorizations,solves\n";
  for (const auto &r : history)
  {
    out << r.iteration << ',' << r.phi << ',' << r.misfit << ',' << r.reg << ',' << r.chi2 << ','
        << r.lambda << ',' << r.eta << ',' << (r.accepted ? 1 : 0) << ',' << r.lsqr_iters << ','
        << r.line_search_trials << ',' << r.wall_ms << ',' << r.factorizations << ',' << r.solves
        << '\n';
  }
}

void WriteResidualHeatmapCsv(const std::string &path, const DataSet &data, const Vector &d_pred)
{
  const int nr = static_cast<int>(data.receivers.size());
  const int nt = static_cast<int>(data.times.size());
  Require(nr * nt == data.size() && d_pred.size() == data.size(),
          "data layout does not match receivers × channels");
  auto out = OpenCsv(path);
  out << "time";
  for (int r = 0; r < nr; r++)
  {
    out << ",r" << r;
  }
  out << '\n';
  for (int j = 0; j < nt; j++)
  {
    out << data.times[j];
    for (int r = 0; r < nr; r++)
    {
      const int k = j * nr + r;
      out << ',' << (d_pred(k) - data.d_obs(k)) / data.sigma_d(k);
    }
    out << '\n';
  }
}

void WriteTransientsCsv(const std::string &path, const DataSet &data, const Vector &d_pred)
{
  const int nr = static_cast<int>(data.receivers.size());
  const int nt = static_cast<int>(data.times.size());
  Require(nr * nt == data.size() && d_pred.size() == data.size(),
          "data layout does not match receivers × channels");
  auto out = OpenCsv(path);
  out << "receiver,x,y,time,observed,predicted,sigma\n";
  for (int r = 0; r < nr; r++)
  {
    for (int j = 0; j < nt; j++)
    {
      const int k = j * nr + r;
      out << r << ',' << data.receivers[r][0] << ',' << data.receivers[r][1] << ','
          << data.times[j] << ',' << data.d_obs(k) << ',' << d_pred(k) << ',' << data.sigma_d(k)
          << '\n';
    }
  }
}

void WriteTimingCsv(const std::string &path, const std::vector<IterationRecord> &history,
                    const TimingModel &model)
{
  auto out = OpenCsv(path);
  out << "iteration,lsqr_iters,wall_ms,model_ms\n";
  for (const auto &r : history)
  {
    if (r.iteration < 1)
    {
      continue;
    }
    out << r.iteration << ',' << r.lsqr_iters << ',' << r.wall_ms << ','
        << (model.valid ? model.a + model.b * r.lsqr_iters : 0.0) << '\n';
  }
}

void WriteScalingCsv(const std::string &path, const std::vector<ScalingRow> &rows)
{
  auto out = OpenCsv(path);
  out << "workers,factorize_ms,solve_ms,total_ms,efficiency,checksum\n";
  for (const auto &r : rows)
  {
    out << r.workers << ',' << r.factorize_ms << ',' << r.solve_ms << ',' << r.total_ms << ','
        << r.efficiency << ',' << r.checksum << '\n';
  }
}

void WriteTaylorCsv(const std::string &path, const TaylorReport &report)
{
  auto out = OpenCsv(path);
  out << "h,e0,e1\n";
  for (std::size_t k = 0; k < report.h.size(); k++)
  {
    out << report.h[k] << ',' << report.e0[k] << ',' << report.e1[k] << '\n';
  }
}

}  // namespace tdinv
