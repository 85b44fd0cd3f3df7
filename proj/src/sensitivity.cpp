// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/sensitivity.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace tdinv
{

JacobianOperator::JacobianOperator(const Problem &problem, const Model &model,
                                   const RationalApproximant &approx, ShiftedFactorCache &cache)
    : JacobianOperator(problem, model, approx, cache,
                       SolveAllPoles(problem, model, approx, problem.f, cache))
{
}

JacobianOperator::JacobianOperator(const Problem &problem, const Model &model,
                                   const RationalApproximant &approx, ShiftedFactorCache &cache,
                                   std::vector<ComplexVector> g)
    : problem_(problem), m_(model.m), approx_(approx), cache_(cache), g_(std::move(g))
{
  Require(static_cast<int>(g_.size()) == approx.PoleCount(), "one forward vector per pole expected");
  rows_ = problem.ReceiverCount() * approx.ChannelCount();
  cols_ = problem.CellCount();
}

void JacobianOperator::Refresh() const
{
  cache_.Bind(problem_, m_, approx_.poles);
}

Vector JacobianOperator::Apply(const Vector &v) const
{
  Require(v.size() == cols_, "jvp: vector length does not match the model size");
  Refresh();
  const int np = approx_.PoleCount();
  const int nr = problem_.ReceiverCount();
  const ComplexSparseMatrix Q = problem_.Q.cast<Complex>();
  std::vector<ComplexVector> qh(np);
  cache_.ForEachPole(
      [&](int i)
      {
        cache_.Ensure(i);
        const ComplexVector s = DMContractApply(problem_, m_, g_[i], v);
        qh[i] = Q * cache_.Solve(i, s);
      });
  Vector out = Vector::Zero(rows_);
  for (int i = 0; i < np; i++)
  {
    const Complex xi = approx_.poles[i];
    for (int j = 0; j < approx_.ChannelCount(); j++)
    {
      out.segment(static_cast<Eigen::Index>(j) * nr, nr) +=
          2.0 * ((approx_.residues(i, j) * xi) * qh[i]).real();
    }
  }
  return out;
}

Vector JacobianOperator::ApplyAdjoint(const Vector &w) const
{
  Require(w.size() == rows_, "vjp: vector length does not match the data size");
  Refresh();
  const int np = approx_.PoleCount();
  const int nr = problem_.ReceiverCount();
  const int nt = approx_.ChannelCount();
  const Eigen::Map<const Matrix> W(w.data(), nr, nt);
  const ComplexSparseMatrix Qt = ComplexSparseMatrix(problem_.Q.cast<Complex>().transpose());
  std::vector<Vector> part(np);
  cache_.ForEachPole(
      [&](int i)
      {
        cache_.Ensure(i);
        const ComplexVector agg = W.cast<Complex>() * approx_.residues.row(i).transpose();
        const ComplexVector z = cache_.Solve(i, Qt * agg);
        part[i] = 2.0 * (approx_.poles[i] * DMContractApplyTranspose(problem_, m_, g_[i], z)).real();
      });
  Vector out = Vector::Zero(cols_);
  for (int i = 0; i < np; i++)
  {
    out += part[i];
  }
  return out;
}

Vector JacobianOperator::ApplyAdjointPerChannel(const Vector &w) const
{
  Require(w.size() == rows_, "vjp: vector length does not match the data size");
  Refresh();
  const int nr = problem_.ReceiverCount();
  const ComplexSparseMatrix Qt = ComplexSparseMatrix(problem_.Q.cast<Complex>().transpose());
  Vector out = Vector::Zero(cols_);
  for (int i = 0; i < approx_.PoleCount(); i++)
  {
    cache_.Ensure(i);
    for (int j = 0; j < approx_.ChannelCount(); j++)
    {
      const ComplexVector wj = w.segment(static_cast<Eigen::Index>(j) * nr, nr).cast<Complex>();
      const ComplexVector z = cache_.Solve(i, Qt * wj);
      out += 2.0 * (approx_.residues(i, j) * approx_.poles[i] *
                    DMContractApplyTranspose(problem_, m_, g_[i], z))
                       .real();
    }
  }
  return out;
}

namespace
{

double Slope(const std::vector<double> &h, const std::vector<double> &e, double floor, int &used)
{
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  used = 0;
  for (std::size_t k = 0; k < h.size(); k++)
  {
    if (!(e[k] > floor))
    {
      continue;
    }
    const double x = std::log10(h[k]), y = std::log10(e[k]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    used++;
  }
  if (used < 2)
  {
    return 0.0;
  }
  const double n = used;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TaylorReport TaylorTest(const DataMap &forward, const Vector &m, const Vector &direction,
                        const Vector &jdir, const std::vector<double> &h_values)
{
  Require(!h_values.empty(), "taylor test needs step sizes");
  const Vector d0 = forward(m);
  TaylorReport r;
  r.floor = 1.0e-11 * d0.norm();
  for (double h : h_values)
  {
    Require(h > 0.0, "taylor test step sizes must be positive");
    const Vector diff = forward(m + h * direction) - d0;
    r.h.push_back(h);
    r.e0.push_back(diff.norm());
    r.e1.push_back((diff - h * jdir).norm());
  }
  r.slope0 = Slope(r.h, r.e0, r.floor, r.used0);
  r.slope1 = Slope(r.h, r.e1, r.floor, r.used1);
  return r;
}

TaylorReport TaylorTest(const Problem &problem, const Model &model,
                        const RationalApproximant &approx, ShiftedFactorCache &cache,
                        const Vector &direction, const std::vector<double> &h_values)
{
  const ForwardResult base = ForwardResponse(problem, model, approx, cache);
  const JacobianOperator J(problem, model, approx, cache, base.g);
  const Vector jdir = J.Apply(direction);
  auto forward = [&](const Vector &m)
  {
    Model trial = model;
    trial.m = m;
    return ForwardResponse(problem, trial, approx, cache).data;
  };
  return TaylorTest(forward, model.m, direction, jdir, h_values);
}

double AdjointTest(const LinearOperator &op, int trials, std::uint64_t seed)
{
  Require(trials >= 1, "adjoint test needs at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  for (int t = 0; t < trials; t++)
  {
    Vector x(op.Cols()), y(op.Rows());
    for (auto &v : x)
    {
      v = normal(rng);
    }
    for (auto &v : y)
    {
      v = normal(rng);
    }
    const double lhs = op.Apply(x).dot(y);
    const double rhs = x.dot(op.ApplyAdjoint(y));
    const double scale = std::max(std::abs(lhs), std::abs(rhs));
    if (scale > 0.0)
    {
      worst = std::max(worst, std::abs(lhs - rhs) / scale);
    }
  }
  return worst;
}

}  // namespace tdinv
