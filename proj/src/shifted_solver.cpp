// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/shifted_solver.hpp"

#include <Eigen/SparseLU>

namespace tdinv
{

struct ShiftedFactorCache::Slot
{
  long version = -1;
  Eigen::SparseLU<ComplexSparseMatrix, Eigen::COLAMDOrdering<int>> sparse;
  Eigen::PartialPivLU<ComplexMatrix> dense;
  ComplexSparseMatrix A;  // kept for residual checks
};

ShiftedFactorCache::ShiftedFactorCache(SolverOptions options)
    : options_(options), pool_(options.workers)
{
}

ShiftedFactorCache::~ShiftedFactorCache() = default;

const Problem &ShiftedFactorCache::BoundProblem() const
{
  if (problem_ == nullptr)
  {
    throw Error(Error::Kind::CacheMiss, "shifted solver cache is not bound to a problem");
  }
  return *problem_;
}

long ShiftedFactorCache::Bind(const Problem &problem, const Vector &m,
                              const std::vector<Complex> &poles)
{
  const bool same = problem_ == &problem && m_.size() == m.size() && poles_ == poles &&
                    (m_.array() == m.array()).all();
  if (same && version_ > 0)
  {
    return version_;
  }
  Require(m.size() == problem.CellCount(), "model size does not match the problem");
  for (const auto &xi : poles)
  {
    if (!(xi.imag() > 0.0))
    {
      throw Error(Error::Kind::Numerical, "inadmissible pole on or below the real axis");
    }
  }
  problem_ = &problem;
  m_ = m;
  M_ = AssembleM(problem, m);
  poles_ = poles;
  version_++;
  slots_.resize(poles_.size());
  for (auto &s : slots_)
  {
    if (!s)
    {
      s = std::make_unique<Slot>();
    }
  }
  return version_;
}

void ShiftedFactorCache::Factorize(int i)
{
  Slot &s = *slots_[i];
  const Problem &problem = BoundProblem();
  const ComplexSparseMatrix A =
      problem.K.cast<Complex>() - poles_[i] * M_.cast<Complex>();
  if (options_.backend == FactorBackend::DenseLU)
  {
    Require(A.rows() <= options_.dense_limit, "problem too large for the dense LU backend");
    s.dense.compute(ComplexMatrix(A));
    if (!(s.dense.rcond() > 1.0e-14))
    {
      throw Error(Error::Kind::Numerical, "singular shifted matrix for pole " + std::to_string(i));
    }
  }
  else
  {
    s.sparse.compute(A);
    if (s.sparse.info() != Eigen::Success)
    {
      throw Error(Error::Kind::Numerical,
                  "factorization of shifted matrix failed for pole " + std::to_string(i) + ": " +
                      s.sparse.lastErrorMessage());
    }
  }
  if (options_.check_residual)
  {
    s.A = A;
  }
  s.version = version_;
  factorizations_++;
}

void ShiftedFactorCache::FactorizeAll()
{
  BoundProblem();
  pool_.Run(PoleCount(), [this](int i) { Ensure(i); });
}

void ShiftedFactorCache::Ensure(int pole)
{
  Require(pole >= 0 && pole < PoleCount(), "pole index out of range");
  if (slots_[pole]->version != version_)
  {
    Factorize(pole);
  }
}

bool ShiftedFactorCache::Has(int pole) const
{
  return pole >= 0 && pole < PoleCount() && slots_[pole]->version == version_;
}

ComplexVector ShiftedFactorCache::Solve(int pole, const ComplexVector &rhs) const
{
  if (!Has(pole))
  {
    throw Error(Error::Kind::CacheMiss, "no factorization cached for pole " +
                                            std::to_string(pole) + " at model version " +
                                            std::to_string(version_));
  }
  Require(rhs.size() == M_.rows(), "right-hand side length does not match the problem");
  const Slot &s = *slots_[pole];
  ComplexVector x = options_.backend == FactorBackend::DenseLU ? ComplexVector(s.dense.solve(rhs))
                                                                : ComplexVector(s.sparse.solve(rhs));
  solves_++;
  if (options_.check_residual)
  {
    const double scale = rhs.norm();
    const double res = (s.A * x - rhs).norm();
    if (scale > 0.0 && !(res <= options_.residual_tol * scale))
    {
      throw Error(Error::Kind::Numerical, "shifted solve residual " + std::to_string(res / scale) +
                                              " exceeds tolerance for pole " + std::to_string(pole));
    }
  }
  return x;
}

void ShiftedFactorCache::ForEachPole(const std::function<void(int)> &body)
{
  pool_.Run(PoleCount(), body);
}

SolveCounters ShiftedFactorCache::Counters() const
{
  return {factorizations_.load(), solves_.load(), version_};
}

std::vector<ComplexVector> SolveAllPoles(const Problem &problem, const Model &model,
                                         const RationalApproximant &approx, const Vector &rhs,
                                         ShiftedFactorCache &cache)
{
  Require(rhs.size() == problem.DofCount(), "right-hand side length does not match the problem");
  cache.Bind(problem, model.m, approx.poles);
  std::vector<ComplexVector> g(approx.PoleCount());
  const ComplexVector b = rhs.cast<Complex>();
  cache.ForEachPole(
      [&](int i)
      {
        cache.Ensure(i);
        g[i] = cache.Solve(i, b);
      });
  return g;
}

ComplexVector ResolveWithCache(const ShiftedFactorCache &cache, int pole, const ComplexVector &rhs)
{
  return cache.Solve(pole, rhs);
}

}  // namespace tdinv
