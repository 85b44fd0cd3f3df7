// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/forward.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace tdinv
{

ForwardResult ForwardResponse(const Problem &problem, const Model &model,
                              const RationalApproximant &approx, ShiftedFactorCache &cache,
                              bool retain_fields)
{
  const int nt = approx.ChannelCount();
  const int nr = problem.ReceiverCount();
  ForwardResult out;
  out.g = SolveAllPoles(problem, model, approx, problem.f, cache);

  out.data = Vector::Zero(static_cast<Eigen::Index>(nr) * nt);
  if (retain_fields)
  {
    out.fields = Matrix::Zero(nt, problem.DofCount());
  }
  for (int i = 0; i < approx.PoleCount(); i++)
  {
    const ComplexVector qg = problem.Q.cast<Complex>() * out.g[i];
    for (int j = 0; j < nt; j++)
    {
      const Complex a = approx.residues(i, j);
      out.data.segment(static_cast<Eigen::Index>(j) * nr, nr) += 2.0 * (a * qg).real();
      if (retain_fields)
      {
        out.fields.row(j) += 2.0 * (a * out.g[i]).real().transpose();
      }
    }
  }
  out.counters = cache.Counters();
  return out;
}

Vector Observe(const Problem &problem, const Matrix &fields)
{
  const int nr = problem.ReceiverCount();
  Vector d(fields.rows() * nr);
  for (Eigen::Index j = 0; j < fields.rows(); j++)
  {
    d.segment(j * nr, nr) = problem.Q * fields.row(j).transpose();
  }
  return d;
}

Matrix DenseExpmOracle(const Problem &problem, const Model &model, const std::vector<double> &times,
                       int dense_limit)
{
  const int n = problem.DofCount();
  Require(n <= dense_limit, "problem size " + std::to_string(n) + " exceeds the dense limit " +
                                std::to_string(dense_limit));
  const Matrix K(problem.K);
  const Matrix M(AssembleM(problem, model.m));
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> eig(K, M);
  if (eig.info() != Eigen::Success)
  {
    throw Error(Error::Kind::Numerical, "generalized eigendecomposition failed");
  }
  const Matrix &V = eig.eigenvectors();
  const Vector coeff = V.transpose() * problem.f;
  Matrix u(times.size(), n);
  for (std::size_t j = 0; j < times.size(); j++)
  {
    const Vector decay = (-eig.eigenvalues().array() * times[j]).exp();
    u.row(j) = (V * decay.cwiseProduct(coeff)).transpose();
  }
  return u;
}

double EstimateSpectralRadius(const Problem &problem, const Model &model, int iterations)
{
  const SparseMatrix M = AssembleM(problem, model.m);
  Eigen::SimplicialLLT<SparseMatrix> mass(M);
  if (mass.info() != Eigen::Success)
  {
    throw Error(Error::Kind::Numerical, "mass matrix factorization failed");
  }
  Vector v = Vector::LinSpaced(problem.DofCount(), 1.0, 2.0);
  double lambda = 0.0;
  for (int k = 0; k < iterations; k++)
  {
    const Vector Kv = problem.K * v;
    const double vMv = v.dot(M * v);
    if (!(vMv > 0.0))
    {
      break;
    }
    lambda = v.dot(Kv) / vMv;
    v = mass.solve(Kv);
    const double norm = v.norm();
    if (!(norm > 0.0))
    {
      break;
    }
    v /= norm;
  }
  return lambda;
}

EulerResult ImplicitEulerReference(const Problem &problem, const Model &model,
                                   const std::vector<double> &times, int steps_per_gate)
{
  Require(steps_per_gate >= 1, "steps_per_gate must be positive");
  for (std::size_t j = 0; j < times.size(); j++)
  {
    Require(times[j] > 0.0 && (j == 0 || times[j] > times[j - 1]),
            "output times must be positive and increasing");
  }
  const SparseMatrix M = AssembleM(problem, model.m);
  Eigen::SimplicialLLT<SparseMatrix> mass(M);
  if (mass.info() != Eigen::Success)
  {
    throw Error(Error::Kind::Numerical, "mass matrix factorization failed");
  }
  Vector u = mass.solve(problem.f);

  EulerResult out;
  out.fields.resize(times.size(), problem.DofCount());
  Eigen::SimplicialLDLT<SparseMatrix> step;
  double current_dt = -1.0;
  double t = 0.0;
  for (std::size_t j = 0; j < times.size(); j++)
  {
    const double dt = (times[j] - t) / steps_per_gate;
    if (dt != current_dt)
    {
      step.compute(M + dt * problem.K);
      if (step.info() != Eigen::Success)
      {
        throw Error(Error::Kind::Numerical, "implicit Euler factorization failed");
      }
      current_dt = dt;
      out.counters.factorizations++;
    }
    for (int s = 0; s < steps_per_gate; s++)
    {
      u = step.solve(M * u);
      out.counters.solves++;
      out.counters.steps++;
    }
    t = times[j];
    out.fields.row(j) = u.transpose();
  }
  return out;
}

}  // namespace tdinv
