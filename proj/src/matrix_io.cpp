// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/matrix_io.hpp"

#include <filesystem>
#include <unsupported/Eigen/SparseExtra>

namespace tdinv
{

void SaveMatrixMarket(const SparseMatrix &A, const std::string &path)
{
  if (!Eigen::saveMarket(A, path))
  {
    throw Error(Error::Kind::Io, "cannot write '" + path + "'");
  }
}

SparseMatrix LoadMatrixMarket(const std::string &path)
{
  SparseMatrix A;
  if (!std::filesystem::exists(path) || !Eigen::loadMarket(A, path))
  {
    throw Error(Error::Kind::Io, "cannot read '" + path + "'");
  }
  A.makeCompressed();
  return A;
}

void SaveMatrixMarketVector(const Vector &v, const std::string &path)
{
  if (!Eigen::saveMarketVector(v, path))
  {
    throw Error(Error::Kind::Io, "cannot write '" + path + "'");
  }
}

Vector LoadMatrixMarketVector(const std::string &path)
{
  Vector v;
  if (!std::filesystem::exists(path) || !Eigen::loadMarketVector(v, path))
  {
    throw Error(Error::Kind::Io, "cannot read '" + path + "'");
  }
  return v;
}

void ExportProblem(const Problem &problem, const Vector &m, const std::string &dir)
{
  std::filesystem::create_directories(dir);
  const std::filesystem::path d(dir);
  SaveMatrixMarket(problem.K, (d / "K.mtx").string());
  SaveMatrixMarket(AssembleM(problem, m), (d / "M.mtx").string());
  SaveMatrixMarket(problem.Q, (d / "Q.mtx").string());
  SaveMatrixMarketVector(problem.f, (d / "f.mtx").string());
}

Problem ImportProblem(const std::string &dir)
{
  const std::filesystem::path d(dir);
  Problem problem;
  problem.K = LoadMatrixMarket((d / "K.mtx").string());
  const SparseMatrix M = LoadMatrixMarket((d / "M.mtx").string());
  problem.Q = LoadMatrixMarket((d / "Q.mtx").string());
  problem.f = LoadMatrixMarketVector((d / "f.mtx").string());
  const auto n = problem.K.rows();
  Require(problem.K.cols() == n && M.rows() == n && M.cols() == n,
          "imported K and M must be square and of equal size");
  Require(problem.Q.cols() == n && problem.f.size() == n,
          "imported Q and f do not match the size of K");
  Require(n <= 2000, "imported problems are limited to N <= 2000");

  std::vector<int> support;
  std::vector<int> local_of(n, -1);
  for (int k = 0; k < M.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
    {
      if (local_of[it.row()] < 0)
      {
        local_of[it.row()] = 0;
      }
    }
  }
  for (int i = 0; i < n; i++)
  {
    if (local_of[i] >= 0)
    {
      local_of[i] = static_cast<int>(support.size());
      support.push_back(i);
    }
  }
  MassSlice slice;
  slice.dofs = support;
  slice.local = Matrix::Zero(support.size(), support.size());
  for (int k = 0; k < M.outerSize(); k++)
  {
    for (SparseMatrix::InnerIterator it(M, k); it; ++it)
    {
      slice.local(local_of[it.row()], local_of[it.col()]) += it.value();
    }
  }
  problem.slices.push_back(std::move(slice));
  return problem;
}

}  // namespace tdinv
