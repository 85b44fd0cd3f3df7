// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>
#include "fixtures.hpp"
#include "tdinv/regularization.hpp"

using namespace tdinv;

namespace
{

Vector Random(int n, std::uint64_t seed)
{
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Vector v(n);
  for (auto &x : v)
  {
    x = normal(rng);
  }
  return v;
}

Grid PlanGrid()
{
  return BuildGrid(tdinv::testing::SmallPlanSpec());
}

}  // namespace

TEST(BuildReg, ThreeCellLineByHand)
{
  const Grid grid = BuildGrid(tdinv::testing::LineSpec(3, 30.0, 0.1));
  const RegOperator reg = BuildReg(grid);
  Matrix expected(3, 3);
  expected << 1, -1, 0, -1, 2, -1, 0, -1, 1;
  expected /= 10.0;
  EXPECT_LT((Matrix(reg.L0) - expected).cwiseAbs().maxCoeff(), 1e-16);
  EXPECT_DOUBLE_EQ(reg.anchor, 1e-8 * 0.4 / 3.0);
  const Matrix anchored = expected + reg.anchor * Matrix::Identity(3, 3);
  EXPECT_LT((Matrix(reg.L) - anchored).cwiseAbs().maxCoeff(), 1e-18);
  EXPECT_EQ(reg.isolated_cells, 0);
}

TEST(BuildReg, UnitSpacingMatchesGraphLaplacian)
{
  const Grid grid = BuildGrid(tdinv::testing::LineSpec(8, 8.0, 0.1));
  const RegOperator reg = BuildReg(grid);
  for (int c = 0; c < 8; c++)
  {
    const double degree = (c == 0 || c == 7) ? 1.0 : 2.0;
    EXPECT_DOUBLE_EQ(reg.L0.coeff(c, c), degree);
    if (c + 1 < 8)
    {
      EXPECT_DOUBLE_EQ(reg.L0.coeff(c, c + 1), -1.0);
    }
  }
}

TEST(BuildReg, ConstantsAreInTheUnanchoredNullSpace)
{
  const RegOperator reg = BuildReg(PlanGrid());
  const Vector ones = Vector::Ones(reg.size());
  EXPECT_LT((reg.L0 * ones).cwiseAbs().maxCoeff(), 1e-12 * Matrix(reg.L0).cwiseAbs().maxCoeff());
  Model model = Model::Uniform(reg.size(), 0.1);
  model.m_ref = model.m;
  model.m.array() += 2.0;
  const double value = RegValueGrad(reg, model).first;
  // Only the anchor sees a constant shift: ½ ε Σ w_c · 4.
  EXPECT_NEAR(value, 0.5 * reg.anchor * 4.0 * reg.size(), 1e-6 * value);
}

TEST(BuildReg, PlanPatternMatchesFaceAdjacency)
{
  const Grid grid = PlanGrid();
  const RegOperator reg = BuildReg(grid);
  Matrix adjacency = Matrix::Zero(reg.size(), reg.size());
  for (std::size_t f = 0; f < grid.faces.size(); f++)
  {
    const auto &face = grid.faces[f];
    adjacency(face.cell_a, face.cell_b) += -face.measure * face.measure / reg.mdiv(f);
    adjacency(face.cell_b, face.cell_a) += -face.measure * face.measure / reg.mdiv(f);
  }
  const Matrix L0(reg.L0);
  for (int i = 0; i < reg.size(); i++)
  {
    for (int j = 0; j < reg.size(); j++)
    {
      if (i != j)
      {
        EXPECT_NEAR(L0(i, j), adjacency(i, j), 1e-14);
        EXPECT_LE(L0(i, j), 0.0);
      }
    }
    EXPECT_NEAR(L0.row(i).sum(), 0.0, 1e-13);
  }
  // Lumped face weight equals the mean of the two adjacent cell measures.
  for (std::size_t f = 0; f < grid.faces.size(); f++)
  {
    const auto &face = grid.faces[f];
    EXPECT_NEAR(reg.mdiv(f), 0.5 * (grid.cells[face.cell_a].measure + grid.cells[face.cell_b].measure), 1e-10);
  }
}

TEST(BuildReg, FactorReproducesOperator)
{
  for (const Grid &grid : {PlanGrid(), BuildGrid(tdinv::testing::LineSpec(40, 200.0, 0.1))})
  {
    const RegOperator reg = BuildReg(grid);
    const Matrix RtR = Matrix(reg.R).transpose() * Matrix(reg.R);
    const Matrix L(reg.L);
    EXPECT_LT((RtR - L).cwiseAbs().maxCoeff(), 1e-12 * L.cwiseAbs().maxCoeff());
    const Vector x = Random(reg.size(), 4);
    EXPECT_NEAR(ApplySqrt(reg, x).squaredNorm(), x.dot(reg.L * x), 1e-12 * x.dot(reg.L * x));
    EXPECT_LT((ApplySqrtT(reg, ApplySqrt(reg, x)) - reg.L * x).norm(), 1e-12 * (reg.L * x).norm());
    const Vector y = Random(reg.size(), 5);
    EXPECT_NEAR(ApplySqrt(reg, x).dot(y), x.dot(ApplySqrtT(reg, y)), 1e-12 * x.norm() * y.norm() * L.norm());
  }
}

TEST(BuildReg, AnchoredOperatorIsPositiveDefinite)
{
  const RegOperator reg = BuildReg(PlanGrid());
  Eigen::SelfAdjointEigenSolver<Matrix> eig{Matrix(reg.L)};
  EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  EXPECT_NEAR(eig.eigenvalues().minCoeff(), reg.anchor, 1e-3 * reg.anchor);
  Eigen::SelfAdjointEigenSolver<Matrix> eig0{Matrix(reg.L0)};
  EXPECT_LT(std::abs(eig0.eigenvalues().minCoeff()), 1e-12 * eig0.eigenvalues().maxCoeff());
}

TEST(RegValueGrad, GradientMatchesFiniteDifferences)
{
  const RegOperator reg = BuildReg(PlanGrid());
  Model model{Random(reg.size(), 1), Random(reg.size(), 2)};
  const auto [value, grad] = RegValueGrad(reg, model);
  EXPECT_GT(value, 0.0);
  // Central differences are exact for a quadratic up to round-off.
  const double h = 1e-3;
  for (int c : {0, 5, 99, reg.size() - 1})
  {
    Model plus = model, minus = model;
    plus.m(c) += h;
    minus.m(c) -= h;
    const double fd = (RegValueGrad(reg, plus).first - RegValueGrad(reg, minus).first) / (2 * h);
    EXPECT_NEAR(fd, grad(c), 1e-7 * (1.0 + std::abs(grad(c))));
  }
}

TEST(RegValueGrad, QuadraticInTheOffset)
{
  const RegOperator reg = BuildReg(PlanGrid());
  const Vector ref = Random(reg.size(), 3), v = Random(reg.size(), 4);
  const double base = RegValueGrad(reg, Model{ref + v, ref}).first;
  const double scaled = RegValueGrad(reg, Model{ref + 3.0 * v, ref}).first;
  EXPECT_NEAR(scaled, 9.0 * base, 1e-12 * scaled);
  const auto at_ref = RegValueGrad(reg, Model{ref, ref});
  EXPECT_EQ(at_ref.first, 0.0);
  EXPECT_EQ(at_ref.second.norm(), 0.0);
}

TEST(RegValueGrad, RejectsSizeMismatch)
{
  const RegOperator reg = BuildReg(PlanGrid());
  EXPECT_THROW(RegValueGrad(reg, Model::Uniform(3, 0.1)), Error);
  EXPECT_THROW(ApplySqrt(reg, Vector::Zero(3)), Error);
}

TEST(BuildReg, SingleCellHasNoFaces)
{
  const Grid grid = BuildGrid(tdinv::testing::LineSpec(1, 10.0, 0.1, Boundary::Neumann));
  EXPECT_THROW(BuildReg(grid), Error);
}
