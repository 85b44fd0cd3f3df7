// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_PROBLEM_HPP
#define TDINV_PROBLEM_HPP

#include <array>
#include <optional>
#include <vector>
#include "tdinv/types.hpp"

namespace tdinv
{

using Point = std::array<double, 2>;  // y ignored in 1-D

struct Cell
{
  std::vector<int> vertices;  // node indices
  double measure = 0.0;       // length (1-D) or area (2-D)
  Point centroid{};
};

// Interior interface between two cells.
struct Face
{
  int cell_a = -1, cell_b = -1;
  double measure = 0.0;  // 1 in 1-D, edge length in 2-D
};

// Structured 1-D interval or triangulated 2-D rectangle. Each square (i, j) of the 2-D
// layout is split into triangles 2k: (00, 10, 11) and 2k+1: (00, 11, 01), k = j nx + i.
struct Grid
{
  int dimension = 1;
  Point lo{}, hi{};
  int nx = 0, ny = 1;
  std::vector<Point> nodes;
  std::vector<Cell> cells;
  std::vector<Face> faces;
  std::vector<int> dof_of_node;  // -1 for eliminated (Dirichlet) nodes
  int dof_count = 0;

  int CellCount() const { return static_cast<int>(cells.size()); }
  double DomainMeasure() const;
};

// Unit-conductivity element mass matrix of one cell, restricted to retained DOFs. This is
// the cell's slice of the third-order tensor ∂M/∂σ.
struct MassSlice
{
  std::vector<int> dofs;
  Matrix local;
};

struct Problem
{
  SparseMatrix K;                 // N × N stiffness, model independent
  std::vector<MassSlice> slices;  // one per model cell
  Vector f;                       // initial source, M u(0) = f
  SparseMatrix Q;                 // receivers × N observation
  std::optional<Grid> grid;       // absent for imported matrices
  std::vector<Point> receivers;

  int DofCount() const { return static_cast<int>(K.rows()); }
  int CellCount() const { return static_cast<int>(slices.size()); }
  int ReceiverCount() const { return static_cast<int>(Q.rows()); }
};

// Piecewise-constant log-conductivity, one entry per cell.
struct Model
{
  Vector m;
  Vector m_ref;

  static Model Uniform(int cells, double sigma);
  int size() const { return static_cast<int>(m.size()); }
};

// M(m) = Σ_c exp(m_c) M_c.
SparseMatrix AssembleM(const Problem &problem, const Vector &m);

// Mode-2 contraction of ∂M/∂m with g: column c is exp(m_c) M_c g scattered to global rows.
ComplexSparseMatrix DMContract(const Problem &problem, const Vector &m, const ComplexVector &g);

// (∂M/∂m · g) v without forming the N × P matrix.
ComplexVector DMContractApply(const Problem &problem, const Vector &m, const ComplexVector &g,
                              const Vector &v);

// (∂M/∂m · g)ᵀ z, the transpose product without conjugation.
ComplexVector DMContractApplyTranspose(const Problem &problem, const Vector &m,
                                       const ComplexVector &g, const ComplexVector &z);

}  // namespace tdinv

#endif  // TDINV_PROBLEM_HPP
