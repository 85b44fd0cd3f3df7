// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_REGULARIZATION_HPP
#define TDINV_REGULARIZATION_HPP

#include <utility>
#include "tdinv/problem.hpp"

namespace tdinv
{

//
// Smoothness operator on the cell/face graph,
//
//   L = D diag(1/M_div) Dᵀ + ε diag(|c| / mean |c|),
//
// with D the signed cell-face incidence scaled by face measure and the lumped face weight
// M_div,f = face measure × mean thickness of the two adjacent cells (thickness = cell
// measure / face measure). The second term anchors the constant null space so that the
// factor R with RᵀR = L exists; ε = 10⁻⁸ trace(L₀)/P.
//
struct RegOperator
{
  SparseMatrix D;         // P × F
  Vector mdiv;            // F lumped face weights
  SparseMatrix L0;        // unanchored D M_div⁻¹ Dᵀ
  SparseMatrix L;         // anchored, SPD
  SparseMatrix R;         // RᵀR = L (permuted upper triangular)
  Vector cell_measure;
  double anchor = 0.0;    // ε
  int isolated_cells = 0; // cells without faces, held only by the anchor

  int size() const { return static_cast<int>(L.rows()); }
};

RegOperator BuildReg(const Grid &grid);

// R(m) = ½ (m - m_ref)ᵀ L (m - m_ref) and its gradient L (m - m_ref).
std::pair<double, Vector> RegValueGrad(const RegOperator &reg, const Model &model);

Vector ApplySqrt(const RegOperator &reg, const Vector &x);   // R x
Vector ApplySqrtT(const RegOperator &reg, const Vector &y);  // Rᵀ y

}  // namespace tdinv

#endif  // TDINV_REGULARIZATION_HPP
