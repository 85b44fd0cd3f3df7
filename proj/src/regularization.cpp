// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/regularization.hpp"

#include <Eigen/SparseCholesky>

namespace tdinv
{

RegOperator BuildReg(const Grid &grid)
{
  const int p = grid.CellCount();
  const int nf = static_cast<int>(grid.faces.size());
  Require(nf >= 1, "regularization needs at least one interior face");

  RegOperator reg;
  reg.cell_measure.resize(p);
  for (int c = 0; c < p; c++)
  {
    reg.cell_measure(c) = grid.cells[c].measure;
  }

  std::vector<Triplet> t;
  std::vector<int> degree(p, 0);
  reg.mdiv.resize(nf);
  for (int f = 0; f < nf; f++)
  {
    const Face &face = grid.faces[f];
    Require(face.cell_a != face.cell_b && face.cell_a >= 0 && face.cell_b >= 0,
            "interior face must join two distinct cells");
    t.emplace_back(face.cell_a, f, face.measure);
    t.emplace_back(face.cell_b, f, -face.measure);
    const double thickness =
        0.5 * (reg.cell_measure(face.cell_a) + reg.cell_measure(face.cell_b)) / face.measure;
    reg.mdiv(f) = face.measure * thickness;
    degree[face.cell_a]++;
    degree[face.cell_b]++;
  }
  reg.D.resize(p, nf);
  reg.D.setFromTriplets(t.begin(), t.end());
  reg.L0 = reg.D * reg.mdiv.cwiseInverse().asDiagonal() * reg.D.transpose();
  reg.L0.makeCompressed();
  for (int c = 0; c < p; c++)
  {
    reg.isolated_cells += degree[c] == 0 ? 1 : 0;
  }

  double trace = 0.0;
  for (int c = 0; c < p; c++)
  {
    trace += reg.L0.coeff(c, c);
  }
  reg.anchor = 1.0e-8 * trace / p;
  const Vector weight = reg.cell_measure / reg.cell_measure.mean();
  SparseMatrix anchor(p, p);
  anchor.setIdentity();
  reg.L = reg.L0 + reg.anchor * SparseMatrix(weight.asDiagonal() * anchor);
  reg.L.makeCompressed();

  Eigen::SimplicialLLT<SparseMatrix> llt(reg.L);
  if (llt.info() != Eigen::Success)
  {
    throw Error(Error::Kind::Numerical, "Cholesky factorization of the regularization failed");
  }
  // P L Pᵀ = U ᵀU, so R = U P.
  const SparseMatrix U = llt.matrixU();
  reg.R = U * llt.permutationP();
  reg.R.makeCompressed();
  return reg;
}

std::pair<double, Vector> RegValueGrad(const RegOperator &reg, const Model &model)
{
  Require(model.m.size() == reg.size() && model.m_ref.size() == reg.size(),
          "model size does not match the regularization");
  const Vector dm = model.m - model.m_ref;
  Vector grad = reg.L * dm;
  return {0.5 * dm.dot(grad), std::move(grad)};
}

Vector ApplySqrt(const RegOperator &reg, const Vector &x)
{
  Require(reg.R.rows() == x.size(), "regularization factor not available for this size");
  return reg.R * x;
}

Vector ApplySqrtT(const RegOperator &reg, const Vector &y)
{
  Require(reg.R.rows() == y.size(), "regularization factor not available for this size");
  return reg.R.transpose() * y;
}

}  // namespace tdinv
