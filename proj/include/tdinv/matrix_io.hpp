// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_MATRIX_IO_HPP
#define TDINV_MATRIX_IO_HPP

#include <string>
#include "tdinv/problem.hpp"

namespace tdinv
{

// Matrix Market exchange of the assembled operators. ExportProblem writes K.mtx, M.mtx
// (at the given model), Q.mtx and f.mtx into `dir`.
void ExportProblem(const Problem &problem, const Vector &m, const std::string &dir);

// Reads K.mtx, M.mtx, Q.mtx and f.mtx. Without per-cell mass slices the whole of M becomes
// a single model parameter (P = 1, m = 0 reproduces M); the slice is stored densely on the
// support of M, so N is limited to 2000.
Problem ImportProblem(const std::string &dir);

void SaveMatrixMarket(const SparseMatrix &A, const std::string &path);
SparseMatrix LoadMatrixMarket(const std::string &path);
void SaveMatrixMarketVector(const Vector &v, const std::string &path);
Vector LoadMatrixMarketVector(const std::string &path);

}  // namespace tdinv

#endif  // TDINV_MATRIX_IO_HPP
