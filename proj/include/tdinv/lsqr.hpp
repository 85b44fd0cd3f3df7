// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_LSQR_HPP
#define TDINV_LSQR_HPP

#include "tdinv/linear_operator.hpp"

namespace tdinv
{

struct LsqrOptions
{
  double atol = 1.0e-3;  // relative tolerance on ‖Aᵀr‖ / (‖A‖ ‖r‖)
  double btol = 1.0e-3;  // relative tolerance on ‖r‖ / ‖b‖
  double conlim = 1.0e8;
  int max_iters = 50;
};

struct LsqrResult
{
  Vector x;
  int iterations = 0;
  int istop = 0;  // 0 x = 0 exact, 1 compatible, 2 least squares, 3 conlim, 7 max_iters
  double rnorm = 0.0;
  double arnorm = 0.0;
  bool breakdown = false;
  Vector atb;  // Aᵀb from the first bidiagonalization step
};

// Paige-Saunders LSQR for min ‖A x - b‖.
LsqrResult Lsqr(const LinearOperator &A, const Vector &b, const LsqrOptions &options = {});

}  // namespace tdinv

#endif  // TDINV_LSQR_HPP
