// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_LINEAR_OPERATOR_HPP
#define TDINV_LINEAR_OPERATOR_HPP

#include "tdinv/types.hpp"

namespace tdinv
{

// Real linear map given only by its action and the action of its transpose.
class LinearOperator
{
public:
  virtual ~LinearOperator() = default;
  virtual int Rows() const = 0;
  virtual int Cols() const = 0;
  virtual Vector Apply(const Vector &x) const = 0;
  virtual Vector ApplyAdjoint(const Vector &y) const = 0;
};

}  // namespace tdinv

#endif  // TDINV_LINEAR_OPERATOR_HPP
