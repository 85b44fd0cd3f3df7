// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_TYPES_HPP
#define TDINV_TYPES_HPP

#include <complex>
#include <stdexcept>
#include <string>
#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace tdinv
{

using Complex = std::complex<double>;

using Vector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using ComplexSparseMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<double>;
using ComplexTriplet = Eigen::Triplet<Complex>;

// Single error type for contract violations and numerical failures. The message carries
// the context; callers that need to distinguish cases use the Kind.
class Error : public std::runtime_error
{
public:
  enum class Kind
  {
    InvalidArgument,
    Numerical,
    CacheMiss,
    Io
  };

  Error(Kind kind, const std::string &what) : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

private:
  Kind kind_;
};

[[noreturn]] inline void Fail(const std::string &what)
{
  throw Error(Error::Kind::InvalidArgument, what);
}

inline void Require(bool condition, const std::string &what)
{
  if (!condition)
  {
    Fail(what);
  }
}

}  // namespace tdinv

#endif  // TDINV_TYPES_HPP
