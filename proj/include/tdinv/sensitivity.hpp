// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_SENSITIVITY_HPP
#define TDINV_SENSITIVITY_HPP

#include <cstdint>
#include <functional>
#include <vector>
#include "tdinv/forward.hpp"
#include "tdinv/linear_operator.hpp"

namespace tdinv
{

//
// Jacobian of the stacked data d(m) with respect to the log-conductivity model. With
// A_i = K - ξ_i M(m) and g_i = A_i⁻¹ f,
//
//   J v  = 2 Re Σ_i α_i ⊗ ξ_i Q A_i⁻¹ (∂M g_i) v
//   Jᵀ w = 2 Re Σ_i ξ_i (∂M g_i)ᵀ A_i⁻¹ Qᵀ Σ_j α_ij w_j
//
// Both products cost one solve per pole. The adjoint sums the channels before solving,
// using A_iᵀ = A_i.
//
class JacobianOperator : public LinearOperator
{
public:
  JacobianOperator(const Problem &problem, const Model &model, const RationalApproximant &approx,
                   ShiftedFactorCache &cache);

  // Reuse the g_i of a forward run at the same model.
  JacobianOperator(const Problem &problem, const Model &model, const RationalApproximant &approx,
                   ShiftedFactorCache &cache, std::vector<ComplexVector> g);

  int Rows() const override { return rows_; }
  int Cols() const override { return cols_; }
  Vector Apply(const Vector &v) const override;
  Vector ApplyAdjoint(const Vector &w) const override;

  // Same as ApplyAdjoint but with one solve per (pole, channel); for verification.
  Vector ApplyAdjointPerChannel(const Vector &w) const;

  const std::vector<ComplexVector> &G() const { return g_; }
  const Vector &ModelVector() const { return m_; }

private:
  void Refresh() const;

  const Problem &problem_;
  Vector m_;
  const RationalApproximant &approx_;
  ShiftedFactorCache &cache_;
  std::vector<ComplexVector> g_;
  int rows_ = 0, cols_ = 0;
};

struct TaylorReport
{
  std::vector<double> h;
  std::vector<double> e0;  // ‖d(m + hδ) - d(m)‖
  std::vector<double> e1;  // ‖d(m + hδ) - d(m) - h J δ‖
  double slope0 = 0.0;
  double slope1 = 0.0;
  int used0 = 0;           // points above the round-off floor entering each regression
  int used1 = 0;
  double floor = 0.0;      // round-off floor on the remainders
};

using DataMap = std::function<Vector(const Vector &)>;

// Generic remainder test of `forward` around m along `direction`, with jdir = J direction.
// Slopes are least-squares fits of log e against log h over the points above the floor
// 10⁻¹¹·‖d(m)‖.
TaylorReport TaylorTest(const DataMap &forward, const Vector &m, const Vector &direction,
                        const Vector &jdir, const std::vector<double> &h_values);

TaylorReport TaylorTest(const Problem &problem, const Model &model,
                        const RationalApproximant &approx, ShiftedFactorCache &cache,
                        const Vector &direction, const std::vector<double> &h_values);

// Largest |⟨A x, y⟩ - ⟨x, Aᵀ y⟩| / max(|⟨A x, y⟩|, |⟨x, Aᵀ y⟩|) over seeded Gaussian trials.
double AdjointTest(const LinearOperator &op, int trials, std::uint64_t seed);

}  // namespace tdinv

#endif  // TDINV_SENSITIVITY_HPP
