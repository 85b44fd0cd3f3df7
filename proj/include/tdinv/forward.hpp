// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_FORWARD_HPP
#define TDINV_FORWARD_HPP

#include <vector>
#include "tdinv/problem.hpp"
#include "tdinv/rba.hpp"
#include "tdinv/shifted_solver.hpp"

namespace tdinv
{

struct ForwardResult
{
  Matrix fields;                  // K_t × N, empty unless retained
  Vector data;                    // M_r K_t, channel-major: [Q u(t_1); Q u(t_2); ...]
  std::vector<ComplexVector> g;   // (K - ξ_i M)⁻¹ f per pole, reused by the Jacobian
  SolveCounters counters;
};

// u(t_j) = 2 Re Σ_i α_ij g_i, summed in ascending pole order.
ForwardResult ForwardResponse(const Problem &problem, const Model &model,
                              const RationalApproximant &approx, ShiftedFactorCache &cache,
                              bool retain_fields = false);

// Stacks Q u(t_j) for the rows of `fields`.
Vector Observe(const Problem &problem, const Matrix &fields);

// u(t_j) = Σ_k exp(-λ_k t_j) (v_kᵀ f) v_k from the generalized eigenpairs K v = λ M v with
// M-orthonormal v_k. Rows are channels.
Matrix DenseExpmOracle(const Problem &problem, const Model &model, const std::vector<double> &times,
                       int dense_limit = 2000);

// Largest eigenvalue of M⁻¹K by power iteration (Rayleigh quotient), used to size the
// spectral interval of the approximant.
double EstimateSpectralRadius(const Problem &problem, const Model &model, int iterations = 200);

struct EulerCounters
{
  int factorizations = 0;  // one per distinct step length
  int solves = 0;
  int steps = 0;
};

struct EulerResult
{
  Matrix fields;  // K_t × N
  EulerCounters counters;
};

// Implicit Euler (M + Δt K) u⁺ = M u from u(0) = M⁻¹f. Each output gate (t_{j-1}, t_j]
// (t_0 = 0) is covered by steps_per_gate equal steps, so each gate costs one
// factorization unless its step length repeats the previous one.
EulerResult ImplicitEulerReference(const Problem &problem, const Model &model,
                                   const std::vector<double> &times, int steps_per_gate = 10);

}  // namespace tdinv

#endif  // TDINV_FORWARD_HPP
