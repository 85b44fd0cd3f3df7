// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_INVERSION_HPP
#define TDINV_INVERSION_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>
#include "tdinv/lsqr.hpp"
#include "tdinv/regularization.hpp"
#include "tdinv/sensitivity.hpp"
#include "tdinv/synthetic_data.hpp"

namespace tdinv
{

// ‖W_d (d_pred - d_obs)‖² / number of data.
double ChiSquared(const DataSet &data, const Vector &d_pred);

// ½ ‖W_d (d_pred - d_obs)‖².
double HalfMisfit(const DataSet &data, const Vector &d_pred);

struct IterationRecord
{
  int iteration = 0;
  double phi = 0.0;        // objective after the step, at the λ it was taken with
  double misfit = 0.0;     // ½ ‖W_d r‖²
  double reg = 0.0;        // R(m)
  double chi2 = 0.0;
  double lambda = 0.0;
  double eta = 0.0;        // accepted step length, 0 if rejected
  bool accepted = false;
  int lsqr_iters = 0;
  int line_search_trials = 0;
  double phi_before = 0.0;   // φ(m) before the step
  double grad_dot_step = 0.0;  // ∇φᵀ δm
  double wall_ms = 0.0;
  long factorizations = 0;   // cumulative cache counters at the end of the iteration
  long solves = 0;
};

struct InversionConfig
{
  std::optional<double> lambda0;
  double chi2_target = 1.0;
  int max_gn = 30;
  LsqrOptions lsqr;
  double c1 = 1.0e-4;
  double eta_min = 1.0 / 64.0;
  bool quadratic_step = true;
  double tol_outer = 1.0e-3;           // relative φ decrease that triggers cooling
  double lambda_min_factor = 1.0 / 1048576.0;  // λ_min = λ₀ 2⁻²⁰
  int divergence_window = 3;
};

struct InversionState
{
  Model model;
  double lambda = 0.0;
  double lambda0 = 0.0;
  int iteration = 0;
  double phi = 0.0;
  double chi2 = 0.0;
  Vector d_pred;
  std::vector<IterationRecord> history;
  std::string status;  // running, target_reached, max_iterations, lambda_floor, diverged, error
  std::string message;
};

struct GnStepResult
{
  Vector dm;
  int lsqr_iters = 0;
  bool breakdown = false;
  Vector gradient;  // ∇φ at the current model, recovered from the first LSQR product
};

//
// LSQR on [W_d J; √λ R] δm ≈ -[W_d (d(m) - d_obs); √λ R (m - m_ref)]. The augmented
// normal equations are (Jᵀ W² J + λ L) δm = -Jᵀ W² r - λ L (m - m_ref).
//
GnStepResult GnStep(const JacobianOperator &J, const RegOperator &reg, const DataSet &data,
                    const Model &model, const Vector &d_pred, double lambda,
                    const LsqrOptions &options);

struct LineSearchResult
{
  double eta = 0.0;
  bool accepted = false;
  double phi = 0.0;  // φ at the accepted (or last tried) step
  int trials = 0;
  std::vector<double> tried;
};

// Backtracking from η = 1 on φ(η) with the Armijo condition. Trial steps are powers of
// two; with quadratic_step a minimizer of the quadratic through φ(0), φ'(0), φ(η) may skip
// up to two halvings, rounded to a power of two and still subject to Armijo.
LineSearchResult LineSearch(const std::function<double(double)> &phi_of_eta, double phi0,
                            double grad_dot_step, const InversionConfig &cfg);

// λ₀ = ‖W_d r(m₀)‖² / max(1, 2 R(m₀ + p)) where p is the steepest-descent direction of the
// misfit scaled to unit max norm.
double DefaultLambda0(const JacobianOperator &J, const RegOperator &reg, const DataSet &data,
                      const Model &start, const Vector &d_pred);

using IterationCallback = std::function<void(const InversionState &)>;

InversionState RunInversion(const Problem &problem, const RationalApproximant &approx,
                            const RegOperator &reg, const DataSet &data, const Model &start,
                            ShiftedFactorCache &cache, const InversionConfig &cfg,
                            const IterationCallback &on_iteration = {});

}  // namespace tdinv

#endif  // TDINV_INVERSION_HPP
