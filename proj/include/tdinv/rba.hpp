// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_RBA_HPP
#define TDINV_RBA_HPP

#include <vector>
#include "tdinv/types.hpp"

namespace tdinv
{

//
// Family of rational functions r_j(x) ≈ exp(-t_j x), j = 1..K_t, sharing one pole set.
// Each stored pole ξ_i (Im ξ_i > 0) stands for the conjugate pair {ξ_i, conj(ξ_i)}, so for
// real x
//
//   r_j(x) = 2 Re Σ_i α_ij / (x - ξ_i).
//
// Substituting x -> M⁻¹K gives u(t_j) ≈ 2 Re Σ_i α_ij (K - ξ_i M)⁻¹ f, i.e. one shifted
// system per stored pole regardless of the number of time channels.
//

struct TimeChannels
{
  std::vector<double> times;

  // count points log-uniform between 10^lo and 10^hi (inclusive).
  static TimeChannels LogSpaced(double lo_log10, double hi_log10, int count);

  int size() const { return static_cast<int>(times.size()); }
  double Min() const { return times.front(); }
  double Max() const { return times.back(); }
  void Validate() const;
};

struct FitConfig
{
  int max_iters = 50;
  double pole_tol = 1.0e-8;         // relative pole movement for convergence
  int log_points = 1000;            // training grid, log part
  int linear_points = 1000;         // training grid, linear part on [0, 1/t_min]
  int validation_size = 4096;       // composite grid used for fit_error
  bool relative_weighting = false;  // weight rows by 1/exp(-t x) (floored)
  double collision_tol = 1.0e-10;   // relative pole distance treated as a collision
};

struct FitStats
{
  int iterations = 0;        // pole relocation sweeps performed
  bool converged = false;    // pole movement fell below pole_tol
  int pole_relocations = 0;  // eigenvalue relocations (one per sweep, independent of K_t)
  int residue_solves = 0;    // per-channel least-squares solves
  int best_iteration = 0;    // sweep whose poles were kept
};

struct RationalApproximant
{
  std::vector<Complex> poles;  // m upper-half-plane representatives
  ComplexMatrix residues;      // m × K_t
  double x_min = 0.0, x_max = 0.0;
  double fit_error = 0.0;
  TimeChannels channels;
  FitStats stats;

  int PoleCount() const { return static_cast<int>(poles.size()); }
  int ChannelCount() const { return channels.size(); }
  void CheckInvariants() const;
};

RationalApproximant FitCommonPole(const TimeChannels &channels, double x_min, double x_max,
                                  int pole_count, const FitConfig &cfg = {});

// Keep the poles of `approx`, solve only the residue least-squares for new channels.
RationalApproximant RefitResidues(const RationalApproximant &approx,
                                  const TimeChannels &channels, const FitConfig &cfg = {});

double EvalScalar(const RationalApproximant &approx, double x, int channel);

// Pre-2Re half sum Σ_i α_ij / (x - ξ_i); EvalScalar returns twice its real part.
Complex EvalHalfSum(const RationalApproximant &approx, double x, int channel);

struct FitReport
{
  std::vector<double> max_abs;  // per channel
  std::vector<double> max_rel;  // per channel, over points with exp(-t x) >= rel_floor
  double overall_max_abs = 0.0;
  int grid_points = 0;
  static constexpr double rel_floor = 1.0e-8;
};

FitReport ValidateFit(const RationalApproximant &approx, int grid_size);

// Nested composite grid on [x_min, x_max]: a dyadic linear part on [x_min, min(1/t_min,
// x_max)] and a dyadic log part on [max(x_min, 10⁻³/t_min), x_max]. Grids for larger
// grid_size contain those for smaller ones. Always contains x_min and x_max.
std::vector<double> CompositeGrid(double x_min, double x_max, double t_min, int grid_size);

}  // namespace tdinv

#endif  // TDINV_RBA_HPP
