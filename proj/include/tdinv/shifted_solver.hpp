// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_SHIFTED_SOLVER_HPP
#define TDINV_SHIFTED_SOLVER_HPP

#include <atomic>
#include <functional>
#include <memory>
#include <vector>
#include "tdinv/problem.hpp"
#include "tdinv/rba.hpp"
#include "tdinv/worker_pool.hpp"

namespace tdinv
{

enum class FactorBackend
{
  SparseLU,  // complex sparse LU, COLAMD ordering
  DenseLU    // dense partial-pivot LU, small problems only
};

struct SolverOptions
{
  int workers = 1;
  FactorBackend backend = FactorBackend::SparseLU;
  bool check_residual = false;  // verify ‖A g - b‖ / ‖b‖ after each solve
  double residual_tol = 1.0e-8;
  int dense_limit = 500;
};

struct SolveCounters
{
  long factorizations = 0;
  long solves = 0;
  long version = 0;  // current model version tag
};

//
// Factorizations of A_i = K - ξ_i M(m), one slot per pole. A slot is valid only for the
// model version it was built under; binding a different model (or pole set) issues a new
// version tag and invalidates every slot. Pole i is always handled by worker i mod W, so
// slots are never touched by two workers.
//
class ShiftedFactorCache
{
public:
  explicit ShiftedFactorCache(SolverOptions options = {});
  ~ShiftedFactorCache();

  ShiftedFactorCache(const ShiftedFactorCache &) = delete;
  ShiftedFactorCache &operator=(const ShiftedFactorCache &) = delete;

  // Returns the version tag for (problem, m, poles). The tag changes only when one of them
  // differs from the currently bound state (models compared bitwise).
  long Bind(const Problem &problem, const Vector &m, const std::vector<Complex> &poles);

  // Factorizes every pole slot missing for the current version, in parallel.
  void FactorizeAll();

  // Factorizes slot i if it is missing for the current version. Safe to call from the
  // worker that owns pole i.
  void Ensure(int pole);

  bool Has(int pole) const;

  // A_i⁻¹ rhs from the cached factorization. A_i is complex symmetric, so this also
  // serves transpose solves. Throws Error::Kind::CacheMiss when slot i is not built for
  // the current version.
  ComplexVector Solve(int pole, const ComplexVector &rhs) const;

  // body(i) for every pole on its owning worker.
  void ForEachPole(const std::function<void(int)> &body);

  SolveCounters Counters() const;
  long Version() const { return version_; }
  int PoleCount() const { return static_cast<int>(poles_.size()); }
  Complex Pole(int i) const { return poles_[i]; }
  int Workers() const { return pool_.size(); }
  const SolverOptions &Options() const { return options_; }
  const Problem &BoundProblem() const;
  const Vector &BoundModel() const { return m_; }
  const SparseMatrix &BoundMass() const { return M_; }

private:
  struct Slot;
  void Factorize(int pole);

  SolverOptions options_;
  WorkerPool pool_;
  const Problem *problem_ = nullptr;
  Vector m_;
  SparseMatrix M_;
  std::vector<Complex> poles_;
  std::vector<std::unique_ptr<Slot>> slots_;
  long version_ = 0;
  std::atomic<long> factorizations_{0};
  mutable std::atomic<long> solves_{0};
};

// g_i = (K - ξ_i M(m))⁻¹ rhs for every pole, in pole order.
std::vector<ComplexVector> SolveAllPoles(const Problem &problem, const Model &model,
                                         const RationalApproximant &approx, const Vector &rhs,
                                         ShiftedFactorCache &cache);

// Solve with an existing factorization; never factorizes.
ComplexVector ResolveWithCache(const ShiftedFactorCache &cache, int pole, const ComplexVector &rhs);

}  // namespace tdinv

#endif  // TDINV_SHIFTED_SOLVER_HPP
