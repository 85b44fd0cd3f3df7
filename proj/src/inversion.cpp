// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/inversion.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace tdinv
{

namespace
{

// [W_d J; √λ R] and its transpose.
class AugmentedOperator : public LinearOperator
{
public:
  AugmentedOperator(const JacobianOperator &J, const RegOperator &reg, const Vector &weights,
                    double lambda)
      : J_(J), reg_(reg), w_(weights), sqrt_lambda_(std::sqrt(lambda))
  {
  }

  int Rows() const override { return J_.Rows() + reg_.size(); }
  int Cols() const override { return J_.Cols(); }

  Vector Apply(const Vector &x) const override
  {
    Vector y(Rows());
    y.head(J_.Rows()) = w_.cwiseProduct(J_.Apply(x));
    y.tail(reg_.size()) = sqrt_lambda_ * ApplySqrt(reg_, x);
    return y;
  }

  Vector ApplyAdjoint(const Vector &y) const override
  {
    return J_.ApplyAdjoint(w_.cwiseProduct(y.head(J_.Rows()))) +
           sqrt_lambda_ * ApplySqrtT(reg_, y.tail(reg_.size()));
  }

private:
  const JacobianOperator &J_;
  const RegOperator &reg_;
  const Vector &w_;
  double sqrt_lambda_;
};

double Objective(const DataSet &data, const RegOperator &reg, const Model &model,
                 const Vector &d_pred, double lambda, double *misfit, double *regv)
{
  *misfit = HalfMisfit(data, d_pred);
  *regv = RegValueGrad(reg, model).first;
  return *misfit + lambda * *regv;
}

double Milliseconds(std::chrono::steady_clock::time_point since)
{
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

}  // namespace

double HalfMisfit(const DataSet &data, const Vector &d_pred)
{
  Require(d_pred.size() == data.d_obs.size(), "predicted and observed data differ in length");
  return 0.5 * ((d_pred - data.d_obs).cwiseQuotient(data.sigma_d)).squaredNorm();
}

double ChiSquared(const DataSet &data, const Vector &d_pred)
{
  Require(data.size() > 0, "empty data set");
  return 2.0 * HalfMisfit(data, d_pred) / data.size();
}

GnStepResult GnStep(const JacobianOperator &J, const RegOperator &reg, const DataSet &data,
                    const Model &model, const Vector &d_pred, double lambda,
                    const LsqrOptions &options)
{
  Require(lambda > 0.0, "regularization weight must be positive");
  const Vector w = data.Weights();
  const AugmentedOperator A(J, reg, w, lambda);
  Vector b(A.Rows());
  b.head(J.Rows()) = -w.cwiseProduct(d_pred - data.d_obs);
  b.tail(reg.size()) = -std::sqrt(lambda) * ApplySqrt(reg, model.m - model.m_ref);

  const LsqrResult r = Lsqr(A, b, options);
  GnStepResult out;
  out.dm = r.x;
  out.lsqr_iters = r.iterations;
  out.breakdown = r.breakdown;
  out.gradient = -r.atb;
  return out;
}

LineSearchResult LineSearch(const std::function<double(double)> &phi_of_eta, double phi0,
                            double grad_dot_step, const InversionConfig &cfg)
{
  LineSearchResult out;
  double eta = 1.0;
  while (eta >= cfg.eta_min)
  {
    const double phi = phi_of_eta(eta);
    out.trials++;
    out.tried.push_back(eta);
    out.phi = phi;
    if (std::isfinite(phi) && phi <= phi0 + cfg.c1 * eta * grad_dot_step)
    {
      out.eta = eta;
      out.accepted = true;
      return out;
    }
    double next = 0.5 * eta;
    const double curvature = (phi - phi0 - grad_dot_step * eta) / (eta * eta);
    if (cfg.quadratic_step && grad_dot_step < 0.0 && std::isfinite(phi) && curvature > 0.0)
    {
      const double s = -grad_dot_step / (2.0 * curvature);
      // Safeguarded: never shrink by more than a factor 8 in one backtrack.
      const double snapped = std::exp2(std::round(std::log2(s)));
      next = std::clamp(snapped, 0.125 * eta, next);
      if (next < cfg.eta_min && eta > cfg.eta_min)
      {
        next = cfg.eta_min;
      }
    }
    eta = next;
  }
  return out;
}

double DefaultLambda0(const JacobianOperator &J, const RegOperator &reg, const DataSet &data,
                      const Model &start, const Vector &d_pred)
{
  const Vector w = data.Weights();
  const Vector wr = w.cwiseProduct(d_pred - data.d_obs);
  Vector p = -J.ApplyAdjoint(w.cwiseProduct(wr));
  const double pmax = p.cwiseAbs().maxCoeff();
  if (pmax > 0.0)
  {
    p /= pmax;
  }
  Model perturbed = start;
  perturbed.m += p;
  const double r = RegValueGrad(reg, perturbed).first;
  return std::max(wr.squaredNorm(), 1.0e-300) / std::max(1.0, 2.0 * r);
}

InversionState RunInversion(const Problem &problem, const RationalApproximant &approx,
                            const RegOperator &reg, const DataSet &data, const Model &start,
                            ShiftedFactorCache &cache, const InversionConfig &cfg,
                            const IterationCallback &on_iteration)
{
  data.Validate();
  Require(start.m.size() == problem.CellCount() && start.m_ref.size() == problem.CellCount(),
          "starting model does not match the problem");
  Require(data.size() == problem.ReceiverCount() * approx.ChannelCount(),
          "data size does not match receivers × channels");

  InversionState state;
  state.model = start;
  state.status = "running";
  auto t0 = std::chrono::steady_clock::now();
  ForwardResult current = ForwardResponse(problem, state.model, approx, cache);
  state.d_pred = current.data;

  state.lambda0 = cfg.lambda0.has_value()
                      ? *cfg.lambda0
                      : DefaultLambda0(JacobianOperator(problem, state.model, approx, cache, current.g),
                                       reg, data, state.model, state.d_pred);
  Require(state.lambda0 > 0.0, "initial regularization weight must be positive");
  state.lambda = state.lambda0;

  IterationRecord rec;
  rec.lambda = state.lambda;
  rec.phi = Objective(data, reg, state.model, state.d_pred, state.lambda, &rec.misfit, &rec.reg);
  rec.chi2 = ChiSquared(data, state.d_pred);
  rec.phi_before = rec.phi;
  rec.wall_ms = Milliseconds(t0);
  rec.factorizations = cache.Counters().factorizations;
  rec.solves = cache.Counters().solves;
  state.phi = rec.phi;
  state.chi2 = rec.chi2;
  state.history.push_back(rec);
  if (on_iteration)
  {
    on_iteration(state);
  }

  int rising = 0;
  double last_accepted_phi = state.phi;
  try
  {
    while (true)
    {
      if (state.chi2 <= cfg.chi2_target)
      {
        state.status = "target_reached";
        break;
      }
      if (state.lambda < state.lambda0 * cfg.lambda_min_factor)
      {
        state.status = "lambda_floor";
        break;
      }
      if (state.iteration >= cfg.max_gn)
      {
        state.status = "max_iterations";
        break;
      }
      state.iteration++;
      t0 = std::chrono::steady_clock::now();

      const JacobianOperator J(problem, state.model, approx, cache, current.g);
      const GnStepResult step =
          GnStep(J, reg, data, state.model, state.d_pred, state.lambda, cfg.lsqr);
      const double gd = step.gradient.dot(step.dm);

      IterationRecord it;
      it.iteration = state.iteration;
      it.lambda = state.lambda;
      it.lsqr_iters = step.lsqr_iters;
      it.phi_before = state.phi;
      it.grad_dot_step = gd;

      ForwardResult trial_forward;
      Model trial = state.model;
      auto phi_of_eta = [&](double eta)
      {
        trial.m = state.model.m + eta * step.dm;
        trial_forward = ForwardResponse(problem, trial, approx, cache);
        double misfit = 0.0, regv = 0.0;
        return Objective(data, reg, trial, trial_forward.data, state.lambda, &misfit, &regv);
      };
      LineSearchResult ls;
      if (step.dm.squaredNorm() > 0.0)
      {
        ls = LineSearch(phi_of_eta, state.phi, gd, cfg);
      }
      it.line_search_trials = ls.trials;

      bool cool = true;
      if (ls.accepted)
      {
        state.model = trial;
        current = std::move(trial_forward);
        state.d_pred = current.data;
        it.eta = ls.eta;
        it.accepted = true;
        const double before = state.phi;
        it.phi = Objective(data, reg, state.model, state.d_pred, state.lambda, &it.misfit, &it.reg);
        cool = (before - it.phi) < cfg.tol_outer * std::abs(before);
        rising = it.phi > last_accepted_phi ? rising + 1 : 0;
        last_accepted_phi = it.phi;
      }
      else
      {
        it.phi = Objective(data, reg, state.model, state.d_pred, state.lambda, &it.misfit, &it.reg);
      }
      it.chi2 = ChiSquared(data, state.d_pred);
      state.chi2 = it.chi2;
      if (cool)
      {
        state.lambda *= 0.5;
      }
      double misfit = 0.0, regv = 0.0;
      state.phi = Objective(data, reg, state.model, state.d_pred, state.lambda, &misfit, &regv);

      const SolveCounters counters = cache.Counters();
      it.factorizations = counters.factorizations;
      it.solves = counters.solves;
      it.wall_ms = Milliseconds(t0);
      state.history.push_back(it);
      if (on_iteration)
      {
        on_iteration(state);
      }
      if (rising >= cfg.divergence_window)
      {
        state.status = "diverged";
        state.message = "objective increased over " + std::to_string(rising) +
                        " consecutive accepted steps";
        break;
      }
    }
  }
  catch (const std::exception &e)
  {
    state.status = "error";
    state.message = e.what();
  }
  return state;
}

}  // namespace tdinv
