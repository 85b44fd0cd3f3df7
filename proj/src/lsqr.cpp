// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/lsqr.hpp"

#include <cmath>

namespace tdinv
{

LsqrResult Lsqr(const LinearOperator &A, const Vector &b, const LsqrOptions &options)
{
  Require(b.size() == A.Rows(), "lsqr: right-hand side does not match the operator");
  LsqrResult out;
  out.x = Vector::Zero(A.Cols());
  out.atb = Vector::Zero(A.Cols());

  Vector u = b;
  double beta = u.norm();
  const double bnorm = beta;
  if (beta == 0.0)
  {
    return out;
  }
  u /= beta;
  Vector v = A.ApplyAdjoint(u);
  out.atb = beta * v;
  double alpha = v.norm();
  if (alpha == 0.0)
  {
    out.rnorm = beta;
    return out;
  }
  v /= alpha;
  Vector w = v;

  double phibar = beta, rhobar = alpha;
  double anorm = 0.0, ddnorm = 0.0;
  out.rnorm = beta;
  out.arnorm = alpha * beta;
  out.istop = 7;

  for (int it = 1; it <= options.max_iters; it++)
  {
    u = A.Apply(v) - alpha * u;
    beta = u.norm();
    if (beta > 0.0)
    {
      u /= beta;
      anorm = std::sqrt(anorm * anorm + alpha * alpha + beta * beta);
      v = A.ApplyAdjoint(u) - beta * v;
      alpha = v.norm();
      if (alpha > 0.0)
      {
        v /= alpha;
      }
    }
    else
    {
      anorm = std::sqrt(anorm * anorm + alpha * alpha);
      alpha = 0.0;
    }

    const double rho = std::hypot(rhobar, beta);
    if (!(rho > 0.0) || !std::isfinite(rho))
    {
      out.breakdown = true;
      out.iterations = it;
      break;
    }
    const double c = rhobar / rho, s = beta / rho;
    const double theta = s * alpha;
    rhobar = -c * alpha;
    const double phi = c * phibar;
    phibar = s * phibar;

    out.x += (phi / rho) * w;
    ddnorm += (w / rho).squaredNorm();
    w = v - (theta / rho) * w;

    out.iterations = it;
    out.rnorm = phibar;
    out.arnorm = phibar * alpha * std::abs(c);
    const double acond = anorm * std::sqrt(ddnorm);
    const double xnorm = out.x.norm();

    if (out.rnorm <= options.btol * bnorm + options.atol * anorm * xnorm)
    {
      out.istop = 1;
      break;
    }
    if (anorm * out.rnorm > 0.0 && out.arnorm / (anorm * out.rnorm) <= options.atol)
    {
      out.istop = 2;
      break;
    }
    if (acond >= options.conlim)
    {
      out.istop = 3;
      break;
    }
    if (alpha == 0.0)
    {
      out.istop = 2;
      break;
    }
  }
  return out;
}

}  // namespace tdinv
