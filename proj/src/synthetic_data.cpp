// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "tdinv/synthetic_data.hpp"

#include <cmath>
#include <cstdio>
#include <random>

namespace tdinv
{

void DataSet::Validate() const
{
  Require(d_obs.size() == sigma_d.size(), "data and standard deviations differ in length");
  for (Eigen::Index k = 0; k < sigma_d.size(); k++)
  {
    Require(sigma_d(k) > 0.0 && std::isfinite(sigma_d(k)),
            "data standard deviations must be positive and finite");
    Require(std::isfinite(d_obs(k)), "observed data must be finite");
  }
}

DataSet AddNoise(const Vector &d_clean, const NoiseSpec &noise)
{
  Require(noise.eps_r >= 0.0, "relative noise level must be non-negative");
  const double peak = d_clean.size() > 0 ? d_clean.cwiseAbs().maxCoeff() : 0.0;
  const double eps_a = noise.eps_a.value_or(1.0e-6 * peak);
  Require(eps_a > 0.0, "absolute noise level must be positive");

  DataSet data;
  data.eps_r = noise.eps_r;
  data.eps_a = eps_a;
  data.seed = noise.seed;
  data.sigma_d = d_clean.cwiseAbs() * noise.eps_r + Vector::Constant(d_clean.size(), eps_a);
  std::mt19937_64 rng(noise.seed);
  std::normal_distribution<double> normal;
  data.d_obs.resize(d_clean.size());
  for (Eigen::Index k = 0; k < d_clean.size(); k++)
  {
    data.d_obs(k) = d_clean(k) + data.sigma_d(k) * normal(rng);
  }
  return data;
}

DataSet MakeDataset(const Problem &problem, const Model &true_model,
                    const RationalApproximant &approx, ShiftedFactorCache &cache,
                    const NoiseSpec &noise)
{
  const ForwardResult clean = ForwardResponse(problem, true_model, approx, cache);
  DataSet data = AddNoise(clean.data, noise);
  data.times = approx.channels.times;
  data.receivers = problem.receivers;
  data.true_model_hash = HashVector(true_model.m);
  return data;
}

std::string HashBytes(const void *data, std::size_t size)
{
  std::uint64_t h = 14695981039346656037ull;
  const auto *p = static_cast<const unsigned char *>(data);
  for (std::size_t k = 0; k < size; k++)
  {
    h ^= p[k];
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string HashVector(const Vector &v)
{
  return HashBytes(v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
}

}  // namespace tdinv
