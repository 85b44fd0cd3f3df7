// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_SYNTHETIC_DATA_HPP
#define TDINV_SYNTHETIC_DATA_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>
#include "tdinv/forward.hpp"

namespace tdinv
{

struct NoiseSpec
{
  double eps_r = 0.03;           // relative level
  std::optional<double> eps_a;   // absolute level; default 10⁻⁶ max |d_clean|
  std::uint64_t seed = 1;
};

// Observed data with the error model σ_d = |d| ε_r + ε_a; weights W_d = 1/σ_d.
struct DataSet
{
  Vector d_obs;
  Vector sigma_d;
  std::vector<double> times;
  std::vector<Point> receivers;
  double eps_r = 0.0;
  double eps_a = 0.0;
  std::uint64_t seed = 0;
  std::string true_model_hash;  // empty for field data

  int size() const { return static_cast<int>(d_obs.size()); }
  Vector Weights() const { return sigma_d.cwiseInverse(); }
  void Validate() const;
};

// Adds seeded Gaussian noise with standard deviation |d_clean| ε_r + ε_a.
DataSet AddNoise(const Vector &d_clean, const NoiseSpec &noise);

DataSet MakeDataset(const Problem &problem, const Model &true_model,
                    const RationalApproximant &approx, ShiftedFactorCache &cache,
                    const NoiseSpec &noise);

// 64-bit FNV-1a over the raw bytes, as 16 hex digits.
std::string HashBytes(const void *data, std::size_t size);
std::string HashVector(const Vector &v);

}  // namespace tdinv

#endif  // TDINV_SYNTHETIC_DATA_HPP
