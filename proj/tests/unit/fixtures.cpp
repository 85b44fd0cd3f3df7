// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include "fixtures.hpp"

#include <filesystem>
#include <map>
#include <mutex>
#include <unistd.h>
#include "tdinv/serialization.hpp"

namespace tdinv::testing
{

TimeChannels StandardChannels()
{
  return TimeChannels::LogSpaced(-6.0, -3.0, 31);
}

const RationalApproximant &StandardApprox(int poles)
{
  static std::mutex mutex;
  static std::map<int, RationalApproximant> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(poles);
  if (it != cache.end())
  {
    return it->second;
  }
  const std::filesystem::path path =
      std::filesystem::path(TDINV_FIXTURE_DIR) / ("approx_m" + std::to_string(poles) + ".json");
  RationalApproximant approx;
  if (std::filesystem::exists(path))
  {
    approx = ApproximantFromJson(LoadJson(path.string()));
  }
  else
  {
    approx = FitCommonPole(StandardChannels(), 0.0, 1.0e9, poles);
    const auto tmp = path.string() + ".tmp" + std::to_string(::getpid());
    SaveJson(ToJson(approx), tmp);
    std::filesystem::rename(tmp, path);
  }
  return cache.emplace(poles, std::move(approx)).first->second;
}

ProblemSpec LineSpec(int cells, double length, double sigma, Boundary boundary)
{
  ProblemSpec spec;
  spec.dimension = 1;
  spec.x0 = 0.0;
  spec.x1 = length;
  spec.nx = cells;
  spec.boundary = boundary;
  spec.mu = kMu0;
  spec.background_sigma = sigma;
  for (int r = 1; r <= 4; r++)
  {
    spec.receivers.push_back({length * (0.2 + 0.15 * r), 0.0});
  }
  SourceFootprint src;
  src.kind = SourceFootprint::Kind::Box;
  src.box.lo = {0.4 * length, 0.0};
  src.box.hi = {0.6 * length, 0.0};
  spec.sources.push_back(src);
  return spec;
}

ProblemSpec SmallPlanSpec()
{
  return LoadScenario("tem2d_small.spec");
}

ProblemSpec LoadScenario(const std::string &name)
{
  return LoadProblemSpec((std::filesystem::path(TDINV_SCENARIO_DIR) / name).string());
}

}  // namespace tdinv::testing
