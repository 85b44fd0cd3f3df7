// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef TDINV_TESTS_FIXTURES_HPP
#define TDINV_TESTS_FIXTURES_HPP

#include <string>
#include "tdinv/problem_spec.hpp"
#include "tdinv/rba.hpp"

namespace tdinv::testing
{

inline constexpr double kMu0 = 1.25663706e-6;

// 31 channels on [1e-6, 1e-3] s.
TimeChannels StandardChannels();

// Shared-pole fit over StandardChannels on [0, 1e9]. Cached on disk in the build tree so
// that test binaries fit each pole count at most once.
const RationalApproximant &StandardApprox(int poles);

// Uniform 1-D line [0, length] with four interior receivers and a box source over the
// middle fifth.
ProblemSpec LineSpec(int cells, double length, double sigma, Boundary boundary = Boundary::Dirichlet);

// Coarse 2-D plan-view problem with N <= 200 (tem2d_small scenario).
ProblemSpec SmallPlanSpec();

ProblemSpec LoadScenario(const std::string &name);

}  // namespace tdinv::testing

#endif  // TDINV_TESTS_FIXTURES_HPP
