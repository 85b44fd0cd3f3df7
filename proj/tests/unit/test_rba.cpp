// Copyright The tdinv Authors.
// SPDX-License-Identifier: Apache-2.0

#include <cmath>
#include <random>
#include <gtest/gtest.h>
#include "fixtures.hpp"
#include "tdinv/serialization.hpp"

using namespace tdinv;
using tdinv::testing::StandardApprox;
using tdinv::testing::StandardChannels;

namespace
{

RationalApproximant SinglePole(Complex xi, Complex alpha)
{
  RationalApproximant a;
  a.poles = {xi};
  a.residues = ComplexMatrix::Constant(1, 1, alpha);
  a.channels.times = {1.0};
  a.x_max = 1.0;
  return a;
}

}  // namespace

TEST(TimeChannels, LogSpacedEndpointsAndOrder)
{
  const auto c = StandardChannels();
  ASSERT_EQ(c.size(), 31);
  EXPECT_NEAR(c.Min(), 1e-6, 1e-18);
  EXPECT_NEAR(c.Max(), 1e-3, 1e-15);
  for (int j = 1; j < c.size(); j++)
  {
    EXPECT_GT(c.times[j], c.times[j - 1]);
  }
}

TEST(TimeChannels, RejectsNonIncreasing)
{
  TimeChannels c;
  c.times = {1e-3, 1e-4};
  EXPECT_THROW(c.Validate(), Error);
  c.times = {0.0, 1.0};
  EXPECT_THROW(c.Validate(), Error);
}

TEST(EvalScalar, PurelyImaginaryReciprocal)
{
  EXPECT_DOUBLE_EQ(EvalScalar(SinglePole({0.0, 1.0}, 1.0), 0.0, 0), 0.0);
}

TEST(EvalScalar, ShiftedPole)
{
  EXPECT_DOUBLE_EQ(EvalScalar(SinglePole({1.0, 1.0}, 1.0), 1.0, 0), 0.0);
}

TEST(EvalScalar, MatchesHalfSumDefinition)
{
  const auto a = SinglePole({2.0, 3.0}, {0.5, -0.25});
  const double x = 0.7;
  const Complex expected = Complex(0.5, -0.25) / (x - Complex(2.0, 3.0));
  EXPECT_DOUBLE_EQ(EvalScalar(a, x, 0), 2.0 * expected.real());
  EXPECT_THROW(EvalScalar(a, x, 1), Error);
}

TEST(FitCommonPole, SinglePoleOnNearConstantInterval)
{
  TimeChannels c;
  c.times = {1e-3};
  const auto a = FitCommonPole(c, 0.0, 1e-6 / 1e-3, 1);
  EXPECT_LT(a.fit_error, 1e-3);
  EXPECT_EQ(a.PoleCount(), 1);
}

TEST(FitCommonPole, InvariantsOfTheStandardFit)
{
  const auto &a = StandardApprox(21);
  ASSERT_EQ(a.PoleCount(), 21);
  ASSERT_EQ(a.ChannelCount(), 31);
  for (int i = 0; i < a.PoleCount(); i++)
  {
    EXPECT_GT(a.poles[i].imag(), 0.0);
    for (int k = i + 1; k < a.PoleCount(); k++)
    {
      EXPECT_GT(std::abs(a.poles[i] - a.poles[k]), 0.0);
    }
  }
  EXPECT_NO_THROW(a.CheckInvariants());
}

TEST(FitCommonPole, ValueAtZeroIsOneWithinFitError)
{
  const auto &a = StandardApprox(21);
  for (int j = 0; j < a.ChannelCount(); j++)
  {
    EXPECT_LE(std::abs(EvalScalar(a, 0.0, j) - 1.0), a.fit_error) << "channel " << j;
  }
}

TEST(FitCommonPole, RandomPointsWithinFitError)
{
  // Points are drawn where the validation grid is dense (log-uniform) plus uniform points.
  const auto &a = StandardApprox(21);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> logx(-3.0, 9.0), linx(0.0, 1e6);
  double worst = 0.0;
  for (int k = 0; k < 2000; k++)
  {
    const double x = k % 2 ? std::pow(10.0, logx(rng)) : linx(rng);
    for (int j = 0; j < a.ChannelCount(); j++)
    {
      worst = std::max(worst, std::abs(EvalScalar(a, x, j) - std::exp(-a.channels.times[j] * x)));
    }
  }
  EXPECT_LE(worst, 2.0 * a.fit_error);
}

TEST(FitCommonPole, ConjugateClosureGivesRealValues)
{
  // 2 Re of the half sum equals the full sum over both members of each conjugate pair.
  const auto &a = StandardApprox(12);
  for (double x : {0.0, 1.0, 1e3, 1e6, 1e9})
  {
    for (int j = 0; j < a.ChannelCount(); j += 5)
    {
      Complex full = 0.0;
      for (int i = 0; i < a.PoleCount(); i++)
      {
        full += a.residues(i, j) / (x - a.poles[i]) +
                std::conj(a.residues(i, j)) / (x - std::conj(a.poles[i]));
      }
      EXPECT_NEAR(full.imag(), 0.0, 1e-12 * std::max(1.0, std::abs(full)));
      EXPECT_NEAR(full.real(), EvalScalar(a, x, j), 1e-12 * std::max(1.0, std::abs(full)));
    }
  }
}

TEST(FitCommonPole, ErrorDecreasesWithPoleCount)
{
  double previous = std::numeric_limits<double>::infinity();
  for (int m = 8; m <= 21; m++)
  {
    const auto &a = StandardApprox(m);
    EXPECT_LE(a.fit_error, previous) << "m = " << m;
    previous = a.fit_error;
  }
}

TEST(FitCommonPole, PoleWorkIndependentOfChannelCount)
{
  FitConfig cfg;
  cfg.max_iters = 6;
  cfg.pole_tol = 0.0;
  const auto few = FitCommonPole(TimeChannels::LogSpaced(-6, -3, 4), 0.0, 1e9, 6, cfg);
  const auto many = FitCommonPole(TimeChannels::LogSpaced(-6, -3, 40), 0.0, 1e9, 6, cfg);
  EXPECT_EQ(few.stats.pole_relocations, 6);
  EXPECT_EQ(many.stats.pole_relocations, 6);
  EXPECT_EQ(few.PoleCount(), many.PoleCount());
  // Residue solves scale with the channels only through the m × K_t residue system.
  EXPECT_EQ(few.stats.residue_solves * 10, many.stats.residue_solves);
}

TEST(RefitResidues, KeepsPolesAndFitsNewChannels)
{
  const auto &a = StandardApprox(21);
  const auto b = RefitResidues(a, TimeChannels::LogSpaced(-6, -3, 62));
  EXPECT_EQ(b.poles, a.poles);
  EXPECT_EQ(b.ChannelCount(), 62);
  EXPECT_LT(b.fit_error, 10.0 * a.fit_error);
  EXPECT_EQ(b.stats.pole_relocations, 0);
}

TEST(ValidateFit, RefinedGridWithinTwiceFitError)
{
  const auto &a = StandardApprox(21);
  const auto report = ValidateFit(a, 16384);
  EXPECT_LE(report.overall_max_abs, 2.0 * a.fit_error);
  ASSERT_EQ(static_cast<int>(report.max_abs.size()), a.ChannelCount());
  ASSERT_EQ(static_cast<int>(report.max_rel.size()), a.ChannelCount());
}

TEST(ValidateFit, NonDecreasingInGridSize)
{
  const auto &a = StandardApprox(12);
  const auto coarse = ValidateFit(a, 10);
  const auto fine = ValidateFit(a, 10000);
  EXPECT_LE(coarse.overall_max_abs, fine.overall_max_abs);
  for (int j = 0; j < a.ChannelCount(); j++)
  {
    EXPECT_LE(coarse.max_abs[j], fine.max_abs[j]);
  }
}

TEST(ValidateFit, EmptyForNoChannels)
{
  RationalApproximant a;
  a.x_max = 1.0;
  const auto report = ValidateFit(a, 10);
  EXPECT_TRUE(report.max_abs.empty());
  EXPECT_EQ(report.overall_max_abs, 0.0);
  EXPECT_THROW(ValidateFit(StandardApprox(12), 9), Error);
}

TEST(CompositeGrid, NestedAndContainsEndpoints)
{
  const auto small = CompositeGrid(0.0, 1e9, 1e-6, 64);
  const auto large = CompositeGrid(0.0, 1e9, 1e-6, 1024);
  EXPECT_EQ(small.front(), 0.0);
  EXPECT_EQ(small.back(), 1e9);
  for (double x : small)
  {
    EXPECT_TRUE(std::binary_search(large.begin(), large.end(), x)) << x;
  }
}

TEST(Serialization, ApproximantRoundTripIsExact)
{
  const auto &a = StandardApprox(12);
  const auto b = ApproximantFromJson(Json::parse(ToJson(a).dump()));
  EXPECT_EQ(a.poles, b.poles);
  EXPECT_EQ(a.residues, b.residues);
  EXPECT_EQ(a.channels.times, b.channels.times);
  EXPECT_EQ(a.fit_error, b.fit_error);
}

TEST(FitCommonPole, RejectsBadArguments)
{
  EXPECT_THROW(FitCommonPole(StandardChannels(), 0.0, 1e9, 0), Error);
  EXPECT_THROW(FitCommonPole(StandardChannels(), 1.0, 1.0, 4), Error);
  EXPECT_THROW(FitCommonPole(TimeChannels{}, 0.0, 1.0, 4), Error);
}
