// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "hmlens/rates.hpp"

using namespace hmlens;

TEST(Rates, ExactPowerLaw)
{
  const RateFit f = estimate_rate({1e-2, 1e-3, 1e-4}, {3e-4, 3e-6, 3e-8});
  EXPECT_NEAR(f.slope, 2.0, 1e-12);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
  EXPECT_NEAR(f.residual, 0.0, 1e-12);
}

TEST(Rates, SeededNoiseRecoversSlope)
{
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> noise(-0.05, 0.05);
  for (double p : {0.5, 1.0, 2.0})
  {
    std::vector<double> xs, ys;
    for (int i = 0; i < 8; ++i)
    {
      const double x = std::pow(2.0, -i);
      xs.push_back(x);
      ys.push_back(1.7 * std::pow(x, p) * (1.0 + noise(rng)));
    }
    const RateFit f = estimate_rate(xs, ys);
    EXPECT_NEAR(f.slope, p, 0.03);
    EXPECT_GT(f.residual, 0.0);
    EXPECT_LT(f.residual, 0.06);
  }
}

TEST(Rates, RejectsBadInput)
{
  EXPECT_THROW(estimate_rate({1.0, 0.5}, {1.0, 0.5}), DomainError);
  EXPECT_THROW(estimate_rate({1.0, 0.5, 0.25}, {1.0, 0.0, 0.25}), DomainError);
  EXPECT_THROW(estimate_rate({1.0, 0.5, -0.25}, {1.0, 0.5, 0.25}), DomainError);
  EXPECT_THROW(estimate_rate({1.0, 0.5, 0.25}, {1.0, 0.5}), DomainError);
}
