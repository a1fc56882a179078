// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hmlens/medium.hpp"

using namespace hmlens;

namespace
{

void expect_triple(const CoefficientTriple &c, Complex b1, Complex b2, Complex sigma,
                   double tol = 1e-14)
{
  EXPECT_NEAR(std::abs(c.b1 - b1), 0.0, tol);
  EXPECT_NEAR(std::abs(c.b2 - b2), 0.0, tol);
  EXPECT_NEAR(std::abs(c.sigma - sigma), 0.0, tol);
}

ScenarioSpec scheme2_spec(int d, double delta)
{
  ScenarioSpec s;
  s.d = d;
  s.delta = delta;
  s.r1 = 1.0;
  s.r2 = 3.0;
  s.R = 4.0;
  s.scheme = SchemeTag::scheme2;
  return s;
}

}  // namespace

TEST(Medium, Scheme2ThreeDimensionalShells)
{
  const auto layers = build_scheme2(3, 1.0, 3.0, 0.0, 0.0);
  ASSERT_EQ(layers.size(), 2u);
  EXPECT_DOUBLE_EQ(layers[0].r_hi, 2.0);
  // r = 2 sits on the split; just above belongs to the outer shell
  expect_triple(coefficient_at(layers, 2.0 + 1e-15), 0.25, -1.0, 0.25, 1e-12);
  expect_triple(coefficient_at(layers, 2.0), -0.25, 1.0, -0.25);
}

TEST(Medium, Scheme2TwoDimensionalOuterValue)
{
  const auto layers = build_scheme2(2, 0.5, 1.5, 0.0, 1.0);
  expect_triple(coefficient_at(layers, 1.0 + 1e-15), 1.0, -1.0, 1.0, 1e-12);
}

TEST(Medium, Scheme2ReductionSigmaTimesWeightIsOne)
{
  for (int d : {2, 3})
  {
    const auto layers = build_scheme2(d, 1.0, 2.0, 0.0, 1.0);
    for (double r : {1.6, 1.8, 1.99})
    {
      EXPECT_NEAR(std::abs(std::pow(r, d - 1) * coefficient_at(layers, r).sigma - 1.0), 0.0,
                  1e-14);
    }
  }
}

TEST(Medium, Scheme2InverseSquareSigma)
{
  const auto layers = build_scheme2(2, 1.0, 2.0, 0.0, 1.0, Scheme2Sigma::inverse_square);
  EXPECT_NEAR(std::abs(coefficient_at(layers, 1.8).sigma - 1.0 / (1.8 * 1.8)), 0.0, 1e-14);
}

TEST(Medium, LossSigns)
{
  const auto layers = build_scheme1_3d_k(0.5, 0.5 + 4.0 * kPi, 1.0, 1e-2);
  const auto c = coefficient_at(layers, 2.0);
  EXPECT_NEAR(c.sigma.imag(), 1e-2, 1e-16);
  EXPECT_NEAR(c.b1.imag(), -1e-2, 1e-16);
  EXPECT_NEAR(c.b2.imag(), -1e-2, 1e-16);
}

TEST(Medium, Scheme1ThreeDimensionalSigma)
{
  const auto a = build_scheme1_3d_k(0.5, 0.5 + 4.0 * kPi, 1.0, 0.0);
  EXPECT_NEAR(coefficient_at(a, 2.0).sigma.real(), 1.0 / 16.0, 1e-15);
  const auto b = build_scheme1_3d_k(0.5, 0.5 + 4.0 * kPi, 2.0, 0.0);
  EXPECT_NEAR(coefficient_at(b, 1.0).sigma.real(), 1.0 / 16.0, 1e-15);
}

TEST(Medium, Scheme1TwoDimensionalProfiles)
{
  const auto a = build_scheme1_2d(0.5, 0.5 + 2.0 * kPi, 0.0, 0.0);
  expect_triple(coefficient_at(a, 2.0), 0.5, -2.0, 0.0);
}

TEST(Medium, TuningEnforced)
{
  EXPECT_THROW(build_scheme1_2d(0.5, 6.5, 0.0, 0.0), DomainError);
  EXPECT_THROW(build_scheme1_3d_k(0.5, 0.5 + 2.0 * kPi, 1.0, 0.0), DomainError);
  EXPECT_NO_THROW(build_scheme1_2d(0.5, 6.5, 0.0, 0.0, Tuning::unchecked));
  EXPECT_THROW(build_scheme1_3d_k(0.5, 0.5 + 4.0 * kPi, 0.0, 0.0), DomainError);
  EXPECT_TRUE(is_tuned(1.0, 1.0 + 6.0 * kPi, 2.0 * kPi));
  EXPECT_FALSE(is_tuned(1.0, 1.0 + 5.0 * kPi, 2.0 * kPi));
  EXPECT_FALSE(is_tuned(1.0, 1.0, 2.0 * kPi));
}

TEST(Medium, ScenarioPartitionsDomain)
{
  const Scenario s = make_scenario(scheme2_spec(2, 1e-2));
  ASSERT_FALSE(s.layers.empty());
  EXPECT_DOUBLE_EQ(s.layers.front().r_lo, 0.0);
  EXPECT_DOUBLE_EQ(s.layers.back().r_hi, s.R);
  for (std::size_t i = 1; i < s.layers.size(); ++i)
  {
    EXPECT_DOUBLE_EQ(s.layers[i].r_lo, s.layers[i - 1].r_hi);
  }
  const auto bp = s.breakpoints();
  EXPECT_EQ(bp, (std::vector<double>{1.0, 2.0, 3.0}));
  EXPECT_TRUE(s.has_lens());
  EXPECT_EQ(s.boundary_condition(), BoundaryKind::neumann_gauge);
  EXPECT_NO_THROW(s.validate());
}

TEST(Medium, DefaultsFilledIn)
{
  ScenarioSpec spec = scheme2_spec(2, 0.0);
  spec.R = 0.0;
  spec.k = 1.0;
  const Scenario s = make_scenario(spec);
  EXPECT_DOUBLE_EQ(s.R, 1.25 * 3.0 + 1.0);
  EXPECT_EQ(s.boundary_condition(), BoundaryKind::robin);
}

TEST(Medium, MagnifiedReference2D)
{
  ScenarioSpec spec = scheme2_spec(2, 1e-2);
  const Scenario ref = magnified_reference_medium(make_scenario(spec));
  EXPECT_FALSE(ref.has_lens());
  const auto c = coefficient_at(ref.layers, 2.5);
  expect_triple(c, 2.0, 2.0, 1.0 / 9.0);
  expect_triple(coefficient_at(ref.layers, 3.5), 1.0, 1.0, 1.0);
}

TEST(Medium, MagnifiedReference3D)
{
  ScenarioSpec spec = scheme2_spec(3, 1e-2);
  const Scenario ref = magnified_reference_medium(make_scenario(spec));
  const auto c = coefficient_at(ref.layers, 1.5);
  expect_triple(c, 2.0 / 3.0, 2.0 / 3.0, 1.0 / 27.0);
}

TEST(Medium, PolynomialObjectAndDerivative)
{
  Polynomial p{{1.0, 2.0, Complex(0.0, 3.0)}};
  EXPECT_NEAR(std::abs(p(2.0) - Complex(5.0, 12.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(p.derivative()(2.0) - Complex(2.0, 12.0)), 0.0, 1e-14);
}

TEST(Medium, RejectsBadGeometry)
{
  ScenarioSpec s = scheme2_spec(2, 1e-2);
  s.r2 = 0.5;
  EXPECT_THROW(make_scenario(s), DomainError);
  s = scheme2_spec(4, 1e-2);
  EXPECT_THROW(make_scenario(s), DomainError);
  s = scheme2_spec(2, -1e-3);
  EXPECT_THROW(make_scenario(s), DomainError);
}
