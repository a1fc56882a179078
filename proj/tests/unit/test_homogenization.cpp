// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hmlens/homogenization.hpp"

using namespace hmlens;

namespace
{

// Cell averages by midpoint quadrature over one period starting at a multiple of eps.
std::pair<Complex, Complex> cell_means(const LaminateSpec &lam, double r)
{
  const int n = 200000;
  const double start = std::floor(r / lam.eps) * lam.eps;
  Complex inv_b1 = 0.0, b2 = 0.0;
  for (int i = 0; i < n; ++i)
  {
    const double x = start + lam.eps * (i + 0.5) / n;
    // freeze the r dependence at r, keep the phase of x
    const bool one = lam.phase_one(x);
    inv_b1 += 1.0 / (one ? lam.b1_one(r) : lam.b1_zero(r));
    b2 += one ? lam.b2_one(r) : lam.b2_zero(r);
  }
  return {double(n) / inv_b1, b2 / double(n)};
}

ScenarioSpec base_spec()
{
  ScenarioSpec s;
  s.d = 3;
  s.k = 0.0;
  s.delta = 1e-2;
  s.r1 = 1.0;
  s.r2 = 2.0;
  s.R = 3.5;
  s.scheme = SchemeTag::scheme2;
  s.boundary = BoundaryKind::dirichlet;
  return s;
}

}  // namespace

TEST(Homogenization, HarmonicAndArithmeticMeansByQuadrature)
{
  for (Shell shell : {Shell::outer, Shell::inner})
  {
    for (double delta : {0.5, 0.1, 0.01})
    {
      const LaminateSpec lam = LaminateSpec::preset(shell, 1.0, 2.0, 0.05, delta);
      const EffectiveCoefficients eff = effective_coefficients(lam);
      const double r = shell == Shell::outer ? 1.73 : 1.27;
      const auto [b1, b2] = cell_means(lam, r);
      EXPECT_NEAR(std::abs(eff.b1H(r) - b1) / std::abs(b1), 0.0, 1e-8);
      EXPECT_NEAR(std::abs(eff.b2H(r) - b2) / std::abs(b2), 0.0, 1e-8);
    }
  }
}

TEST(Homogenization, ClosedFormsOfBothShells)
{
  for (double delta : {0.5, 0.1, 0.01})
  {
    const Complex id(0.0, delta);
    const double r = 1.8;
    const CoefficientTriple o = closed_form_effective(Shell::outer, r, delta);
    EXPECT_NEAR(std::abs(o.b1 - 2.0 * (1.0 + id) / (r * r * (2.0 + 3.0 * id))), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(o.b2 - (-1.0 - id / 2.0)), 0.0, 1e-14);
    const double ri = 1.2;
    const CoefficientTriple in = closed_form_effective(Shell::inner, ri, delta);
    EXPECT_NEAR(std::abs(in.b1 - (-2.0 / 3.0 - 2.0 * id) / (ri * ri * (2.0 / 3.0 - id))), 0.0, 1e-14);
    EXPECT_NEAR(std::abs(in.b2 - (1.0 - id / 2.0)), 0.0, 1e-14);

    const ClosedFormCheck chk = closed_form_check(delta);
    EXPECT_LT(chk.max_deviation, 1e-12);
  }
}

TEST(Homogenization, LimitAndExpansion)
{
  const CoefficientTriple o = closed_form_effective(Shell::outer, 1.5, 0.0);
  EXPECT_NEAR(std::abs(o.b1 - 1.0 / 2.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(o.b2 + 1.0), 0.0, 1e-15);
  const CoefficientTriple in = closed_form_effective(Shell::inner, 1.5, 0.0);
  EXPECT_NEAR(std::abs(in.b1 + 1.0 / 2.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(in.b2 - 1.0), 0.0, 1e-15);

  // second-order remainders of the first-order expansions
  for (double delta : {1e-2, 1e-3})
  {
    const Complex id(0.0, delta);
    const Complex ro = closed_form_effective(Shell::outer, 1.0, delta).b1 - (1.0 - id / 2.0);
    const Complex ri = closed_form_effective(Shell::inner, 1.0, delta).b1 - (-1.0 - 4.5 * id);
    EXPECT_LT(std::abs(ro), 3.0 * delta * delta);
    EXPECT_LT(std::abs(ri), 30.0 * delta * delta);
  }
  const ClosedFormCheck chk = closed_form_check(1e-2);
  EXPECT_LT(chk.limit_deviation, 1e-12);
  EXPECT_LT(chk.extrapolated_deviation, 1e-4);
  EXPECT_GT(chk.outer_remainder_slope, 1.9);
  EXPECT_GT(chk.inner_remainder_slope, 1.9);
}

TEST(Homogenization, ZeroPhaseIsRejected)
{
  LaminateSpec lam = LaminateSpec::preset(Shell::outer, 1.0, 2.0, 0.1, 0.0);
  lam.b1_zero = [](double) { return Complex(0.0); };
  EXPECT_THROW(effective_coefficients(lam).b1H(1.7), DomainError);
}

TEST(Homogenization, LaminateScenarioLayers)
{
  const double eps = 0.125;
  const Scenario s = laminate_scenario(base_spec(), eps);
  EXPECT_EQ(s.variant, LensVariant::laminate);
  int lens_layers = 0;
  for (const auto &l : s.layers)
  {
    if (l.kind == LayerKind::lens)
    {
      ++lens_layers;
      EXPECT_NEAR(l.r_hi - l.r_lo, 0.5 * eps, 1e-12);
    }
  }
  EXPECT_EQ(lens_layers, 16);
  EXPECT_THROW(laminate_scenario(base_spec(), 1e-4, 0.5, 1000), DomainError);
  EXPECT_DOUBLE_EQ(laminate_spacing(0.01, 0.04), 0.005);
  EXPECT_DOUBLE_EQ(laminate_spacing(0.001, 0.04), 0.001);
}

TEST(Homogenization, HomogenizedBuildsAgree)
{
  const Scenario a = homogenized_scenario(base_spec(), EffectiveSource::harmonic_means);
  const Scenario b = homogenized_scenario(base_spec(), EffectiveSource::closed_form);
  for (double r : {1.1, 1.4, 1.6, 1.9})
  {
    const auto ca = coefficient_at(a.layers, r), cb = coefficient_at(b.layers, r);
    EXPECT_NEAR(std::abs(ca.b1 - cb.b1), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(ca.b2 - cb.b2), 0.0, 1e-12);
  }
}

TEST(Homogenization, ConvergenceSweepSmall)
{
  RingSource src;
  src.center = 2.75;
  src.width = 0.08;
  src.modes = {SourceMode{2, AngularBranch::zonal, 1.0}};
  const ConvergenceReport rep =
      homogenization_convergence(base_spec(), {0.125, 0.0625, 0.03125}, {2}, src, 1.0 / 256.0);
  ASSERT_EQ(rep.rows.size(), 3u);
  EXPECT_LT(rep.rows[2].l2_error, rep.rows[0].l2_error);
  EXPECT_LT(rep.rows[2].l2_error, 0.03);
  EXPECT_LT(rep.harmonic_vs_closed_form, 1e-10);
  EXPECT_LT(rep.max_power_balance, 1e-8);
  ASSERT_EQ(rep.l2_rates.size(), 1u);
  EXPECT_NEAR(rep.l2_rates[0], 1.0, 0.2);
}
