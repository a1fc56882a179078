// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "hmlens/limit_solutions.hpp"

using namespace hmlens;

namespace
{

ScenarioSpec spec_of(SchemeTag scheme, int d, double k, double r1, double r2, double delta)
{
  ScenarioSpec s;
  s.d = d;
  s.k = k;
  s.r1 = r1;
  s.r2 = r2;
  s.delta = delta;
  s.scheme = scheme;
  return s;
}

RingSource ring(double center, int n_hi, AngularBranch b, int n_lo = 0)
{
  RingSource src;
  src.center = center;
  src.width = 0.1;
  for (int n = n_lo; n <= n_hi; ++n)
  {
    src.modes.push_back(SourceMode{n, b, 1.0});
  }
  return src;
}

}  // namespace

TEST(LimitSolutions, TransportClosedForm)
{
  ModeTransport t;
  t.kappa = 2.25;
  t.r2 = 3.0;
  t.value = Complex(1.0, 0.5);
  t.slope = Complex(-0.2, 0.1);
  for (double r : {0.0, 1.3, 2.9})
  {
    const double x = r - 3.0;
    const Complex v = t.value * std::cos(1.5 * x) + t.slope / 1.5 * std::sin(1.5 * x);
    EXPECT_NEAR(std::abs(t.v(r) - v), 0.0, 1e-14);
    const Complex dv = -1.5 * t.value * std::sin(1.5 * x) + t.slope * std::cos(1.5 * x);
    EXPECT_NEAR(std::abs(t.dv(r) - dv), 0.0, 1e-14);
    EXPECT_NEAR(t.energy(r), t.energy(3.0), 1e-13);
  }
}

TEST(LimitSolutions, HalfIntegerModesAre4PiPeriodic)
{
  ModeTransport t;
  t.kappa = 0.25;
  t.r2 = 0.5 + 4.0 * kPi;
  t.value = 1.0;
  t.slope = 0.0;
  EXPECT_NEAR(std::abs(t.v(0.5) - 1.0), 0.0, 1e-12);
  LensTransport lt;
  for (int n = 0; n <= 20; ++n)
  {
    ModeTransport m;
    m.kappa = (n + 0.5) * (n + 0.5);
    m.r2 = 0.5 + 4.0 * kPi;
    m.value = 1.0;
    m.slope = Complex(0.0, 0.3);
    lt.modes.push_back(m);
  }
  EXPECT_LT(periodicity_error(lt, 0.5, 0.5 + 4.0 * kPi, 4.0 * kPi), 1e-10);
  EXPECT_GT(periodicity_error(lt, 0.5, 0.5 + 4.0 * kPi, 2.0 * kPi), 0.1);
}

TEST(LimitSolutions, LensKappa)
{
  const Scenario s1 = make_scenario(spec_of(SchemeTag::scheme1_2d, 2, 0.0, 0.5, 0.5 + 2 * kPi, 1e-2));
  EXPECT_NEAR(lens_kappa(s1, ModeIndex{2, 3, AngularBranch::cosine}), 9.0, 1e-14);
  const Scenario s3 =
      make_scenario(spec_of(SchemeTag::scheme1_3d_k, 3, 1.0, 0.5, 0.5 + 4 * kPi, 1e-2));
  EXPECT_NEAR(lens_kappa(s3, ModeIndex{3, 3, AngularBranch::zonal}), 12.25, 1e-14);
  const Scenario s2 = make_scenario(spec_of(SchemeTag::scheme2, 2, 1.0, 1.0, 2.0, 1e-2));
  EXPECT_NEAR(lens_kappa(s2, ModeIndex{2, 3, AngularBranch::cosine}), 10.0, 1e-14);
}

TEST(LimitSolutions, Scheme1ConstructionGluesAndConserves)
{
  for (double k : {0.0, 1.0})
  {
    auto lens = std::make_shared<const Scenario>(
        make_scenario(spec_of(SchemeTag::scheme1_2d, 2, k, 0.5, 0.5 + 2 * kPi, 1e-3)));
    const RadialGrid g = RadialGrid::build(lens->R, lens->breakpoints(), 2 * kPi / 256);
    auto ref = std::make_shared<const Scenario>(magnified_reference_medium(*lens));
    const RingSource src = ring(8.0, 6, AngularBranch::cosine, k > 0 ? 1 : 0);
    const Field u_hat = solve_reference(ref, src, 6, g);
    const LimitConstruction lc = extend_scheme1(u_hat, lens, g);
    EXPECT_LT(lc.gluing_value, 1e-10);
    EXPECT_LT(lc.gluing_slope, 1e-10);
    EXPECT_LT(lc.transmission_r1, 1e-8);
    EXPECT_LT(lc.transmission_r2, 1e-8);
    EXPECT_LT(lens_energy_invariant(lc), 1e-10);
    // outside the lens the limit is the reference
    const SuperlensError same = superlens_error(lc.u0, u_hat, lens->r2, lens->R);
    EXPECT_LT(same.l2_rel, 1e-14);
  }
}

TEST(LimitSolutions, Scheme1QuasistaticModeZeroDefectReported)
{
  auto lens = std::make_shared<const Scenario>(
      make_scenario(spec_of(SchemeTag::scheme1_2d, 2, 0.0, 0.5, 0.5 + 2 * kPi, 1e-3)));
  const RadialGrid g = RadialGrid::build(lens->R, lens->breakpoints(), 2 * kPi / 128);
  auto ref = std::make_shared<const Scenario>(magnified_reference_medium(*lens));
  const Field u_hat = solve_reference(ref, ring(8.0, 2, AngularBranch::cosine), 2, g);
  const LimitConstruction lc = extend_scheme1(u_hat, lens, g);
  EXPECT_GE(lc.mode0_defect, 0.0);
  EXPECT_TRUE(std::isfinite(lc.mode0_defect));
}

TEST(LimitSolutions, Scheme2ReflectionAndConvergence)
{
  auto make = [](double delta) {
    ScenarioSpec s = spec_of(SchemeTag::scheme2, 2, 0.0, 1.0, 2.0, delta);
    s.R = 3.5;
    return std::make_shared<const Scenario>(make_scenario(s));
  };
  auto lens = make(1e-2);
  const RadialGrid g = RadialGrid::build(lens->R, lens->breakpoints(), 1.0 / 128.0);
  auto ref = std::make_shared<const Scenario>(magnified_reference_medium(*lens));
  const RingSource src = ring(2.75, 8, AngularBranch::cosine);
  const Field u_hat = solve_reference(ref, src, 8, g);
  const LimitConstruction lc = extend_scheme2(u_hat, lens, g);
  EXPECT_LT(reflection_symmetry_error(lc.u0, *lens), 1e-12);
  EXPECT_LT(lc.gluing_value, 1e-10);

  double prev_err = 1e300, prev_refl = 1e300;
  for (double delta : {1e-2, 1e-3, 1e-4})
  {
    const Field u = solve_scenario(make(delta), src, 8, g);
    const double e = superlens_error(u, u_hat, 2.0, 3.5).l2_rel;
    const double refl = reflection_symmetry_error(u, *make(delta));
    EXPECT_LT(e, prev_err);
    EXPECT_LT(refl, prev_refl);
    prev_err = e;
    prev_refl = refl;
  }
  EXPECT_LT(prev_err, 1e-2);
}

TEST(LimitSolutions, SuperlensErrorExcludesModes)
{
  auto lens = std::make_shared<const Scenario>(
      make_scenario(spec_of(SchemeTag::scheme2, 2, 1.0, 1.0, 2.0, 1e-2)));
  const RadialGrid g = RadialGrid::build(lens->R, lens->breakpoints(), 1.0 / 32.0);
  auto ref = std::make_shared<const Scenario>(magnified_reference_medium(*lens));
  const RingSource src = ring(2.75, 3, AngularBranch::cosine);
  const Field u = solve_scenario(lens, src, 3, g);
  const Field v = solve_reference(ref, src, 3, g);
  const SuperlensError all = superlens_error(u, v, 2.0, lens->R);
  const SuperlensError some = superlens_error(u, v, 2.0, lens->R, {0, 1, 2, 3});
  EXPECT_GT(all.l2_abs, 0.0);
  EXPECT_EQ(some.l2_abs, 0.0);
}
