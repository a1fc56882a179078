// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "hmlens/oracle.hpp"
#include "hmlens/rates.hpp"

using namespace hmlens;

namespace
{

std::shared_ptr<const Scenario> lens(double k)
{
  ScenarioSpec s;
  s.d = 2;
  s.k = k;
  s.delta = 1e-2;
  s.r1 = 1.0;
  s.r2 = 2.0;
  s.R = 3.5;
  s.scheme = SchemeTag::scheme2;
  return std::make_shared<const Scenario>(make_scenario(s));
}

RingSource ring(int n_hi)
{
  RingSource src;
  src.center = 2.75;
  src.width = 0.08;
  for (int n = 0; n <= n_hi; ++n)
  {
    src.modes.push_back(SourceMode{n, AngularBranch::cosine, 1.0});
  }
  return src;
}

}  // namespace

TEST(Oracle, SpectrumMatchesNaiveDftAndParseval)
{
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  const int N = 24;
  std::vector<Complex> trace(N);
  for (auto &v : trace)
  {
    v = Complex(g(rng), g(rng));
  }
  const auto c = angular_spectrum(trace);
  ASSERT_EQ(c.size(), std::size_t(N));
  double energy = 0.0, spec = 0.0;
  for (int n = 0; n < N; ++n)
  {
    Complex naive = 0.0;
    for (int j = 0; j < N; ++j)
    {
      naive += trace[j] * std::exp(Complex(0.0, -2.0 * kPi * n * j / N));
    }
    EXPECT_NEAR(std::abs(c[n] - naive / double(N)), 0.0, 1e-13);
    energy += std::norm(trace[n]);
    spec += std::norm(c[n]);
  }
  EXPECT_NEAR(energy / N, spec, 1e-12);
}

TEST(Oracle, MatchedGridRules)
{
  const RadialGrid g = RadialGrid::build(3.5, {1.0, 2.0}, 0.1);
  EXPECT_THROW(PolarGrid::matched(g, 7), DomainError);
  EXPECT_THROW(PolarGrid::matched(g, 2), DomainError);
  const PolarGrid p = PolarGrid::matched(g, 16);
  EXPECT_DOUBLE_EQ(p.theta(4), kPi / 2.0);
}

TEST(Oracle, AgreesWithModalAndConverges)
{
  for (double k : {0.0, 1.0})
  {
    auto s = lens(k);
    std::vector<double> hs, diffs;
    for (int level : {16, 32, 64})
    {
      const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / level);
      const Field modal = solve_scenario(s, ring(3), 3, g);
      const PolarField fd = fd_polar_solve(*s, ring(3), PolarGrid::matched(g, 2 * level));
      EXPECT_LT(fd.power_balance, 1e-8);
      hs.push_back(1.0 / level);
      diffs.push_back(oracle_modal_difference(fd, modal));
    }
    EXPECT_LT(diffs.back(), 1e-2) << "k = " << k;
    EXPECT_GT(estimate_rate(hs, diffs).slope, 1.5) << "k = " << k;
  }
}

TEST(Oracle, SingleModeSourceStaysInItsMode)
{
  auto s = lens(1.0);
  RingSource src;
  src.center = 2.75;
  src.width = 0.08;
  src.modes = {SourceMode{3, AngularBranch::cosine, 1.0}};
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 32.0);
  const PolarField fd = fd_polar_solve(*s, src, PolarGrid::matched(g, 32));
  const auto c = angular_spectrum(fd, g.node_index(2.0));
  double leak = 0.0, total = 0.0;
  for (int n = 0; n < 32; ++n)
  {
    total += std::norm(c[n]);
    leak += (n == 3 || n == 29) ? 0.0 : std::norm(c[n]);
  }
  EXPECT_LT(std::sqrt(leak / total), 1e-10);
}

TEST(Oracle, RadialObjectFieldReproducesDefault)
{
  auto s = lens(1.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 16.0);
  const PolarGrid p = PolarGrid::matched(g, 16);
  const PolarField a = fd_polar_solve(*s, ring(2), p);
  const PolarField b = fd_polar_solve(*s, ring(2), p, [](double, double) {
    return CoefficientTriple{2.0, 2.0, 1.0};
  });
  ASSERT_EQ(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < a.values.size(); ++i)
  {
    EXPECT_NEAR(std::abs(a.values[i] - b.values[i]), 0.0, 1e-12);
  }
}

TEST(Oracle, AngularObjectCouplesModes)
{
  auto s = lens(1.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 16.0);
  RingSource src;
  src.center = 2.75;
  src.width = 0.08;
  src.modes = {SourceMode{1, AngularBranch::cosine, 1.0}};
  const PolarField fd = fd_polar_solve(*s, src, PolarGrid::matched(g, 16), [](double, double th) {
    const double a = 2.0 + 0.5 * std::cos(2.0 * th);
    return CoefficientTriple{a, a, 1.0};
  });
  const auto c = angular_spectrum(fd, g.node_index(2.0));
  EXPECT_GT(std::abs(c[3]), 1e-8);
}

TEST(Oracle, RejectsThreeDimensions)
{
  ScenarioSpec spec;
  spec.d = 3;
  spec.delta = 1e-2;
  spec.scheme = SchemeTag::scheme2;
  const Scenario s = make_scenario(spec);
  const RadialGrid g = RadialGrid::build(s.R, s.breakpoints(), 0.1);
  EXPECT_THROW(fd_polar_solve(s, ring(1), PolarGrid::matched(g, 8)), DomainError);
}

TEST(Oracle, CsvHeader)
{
  auto s = lens(0.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 8.0);
  const PolarField fd = fd_polar_solve(*s, ring(1), PolarGrid::matched(g, 8));
  std::ostringstream os;
  write_polar_csv(os, fd, 2);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "r,theta,re_u,im_u");
}
