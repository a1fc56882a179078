// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "hmlens/rates.hpp"
#include "hmlens/toy.hpp"

using namespace hmlens;

namespace
{

ToySource toy_ring(double center, int m_hi)
{
  ToySource s;
  s.center = center;
  s.width = 0.1;
  for (int m = 1; m <= m_hi; ++m)
  {
    s.modes.push_back(ToySourceMode{m, 1.0});
  }
  return s;
}

ToyConfig tuned_config(int n2 = 128)
{
  ToyConfig c;
  c.l = 0.5 * kPi;
  c.T = 2.0 * kPi;
  c.L = 2.5 * kPi;
  c.delta = 1e-3;
  c.n2 = n2;
  c.sources = {toy_ring(-0.25 * kPi, 3), toy_ring(2.25 * kPi, 3)};
  return c;
}

}  // namespace

TEST(Toy, GenericFdManufacturedSolution)
{
  const double x_lo = 0.5;
  const double Lx = 2.0;
  std::vector<double> hs, errs;
  for (int n2 : {32, 64, 128})
  {
    const double h = 2.0 * kPi / n2;
    const int n1 = static_cast<int>(std::lround(Lx / h));
    const double len = n1 * h;
    const double w = kPi / len;
    auto exact = [&](double x, double y) { return std::sin(w * (x - x_lo)) * std::sin(2.0 * y); };
    auto coef = [](double x, double) {
      return ToyCoefficients{Complex(2.0 + x, 0.1), Complex(2.0 + x, 0.1)};
    };
    auto f = [&](double x, double y) {
      const Complex a(2.0 + x, 0.1);
      const double ux = w * std::cos(w * (x - x_lo)) * std::sin(2.0 * y);
      return ux + a * (-(w * w) - 4.0) * exact(x, y);
    };
    const ToyField u = toy_fd_generic(x_lo, n1, n2, coef, f);
    double err = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < u.x1.size(); ++i)
    {
      for (std::size_t j = 0; j < u.x2.size(); ++j)
      {
        err = std::max(err, std::abs(u.at(i, j) - exact(u.x1[i], u.x2[j])));
        scale = std::max(scale, std::abs(exact(u.x1[i], u.x2[j])));
      }
    }
    hs.push_back(h);
    errs.push_back(err / scale);
  }
  EXPECT_LT(errs.back(), 1e-3);
  EXPECT_GT(estimate_rate(hs, errs).slope, 1.8);
}

TEST(Toy, ValidateRejectsBadConfigs)
{
  ToyConfig c = tuned_config();
  EXPECT_NO_THROW(c.validate());
  EXPECT_TRUE(c.tuned());

  ToyConfig off = c;
  off.l = 0.3;  // not a multiple of h
  EXPECT_THROW(off.validate(), DomainError);

  ToyConfig inside = c;
  inside.sources = {toy_ring(kPi, 2)};  // source in R_c
  EXPECT_THROW(inside.validate(), DomainError);

  ToyConfig lossy = c;
  lossy.delta = -1.0;
  EXPECT_THROW(lossy.validate(), DomainError);

  ToyConfig half = c;
  half.basis = ToyBasis::complete;
  EXPECT_FALSE(half.tuned());
  half.T = 4.0 * kPi;
  half.L = 4.5 * kPi;
  half.sources = {toy_ring(-0.25 * kPi, 3), toy_ring(4.25 * kPi, 3)};
  EXPECT_TRUE(half.tuned());
}

TEST(Toy, ModalAgreesWithFd)
{
  ToyConfig c = tuned_config(128);
  const ToyField fd = toy_solve_fd(c);
  const ToyField modal = toy_synthesize(c, toy_solve_modal(c));
  ASSERT_EQ(fd.values.size(), modal.values.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < fd.values.size(); ++i)
  {
    num += std::norm(fd.values[i] - modal.values[i]);
    den += std::norm(fd.values[i]);
  }
  EXPECT_LT(std::sqrt(num / den), 1e-2);
}

TEST(Toy, ShiftedReferenceAndLimit)
{
  ToyConfig c = tuned_config(256);
  const ToyShiftError e = toy_shift_compare(toy_solve_fd(c), toy_reference(c), c);
  EXPECT_LT(e.err_l, 1e-2);
  EXPECT_LT(e.err_r, 1e-2);
  const ToyLimit lim = toy_limit_modal(c);
  EXPECT_LT(lim.energy_deviation, 1e-10);
  EXPECT_LT(lim.stitch_residual_0, 1e-8);
  EXPECT_LT(lim.stitch_residual_T, 1e-8);
}

TEST(Toy, UntunedGrowsTunedStaysBounded)
{
  ToyConfig c;
  c.l = 0.5 * kPi;
  c.T = kPi;
  c.L = 1.5 * kPi;
  c.basis = ToyBasis::complete;
  c.sources = {toy_ring(-0.25 * kPi, 5), toy_ring(1.25 * kPi, 5)};
  const InstabilityReport bad = instability_probe(c, {1e-2, 1e-3, 1e-4});
  EXPECT_GE(bad.ratio, 10.0);
  EXPECT_GT(bad.growth_exponent, 0.5);

  const InstabilityReport good = instability_probe(tuned_config(), {1e-2, 1e-3, 1e-4});
  EXPECT_LE(good.max_min_ratio, 2.0);
}

TEST(Toy, FieldHelpersAndCsv)
{
  ToyConfig c = tuned_config(64);
  const ToyField u = toy_solve_fd(c);
  EXPECT_NEAR(u.x1[u.index_of(0.0)], 0.0, 1e-12);
  EXPECT_GT(u.h1_norm(), 0.0);
  // zero Dirichlet rows
  for (std::size_t j = 0; j < u.x2.size(); ++j)
  {
    EXPECT_EQ(u.at(0, j), Complex(0.0));
  }
  std::ostringstream os;
  write_toy_csv(os, u, 4);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "x1,x2,re_u,im_u");
}
