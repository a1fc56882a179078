// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "hmlens/modal_solver.hpp"
#include "hmlens/rates.hpp"

using namespace hmlens;

namespace
{

// Homogeneous medium: unit object, no lens.
std::shared_ptr<const Scenario> homogeneous(int d, double k, double R,
                                            std::optional<BoundaryKind> bc = std::nullopt)
{
  ScenarioSpec s;
  s.d = d;
  s.k = k;
  s.r1 = 1.0;
  s.r2 = 2.0;
  s.R = R;
  s.boundary = bc;
  s.object.alpha_r = Polynomial::constant(1.0);
  s.object.alpha_t = Polynomial::constant(1.0);
  s.object.sigma = Polynomial::constant(1.0);
  return std::make_shared<const Scenario>(make_scenario(s));
}

RingSource single(int n, AngularBranch b, double center, double width)
{
  RingSource src;
  src.center = center;
  src.width = width;
  src.balance_mode0 = false;
  src.modes.push_back(SourceMode{n, b, 1.0});
  return src;
}

// u(r) = [phi2(r) int_0^r phi1 g + phi1(r) int_r^R phi2 g] / C by fine Simpson quadrature.
template <typename Phi1, typename Phi2>
std::vector<Complex> green_solution(const std::vector<double> &nodes, const RingSource &src,
                                    double weight_power, Phi1 phi1, Phi2 phi2, Complex C)
{
  const double lo = src.support_lo(), hi = src.support_hi();
  const int n = 20000;
  const double dx = (hi - lo) / n;
  std::vector<double> xs(n + 1);
  std::vector<Complex> g1(n + 1), g2(n + 1);
  for (int i = 0; i <= n; ++i)
  {
    const double x = lo + i * dx;
    const double g = src.profile(x) * std::pow(x, weight_power);
    xs[i] = x;
    g1[i] = phi1(x) * g;
    g2[i] = phi2(x) * g;
  }
  auto simpson = [&](const std::vector<Complex> &f, double a, double b) {
    a = std::clamp(a, lo, hi);
    b = std::clamp(b, lo, hi);
    if (b <= a)
    {
      return Complex(0.0);
    }
    const int m = 2 * std::max(1, int(std::ceil((b - a) / dx / 2.0)));
    const double step = (b - a) / m;
    Complex sum = 0.0;
    for (int i = 0; i <= m; ++i)
    {
      const double x = a + i * step;
      // linear interpolation of the tabulated integrand
      const double t = (x - lo) / dx;
      const int j = std::min(n - 1, int(t));
      const Complex v = f[j] + (t - j) * (f[j + 1] - f[j]);
      sum += v * double(i == 0 || i == m ? 1 : (i % 2 ? 4 : 2));
    }
    return sum * step / 3.0;
  };
  std::vector<Complex> u(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
  {
    const double r = nodes[i];
    u[i] = (phi2(r) * simpson(g1, lo, r) + phi1(r) * simpson(g2, r, hi)) / C;
  }
  return u;
}

double rel_max(const std::vector<Complex> &a, const std::vector<Complex> &b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
  {
    num = std::max(num, std::abs(a[i] - b[i]));
    den = std::max(den, std::abs(b[i]));
  }
  return num / den;
}

double dbessel_j(int n, double x)
{
  return n == 0 ? -std::cyl_bessel_j(1, x) : std::cyl_bessel_j(n - 1, x) - n / x * std::cyl_bessel_j(n, x);
}

double dbessel_y(int n, double x)
{
  return n == 0 ? -std::cyl_neumann(1, x) : std::cyl_neumann(n - 1, x) - n / x * std::cyl_neumann(n, x);
}

}  // namespace

TEST(ModalSolver, HelmholtzBesselGreenFunction)
{
  const double k = 1.0, R = 4.0;
  auto s = homogeneous(2, k, R);
  for (int n : {0, 1, 3})
  {
    const RingSource src = single(n, AngularBranch::cosine, 3.0, 0.12);
    const Complex a = -(k * dbessel_y(n, k * R) - kI * k * std::cyl_neumann(n, k * R)) /
                      (k * dbessel_j(n, k * R) - kI * k * std::cyl_bessel_j(n, k * R));
    auto phi1 = [&](double r) { return Complex(std::cyl_bessel_j(n, k * r)); };
    auto phi2 = [&](double r) { return a * std::cyl_bessel_j(n, k * r) + std::cyl_neumann(n, k * r); };
    std::vector<double> hs, errs;
    for (double h : {1.0 / 64.0, 1.0 / 128.0, 1.0 / 256.0})
    {
      const RadialGrid g = RadialGrid::build(R, s->breakpoints(), h);
      const Field f = solve_scenario(s, src, n, g);
      std::vector<double> nodes(g.nodes.begin() + 1, g.nodes.end());
      const auto exact = green_solution(nodes, src, 1.0, phi1, phi2, Complex(2.0 / kPi));
      std::vector<Complex> got(f.modes[0].u.begin() + 1, f.modes[0].u.end());
      hs.push_back(h);
      // mode 0 carries an extra log(1/h) from the axis
      errs.push_back(rel_max(got, exact) / (n == 0 ? std::log(1.0 / h) : 1.0));
    }
    EXPECT_LT(errs.back(), 5e-5) << "mode " << n;
    EXPECT_GT(estimate_rate(hs, errs).slope, 1.8) << "mode " << n;
  }
}

TEST(ModalSolver, LaplaceDirichlet3D)
{
  const double R = 3.0;
  auto s = homogeneous(3, 0.0, R, BoundaryKind::dirichlet);
  for (int n : {0, 2, 5})
  {
    const RingSource src = single(n, AngularBranch::zonal, 2.5, 0.06);
    auto phi1 = [n](double r) { return Complex(std::pow(r, n)); };
    auto phi2 = [n, R](double r) {
      return Complex(std::pow(r, n) - std::pow(R, 2 * n + 1) * std::pow(r, -n - 1));
    };
    const Complex C = (2.0 * n + 1.0) * std::pow(R, 2 * n + 1);
    std::vector<double> hs, errs;
    for (double h : {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0})
    {
      const RadialGrid g = RadialGrid::build(R, s->breakpoints(), h);
      const Field f = solve_scenario(s, src, n, g);
      std::vector<double> nodes(g.nodes.begin() + 1, g.nodes.end());
      const auto exact = green_solution(nodes, src, 2.0, phi1, phi2, C);
      std::vector<Complex> got(f.modes[0].u.begin() + 1, f.modes[0].u.end());
      hs.push_back(h);
      errs.push_back(rel_max(got, exact));
    }
    EXPECT_LT(errs.back(), 2e-4) << "mode " << n;
    EXPECT_GT(estimate_rate(hs, errs).slope, 1.8) << "mode " << n;
  }
}

TEST(ModalSolver, AngularWeightsByQuadrature)
{
  for (int n : {0, 1, 4})
  {
    for (auto b : {AngularBranch::cosine, AngularBranch::sine})
    {
      if (n == 0 && b == AngularBranch::sine)
      {
        continue;
      }
      ModeIndex m{2, n, b};
      double sum = 0.0;
      const int N = 4096;
      for (int j = 0; j < N; ++j)
      {
        const double y = m.angular(2.0 * kPi * j / N);
        sum += y * y;
      }
      EXPECT_NEAR(m.angular_weight(), sum * 2.0 * kPi / N, 1e-10);
    }
    ModeIndex z{3, n, AngularBranch::zonal};
    double sum = 0.0;
    const int N = 20000;
    for (int j = 0; j < N; ++j)
    {
      const double th = kPi * (j + 0.5) / N;
      const double y = z.angular(th);
      sum += y * y * std::sin(th);
    }
    EXPECT_NEAR(z.angular_weight(), 2.0 * kPi * sum * kPi / N, 1e-6);
    EXPECT_DOUBLE_EQ(z.mu(), double(n) * (n + 1));
  }
}

TEST(ModalSolver, GridContainsBreakpoints)
{
  const RadialGrid g = RadialGrid::build(3.5, {1.0, 1.5, 2.0}, 0.3);
  EXPECT_DOUBLE_EQ(g.nodes.front(), 0.0);
  EXPECT_DOUBLE_EQ(g.nodes.back(), 3.5);
  EXPECT_LE(g.max_spacing, 0.3 + 1e-15);
  EXPECT_DOUBLE_EQ(g.nodes[g.node_index(1.5)], 1.5);
  EXPECT_THROW(g.node_index(1.51), DomainError);
  for (std::size_t i = 1; i < g.nodes.size(); ++i)
  {
    EXPECT_GT(g.nodes[i], g.nodes[i - 1]);
  }
}

namespace
{

std::shared_ptr<const Scenario> lens(double delta, double k)
{
  ScenarioSpec s;
  s.d = 2;
  s.k = k;
  s.delta = delta;
  s.r1 = 1.0;
  s.r2 = 2.0;
  s.R = 3.5;
  s.scheme = SchemeTag::scheme2;
  return std::make_shared<const Scenario>(make_scenario(s));
}

RingSource multi()
{
  RingSource src;
  src.center = 2.75;
  src.width = 0.08;
  for (int n = 0; n <= 6; ++n)
  {
    src.modes.push_back(SourceMode{n, n % 2 ? AngularBranch::sine : AngularBranch::cosine, 1.0});
  }
  return src;
}

}  // namespace

TEST(ModalSolver, PowerBalanceAndFluxContinuity)
{
  for (double k : {0.0, 1.0})
  {
    auto s = lens(1e-3, k);
    const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 128.0);
    const Field f = solve_scenario(s, multi(), 8, g);
    EXPECT_LT(power_balance_residual(f, multi()), 1e-8);
    EXPECT_LT(flux_continuity_defect(f), 1e-12);
  }
}

TEST(ModalSolver, ThreadCountDoesNotChangeResult)
{
  auto s = lens(1e-2, 1.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 64.0);
  const Field a = solve_scenario(s, multi(), 8, g, 1);
  const Field b = solve_scenario(s, multi(), 8, g, 3);
  ASSERT_EQ(a.modes.size(), b.modes.size());
  for (std::size_t m = 0; m < a.modes.size(); ++m)
  {
    EXPECT_EQ(a.modes[m].u, b.modes[m].u);
  }
}

TEST(ModalSolver, PreconditionsRaiseDomainError)
{
  auto s = lens(1e-2, 0.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 32.0);
  EXPECT_THROW(solve_scenario(s, multi(), 3, g), DomainError);
  EXPECT_THROW(solve_scenario(lens(0.0, 0.0), multi(), 8, g), DomainError);
}

TEST(ModalSolver, SynthesisMatchesModes)
{
  auto s = lens(1e-2, 1.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 64.0);
  const Field f = solve_scenario(s, multi(), 8, g);
  const double r = g.nodes[150], th = 0.7;
  Complex sum = 0.0;
  for (const auto &m : f.modes)
  {
    sum += m.u[150] * m.mode.angular(th);
  }
  EXPECT_NEAR(std::abs(f.evaluate(r, th) - sum), 0.0, 1e-12);
  EXPECT_EQ(f.find(ModeIndex{2, 7, AngularBranch::cosine}), nullptr);
}

TEST(ModalSolver, CsvHeaders)
{
  auto s = lens(1e-2, 1.0);
  const RadialGrid g = RadialGrid::build(s->R, s->breakpoints(), 1.0 / 16.0);
  const Field f = solve_scenario(s, multi(), 8, g);
  std::ostringstream a, b;
  write_mode_csv(a, f);
  write_field_csv(b, f, 8, 2);
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')), "mode_n,r,re_u,im_u,re_flux,im_flux");
  EXPECT_EQ(b.str().substr(0, b.str().find('\n')), "r,theta,re_u,im_u");
}

TEST(ModalSolver, ParallelForVisitsEveryIndexOnce)
{
  std::vector<int> hits(101, 0);
  parallel_for(hits.size(), 4, [&](std::size_t i) { hits[i] += 1; });
  for (int h : hits)
  {
    EXPECT_EQ(h, 1);
  }
}
