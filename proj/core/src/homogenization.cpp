// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/homogenization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hmlens/rates.hpp"

namespace hmlens
{

namespace
{

void require(bool cond, const std::string &message)
{
  if (!cond)
  {
    throw DomainError(message);
  }
}

Profile over_r2(Complex c)
{
  return [c](double r) { return c / (r * r); };
}

Profile constant(Complex c)
{
  return [c](double) { return c; };
}

Complex harmonic(double theta, Complex p1, Complex p2)
{
  if (p1 == 0.0 || p2 == 0.0)
  {
    throw DomainError("zero phase value in the harmonic mean");
  }
  return 1.0 / (theta / p1 + (1.0 - theta) / p2);
}

// Phase boundaries of chi(r / eps) strictly inside (a, b), with slivers removed.
std::vector<double> band_edges(double a, double b, double eps, double theta)
{
  std::vector<double> cuts;
  const double tol = 1e-9 * eps;
  const long k0 = static_cast<long>(std::floor(a / eps)) - 1;
  const long k1 = static_cast<long>(std::ceil(b / eps)) + 1;
  for (long k = k0; k <= k1; ++k)
  {
    for (double x : {k * eps, (k + theta) * eps})
    {
      if (x > a + tol && x < b - tol)
      {
        cuts.push_back(x);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<double> edges{a};
  for (double x : cuts)
  {
    if (x - edges.back() > tol)
    {
      edges.push_back(x);
    }
  }
  edges.push_back(b);
  return edges;
}

double rel_diff_modes(const Field &a, const Field &b)
{
  double num = 0.0, den = 0.0;
  for (const auto &ma : a.modes)
  {
    const ModeSolution *mb = b.find(ma.mode);
    for (std::size_t i = 0; i < ma.u.size(); ++i)
    {
      const Complex ub = mb ? mb->u[i] : Complex(0.0);
      num = std::max(num, std::abs(ma.u[i] - ub));
      den = std::max(den, std::abs(ub));
    }
  }
  return den > 0.0 ? num / den : num;
}

}  // namespace

LaminateSpec LaminateSpec::preset(Shell shell, double r1, double r2, double eps, double delta)
{
  require(0.0 < r1 && r1 < r2, "laminate preset requires 0 < r1 < r2");
  require(eps > 0.0, "laminate period must be positive");
  require(delta >= 0.0, "loss delta must be non-negative");
  const double rm = 0.5 * (r1 + r2);
  const Complex loss(0.0, delta);
  LaminateSpec lam;
  lam.shell = shell;
  lam.eps = eps;
  lam.delta = delta;
  lam.theta = 0.5;
  if (shell == Shell::outer)
  {
    lam.r_lo = rm;
    lam.r_hi = r2;
    lam.b1_one = over_r2(-1.0 - loss);
    lam.b1_zero = over_r2(1.0 / 3.0);
    lam.b2_one = constant(-3.0 - loss);
    lam.b2_zero = constant(1.0);
  }
  else
  {
    lam.r_lo = r1;
    lam.r_hi = rm;
    lam.b1_one = over_r2(-1.0 / 3.0 - loss);
    lam.b1_zero = over_r2(1.0);
    lam.b2_one = constant(-1.0 - loss);
    lam.b2_zero = constant(3.0);
  }
  return lam;
}

bool LaminateSpec::phase_one(double r) const
{
  const double x = r / eps;
  return x - std::floor(x) < theta;
}

Complex LaminateSpec::b1(double r) const
{
  return phase_one(r) ? b1_one(r) : b1_zero(r);
}

Complex LaminateSpec::b2(double r) const
{
  return phase_one(r) ? b2_one(r) : b2_zero(r);
}

EffectiveCoefficients effective_coefficients(const LaminateSpec &lam)
{
  require(lam.theta > 0.0 && lam.theta < 1.0, "volume fraction theta must lie in (0, 1)");
  require(lam.b1_one && lam.b1_zero && lam.b2_one && lam.b2_zero, "laminate phase missing");
  for (int j = 0; j <= 16; ++j)
  {
    const double r = lam.r_lo + (lam.r_hi - lam.r_lo) * j / 16.0;
    harmonic(lam.theta, lam.b1_one(r), lam.b1_zero(r));
  }
  const double theta = lam.theta;
  auto p1 = lam.b1_one, p2 = lam.b1_zero, q1 = lam.b2_one, q2 = lam.b2_zero;
  return EffectiveCoefficients{
      [theta, p1, p2](double r) { return harmonic(theta, p1(r), p2(r)); },
      [theta, q1, q2](double r) { return theta * q1(r) + (1.0 - theta) * q2(r); }};
}

CoefficientTriple closed_form_effective(Shell shell, double r, double delta)
{
  const Complex id(0.0, delta);
  if (shell == Shell::outer)
  {
    return CoefficientTriple{2.0 * (1.0 + id) / (r * r * (2.0 + 3.0 * id)), -1.0 - 0.5 * id, 0.0};
  }
  return CoefficientTriple{(-2.0 / 3.0 - 2.0 * id) / (r * r * (2.0 / 3.0 - id)), 1.0 - 0.5 * id,
                           0.0};
}

ClosedFormCheck closed_form_check(double delta, double r1, double r2)
{
  require(delta > 0.0 && delta < 1.0, "closed_form_check requires delta in (0, 1)");
  ClosedFormCheck out;
  const int samples = 33;
  for (Shell shell : {Shell::outer, Shell::inner})
  {
    const auto eff = effective_coefficients(LaminateSpec::preset(shell, r1, r2, 0.1, delta));
    const auto lim = effective_coefficients(LaminateSpec::preset(shell, r1, r2, 0.1, 0.0));
    const auto e2 = effective_coefficients(LaminateSpec::preset(shell, r1, r2, 0.1, 1e-2));
    const auto e3 = effective_coefficients(LaminateSpec::preset(shell, r1, r2, 0.1, 1e-3));
    const double sign = shell == Shell::outer ? 1.0 : -1.0;
    const double lo = shell == Shell::outer ? 0.5 * (r1 + r2) : r1;
    const double hi = shell == Shell::outer ? r2 : 0.5 * (r1 + r2);
    for (int j = 0; j < samples; ++j)
    {
      const double r = lo + (hi - lo) * j / (samples - 1.0);
      const auto cf = closed_form_effective(shell, r, delta);
      out.max_deviation = std::max({out.max_deviation, std::abs(r * r * (eff.b1H(r) - cf.b1)),
                                    std::abs(eff.b2H(r) - cf.b2)});
      // Ideal tensor: r^2 b1 = +-1, b2 = -+1.
      out.limit_deviation = std::max({out.limit_deviation, std::abs(r * r * lim.b1H(r) - sign),
                                      std::abs(lim.b2H(r) + sign)});
      auto extrap = [](Complex f2, Complex f3) { return (1e-2 * f3 - 1e-3 * f2) / (1e-2 - 1e-3); };
      out.extrapolated_deviation =
          std::max({out.extrapolated_deviation,
                    std::abs(extrap(r * r * e2.b1H(r), r * r * e3.b1H(r)) - sign),
                    std::abs(extrap(e2.b2H(r), e3.b2H(r)) + sign)});
    }
  }

  // Remainders of the first-order expansions at r = r_m.
  const std::vector<double> ds{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  std::vector<double> rem_out, rem_in;
  for (double d : ds)
  {
    const Complex id(0.0, d);
    const Complex ho = effective_coefficients(LaminateSpec::preset(Shell::outer, r1, r2, 0.1, d))
                           .b1H(0.5 * (r1 + r2));
    const Complex hi = effective_coefficients(LaminateSpec::preset(Shell::inner, r1, r2, 0.1, d))
                           .b1H(0.5 * (r1 + r2));
    const double rm2 = 0.25 * (r1 + r2) * (r1 + r2);
    rem_out.push_back(std::abs(rm2 * ho - (1.0 - 0.5 * id)));
    rem_in.push_back(std::abs(rm2 * hi - (-1.0 - 4.5 * id)));
  }
  out.outer_remainder_slope = estimate_rate(ds, rem_out).slope;
  out.inner_remainder_slope = estimate_rate(ds, rem_in).slope;
  for (std::size_t i = 0; i < ds.size(); ++i)
  {
    out.outer_remainder_constant = std::max(out.outer_remainder_constant, rem_out[i] / (ds[i] * ds[i]));
    out.inner_remainder_constant = std::max(out.inner_remainder_constant, rem_in[i] / (ds[i] * ds[i]));
  }
  return out;
}

double laminate_spacing(double h_base, double eps)
{
  return std::min(h_base, eps / 8.0);
}

Scenario laminate_scenario(const ScenarioSpec &spec, double eps, double theta,
                           std::size_t node_budget)
{
  require(spec.d == 3, "the laminate lens is three-dimensional");
  require(eps > 0.0 && std::isfinite(eps), "laminate period must be positive");
  require(theta > 0.0 && theta < 1.0, "volume fraction theta must lie in (0, 1)");
  const double R = spec.domain_radius();
  const double estimate = R / (eps / 8.0);
  if (!(estimate < static_cast<double>(node_budget)))
  {
    std::ostringstream os;
    os << "laminate period " << eps << " needs about " << estimate << " nodes, above the budget of "
       << node_budget;
    throw DomainError(os.str());
  }

  std::vector<LayerSpec> lens;
  for (Shell shell : {Shell::inner, Shell::outer})
  {
    LaminateSpec lam = LaminateSpec::preset(shell, spec.r1, spec.r2, eps, spec.delta);
    lam.theta = theta;
    const auto edges = band_edges(lam.r_lo, lam.r_hi, eps, theta);
    for (std::size_t j = 0; j + 1 < edges.size(); ++j)
    {
      const bool one = lam.phase_one(0.5 * (edges[j] + edges[j + 1]));
      lens.push_back(LayerSpec{edges[j], edges[j + 1], one ? lam.b1_one : lam.b1_zero,
                               one ? lam.b2_one : lam.b2_zero, constant(Complex(0.0, spec.delta)),
                               LayerKind::lens});
    }
  }
  ScenarioSpec s = spec;
  s.scheme = SchemeTag::scheme2;
  s.variant = LensVariant::laminate;
  s.laminate_eps = eps;
  s.laminate_theta = theta;
  return assemble_scenario(s, std::move(lens));
}

Scenario homogenized_scenario(const ScenarioSpec &spec, EffectiveSource from)
{
  require(spec.d == 3, "the laminate lens is three-dimensional");
  std::vector<LayerSpec> lens;
  for (Shell shell : {Shell::inner, Shell::outer})
  {
    const LaminateSpec lam = LaminateSpec::preset(shell, spec.r1, spec.r2, 1.0, spec.delta);
    Profile b1, b2;
    if (from == EffectiveSource::harmonic_means)
    {
      auto eff = effective_coefficients(lam);
      b1 = eff.b1H;
      b2 = eff.b2H;
    }
    else
    {
      const double delta = spec.delta;
      b1 = [shell, delta](double r) { return closed_form_effective(shell, r, delta).b1; };
      b2 = [shell, delta](double r) { return closed_form_effective(shell, r, delta).b2; };
    }
    lens.push_back(LayerSpec{lam.r_lo, lam.r_hi, b1, b2, constant(Complex(0.0, spec.delta)),
                             LayerKind::lens});
  }
  ScenarioSpec s = spec;
  s.scheme = SchemeTag::scheme2;
  s.variant = LensVariant::homogenized;
  return assemble_scenario(s, std::move(lens));
}

ConvergenceReport homogenization_convergence(const ScenarioSpec &base,
                                             const std::vector<double> &eps_list,
                                             const std::vector<int> &modes,
                                             const RingSource &source, double h_base,
                                             int threads)
{
  require(base.delta > 0.0, "homogenization sweeps need delta > 0");
  require(!eps_list.empty(), "empty epsilon list");
  require(!modes.empty(), "empty mode list");
  const int n_cap = *std::max_element(modes.begin(), modes.end());
  RingSource src = source;
  std::vector<SourceMode> kept;
  for (const auto &m : source.modes)
  {
    if (std::find(modes.begin(), modes.end(), m.n) != modes.end())
    {
      kept.push_back(m);
    }
  }
  src.modes = kept;

  struct Point
  {
    std::size_t nodes = 0;
    std::vector<HomogenizationRow> rows;
    double cf_diff = 0.0;
    double power = 0.0;
  };
  std::vector<Point> points(eps_list.size());

  parallel_for(eps_list.size(), threads, [&](std::size_t e) {
    const double eps = eps_list[e];
    auto lam = std::make_shared<const Scenario>(laminate_scenario(base, eps));
    auto hom = std::make_shared<const Scenario>(homogenized_scenario(base));
    auto cf = std::make_shared<const Scenario>(
        homogenized_scenario(base, EffectiveSource::closed_form));
    const RadialGrid grid =
        RadialGrid::build(lam->R, lam->breakpoints(), laminate_spacing(h_base, eps));
    const Field u_eps = solve_scenario(lam, src, n_cap, grid, 1);
    const Field u_h = solve_scenario(hom, src, n_cap, grid, 1);
    const Field u_cf = solve_scenario(cf, src, n_cap, grid, 1);
    points[e].nodes = grid.nodes.size();
    points[e].cf_diff = rel_diff_modes(u_h, u_cf);
    points[e].power = std::max(power_balance_residual(u_eps, src), power_balance_residual(u_h, src));

    const std::size_t i1 = grid.node_index(base.r1), i2 = grid.node_index(base.r2);
    const std::size_t iR = grid.nodes.size() - 1;
    for (int n : modes)
    {
      HomogenizationRow row;
      row.mode = n;
      row.eps = eps;
      row.nodes = grid.nodes.size();
      const ModeIndex mi{3, n, AngularBranch::zonal};
      const ModeSolution *me = u_eps.find(mi);
      const ModeSolution *mh = u_h.find(mi);
      if (me && mh)
      {
        const double w = mi.angular_weight();
        ModeSolution diff = *me;
        for (std::size_t i = 0; i < diff.u.size(); ++i)
        {
          diff.u[i] = me->u[i] - mh->u[i];
        }
        const double ref = std::sqrt(w * mode_l2_squared(*mh, 3, 0, iR));
        const double err = std::sqrt(w * mode_l2_squared(diff, 3, 0, iR));
        row.l2_error = ref > 0.0 ? err / ref : err;
        double flux2 = 0.0, grad2 = 0.0;
        for (std::size_t c = i1; c < i2; ++c)
        {
          const double hc = grid.nodes[c + 1] - grid.nodes[c];
          const double rc = 0.5 * (grid.nodes[c] + grid.nodes[c + 1]);
          const Complex ge = (me->u[c + 1] - me->u[c]) / hc;
          const Complex gh = (mh->u[c + 1] - mh->u[c]) / hc;
          flux2 += hc * rc * rc * std::norm(me->flux_mid[c] - mh->flux_mid[c]);
          grad2 += hc * rc * rc * std::norm(ge - gh);
        }
        row.flux_error = std::sqrt(w * flux2);
        row.grad_error = std::sqrt(w * grad2);
        row.h1_norm =
            std::sqrt(w * (mode_l2_squared(*me, 3, 0, iR) + mode_h1_squared(*me, 3, 0, iR)));
      }
      points[e].rows.push_back(row);
    }
  });

  ConvergenceReport rep;
  rep.abscissae = eps_list;
  rep.modes = modes;
  for (const auto &p : points)
  {
    rep.harmonic_vs_closed_form = std::max(rep.harmonic_vs_closed_form, p.cf_diff);
    rep.max_power_balance = std::max(rep.max_power_balance, p.power);
  }
  for (std::size_t k = 0; k < modes.size(); ++k)
  {
    std::vector<double> errs;
    for (std::size_t e = 0; e < eps_list.size(); ++e)
    {
      rep.rows.push_back(points[e].rows[k]);
      errs.push_back(points[e].rows[k].l2_error);
    }
    const bool fit = eps_list.size() >= 3 &&
                     std::all_of(errs.begin(), errs.end(), [](double x) { return x > 0.0; });
    rep.l2_rates.push_back(fit ? estimate_rate(eps_list, errs).slope : 0.0);
  }
  return rep;
}

}  // namespace hmlens
