// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/limit_solutions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hmlens
{

Complex ModeTransport::v(double r) const
{
  const double s = r - r2;
  if (kappa > 0.0)
  {
    const double lam = std::sqrt(kappa);
    return value * std::cos(lam * s) + slope * (std::sin(lam * s) / lam);
  }
  if (kappa < 0.0)
  {
    const double gam = std::sqrt(-kappa);
    return value * std::cosh(gam * s) + slope * (std::sinh(gam * s) / gam);
  }
  return value + slope * s;
}

Complex ModeTransport::dv(double r) const
{
  const double s = r - r2;
  if (kappa > 0.0)
  {
    const double lam = std::sqrt(kappa);
    return -value * (lam * std::sin(lam * s)) + slope * std::cos(lam * s);
  }
  if (kappa < 0.0)
  {
    const double gam = std::sqrt(-kappa);
    return value * (gam * std::sinh(gam * s)) + slope * std::cosh(gam * s);
  }
  return slope;
}

double ModeTransport::energy(double r) const
{
  return std::norm(dv(r)) + kappa * std::norm(v(r));
}

double ModeTransport::growth(double span) const
{
  return kappa < 0.0 ? std::cosh(std::sqrt(-kappa) * span) : 1.0;
}

double lens_kappa(const Scenario &s, const ModeIndex &mode)
{
  const double mu = mode.mu();
  switch (s.scheme)
  {
    case SchemeTag::scheme1_2d:
      return mu;
    case SchemeTag::scheme1_3d_k:
      return mu + 0.25;
    case SchemeTag::scheme2:
      if (s.scheme2_sigma == Scheme2Sigma::inverse_square && s.d == 2 && s.k > 0.0)
      {
        throw DomainError("the literal scheme-2 zeroth-order term has no closed-form transport");
      }
      return mu + s.k * s.k;
    case SchemeTag::none:
      break;
  }
  throw DomainError("scenario has no lens");
}

Field solve_reference(std::shared_ptr<const Scenario> s, const RingSource &source, int n_max,
                      const RadialGrid &grid, int threads)
{
  if (!s || s->has_lens())
  {
    throw DomainError("reference solves need a lens-free scenario");
  }
  return solve_scenario(std::move(s), source, n_max, grid, threads);
}

namespace
{

LimitConstruction construct(const Field &ref, std::shared_ptr<const Scenario> s,
                            const RadialGrid &lens_grid, bool reflect, double cap)
{
  if (!ref.scenario || ref.scenario->has_lens())
  {
    throw DomainError("reference field must come from a lens-free scenario");
  }
  const Scenario &rs = *ref.scenario;
  if (rs.d != s->d || rs.r1 != s->r1 || rs.r2 != s->r2 || rs.R != s->R)
  {
    throw DomainError("reference and lens scenarios disagree on geometry");
  }
  const double r1 = s->r1, r2 = s->r2;
  const double rsum = r1 + r2;
  const std::size_t i2 = ref.grid.node_index(r2);
  const std::size_t l1 = lens_grid.node_index(r1);
  const std::size_t l2 = lens_grid.node_index(r2);
  const auto &rn = ref.grid.nodes;

  LimitConstruction lc;
  lc.transport.scheme = s->scheme;
  lc.u0.scenario = s;

  std::vector<double> &nodes = lc.u0.grid.nodes;
  for (std::size_t j = 0; j < i2; ++j)
  {
    nodes.push_back(rn[j] * (r1 / r2));
  }
  nodes.push_back(r1);
  for (std::size_t j = l1 + 1; j < l2; ++j)
  {
    nodes.push_back(lens_grid.nodes[j]);
  }
  const std::size_t j2 = nodes.size();
  for (std::size_t j = i2; j < rn.size(); ++j)
  {
    nodes.push_back(rn[j]);
  }
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j)
  {
    lc.u0.grid.max_spacing = std::max(lc.u0.grid.max_spacing, nodes[j + 1] - nodes[j]);
  }

  for (const auto &m : ref.modes)
  {
    ModeTransport t;
    t.mode = m.mode;
    t.kappa = lens_kappa(*s, m.mode);
    t.r2 = r2;
    t.value = m.u[i2];
    t.slope = m.flux_hi[i2];
    if (reflect && t.growth(r2 - s->r_m()) > cap)
    {
      lc.dropped_modes.push_back(m.mode.n);
      continue;
    }

    // lens value and flux (p u') at radius r
    auto lens_u = [&](double r) { return reflect && r < s->r_m() ? t.v(rsum - r) : t.v(r); };
    auto lens_f = [&](double r) { return reflect && r < s->r_m() ? t.dv(rsum - r) : t.dv(r); };

    ModeSolution ms;
    ms.mode = m.mode;
    ms.r = nodes;
    ms.u.resize(nodes.size());
    ms.flux_lo.resize(nodes.size());
    ms.flux_hi.resize(nodes.size());
    for (std::size_t j = 0; j <= i2; ++j)
    {
      ms.u[j] = m.u[j];
      ms.flux_lo[j] = m.flux_lo[j];
      ms.flux_hi[j] = m.flux_hi[j];
    }
    ms.flux_hi[i2] = lens_f(r1);
    for (std::size_t j = i2 + 1; j < j2; ++j)
    {
      ms.u[j] = lens_u(nodes[j]);
      ms.flux_lo[j] = ms.flux_hi[j] = lens_f(nodes[j]);
    }
    for (std::size_t j = j2; j < nodes.size(); ++j)
    {
      ms.u[j] = m.u[i2 + (j - j2)];
      ms.flux_lo[j] = m.flux_lo[i2 + (j - j2)];
      ms.flux_hi[j] = m.flux_hi[i2 + (j - j2)];
    }
    ms.flux_lo[j2] = lens_f(r2);
    ms.flux_mid.resize(nodes.size() - 1);
    for (std::size_t c = 0; c + 1 < nodes.size(); ++c)
    {
      ms.flux_mid[c] = 0.5 * (ms.flux_hi[c] + ms.flux_lo[c + 1]);
    }

    if (reflect)
    {
      lc.gluing_value = std::max(lc.gluing_value, std::abs(lens_u(r1) - t.v(r2)));
      // v_R'(r1) = -v'(r2 mirror)
      lc.gluing_slope = std::max(lc.gluing_slope, std::abs(-t.dv(rsum - r1) + t.dv(r2)));
    }
    else
    {
      lc.gluing_value = std::max(lc.gluing_value, std::abs(t.v(r1) - t.v(r2)));
      lc.gluing_slope = std::max(lc.gluing_slope, std::abs(t.dv(r1) - t.dv(r2)));
      if (t.kappa == 0.0)
      {
        lc.mode0_defect = std::max(lc.mode0_defect, std::abs(t.slope) * (r2 - r1));
      }
    }

    const double scale = std::max(std::abs(t.value), std::abs(t.slope));
    const bool defective = !reflect && t.kappa == 0.0;
    if (scale > 0.0 && !defective)
    {
      const double res1 = std::abs(m.u[i2] - lens_u(r1)) + std::abs(m.flux_lo[i2] - lens_f(r1));
      const double res2 = std::abs(m.u[i2] - lens_u(r2)) + std::abs(m.flux_hi[i2] - lens_f(r2));
      lc.transmission_r1 = std::max(lc.transmission_r1, res1 / scale);
      lc.transmission_r2 = std::max(lc.transmission_r2, res2 / scale);
    }

    lc.transport.modes.push_back(t);
    lc.u0.modes.push_back(std::move(ms));
  }
  return lc;
}

}  // namespace

LimitConstruction extend_scheme1(const Field &ref, std::shared_ptr<const Scenario> s,
                                 const RadialGrid &lens_grid)
{
  if (!s || (s->scheme != SchemeTag::scheme1_2d && s->scheme != SchemeTag::scheme1_3d_k))
  {
    throw DomainError("extend_scheme1 needs a scheme-1 scenario");
  }
  const double period = s->scheme == SchemeTag::scheme1_2d ? 2.0 * kPi : 4.0 * kPi;
  if (!is_tuned(s->r1, s->r2, period))
  {
    throw DomainError("tuning violated: lens thickness is not a multiple of the period");
  }
  return construct(ref, std::move(s), lens_grid, false, 0.0);
}

LimitConstruction extend_scheme2(const Field &ref, std::shared_ptr<const Scenario> s,
                                 const RadialGrid &lens_grid, double growth_cap)
{
  if (!s || s->scheme != SchemeTag::scheme2)
  {
    throw DomainError("extend_scheme2 needs a scheme-2 scenario");
  }
  if (s->scheme2_sigma == Scheme2Sigma::inverse_square && s->k > 0.0)
  {
    throw DomainError("the literal scheme-2 zeroth-order term has no closed-form transport");
  }
  return construct(ref, std::move(s), lens_grid, true, growth_cap);
}

SuperlensError superlens_error(const Field &u_delta, const Field &u_ref, double a, double b,
                               const std::vector<int> &exclude)
{
  const std::size_t da = u_delta.grid.node_index(a), db = u_delta.grid.node_index(b);
  const std::size_t ra = u_ref.grid.node_index(a), rb = u_ref.grid.node_index(b);
  if (db - da != rb - ra)
  {
    throw DomainError("grid mismatch: different node counts on the comparison region");
  }
  for (std::size_t j = 0; j <= db - da; ++j)
  {
    if (u_delta.grid.nodes[da + j] != u_ref.grid.nodes[ra + j])
    {
      throw DomainError("grid mismatch: nodes differ on the comparison region");
    }
  }
  const int d = u_ref.scenario ? u_ref.scenario->d : 2;
  auto skipped = [&](int n) {
    return std::find(exclude.begin(), exclude.end(), n) != exclude.end();
  };

  std::vector<ModeIndex> all;
  for (const auto *f : {&u_delta, &u_ref})
  {
    for (const auto &m : f->modes)
    {
      if (!skipped(m.mode.n) && std::find(all.begin(), all.end(), m.mode) == all.end())
      {
        all.push_back(m.mode);
      }
    }
  }

  double diff_l2 = 0.0, diff_h1 = 0.0, ref_l2 = 0.0, ref_h1 = 0.0;
  const std::size_t count = db - da + 1;
  for (const auto &mi : all)
  {
    ModeSolution diff, refm;
    diff.mode = refm.mode = mi;
    diff.r.assign(u_ref.grid.nodes.begin() + static_cast<long>(ra),
                  u_ref.grid.nodes.begin() + static_cast<long>(rb) + 1);
    refm.r = diff.r;
    diff.u.assign(count, 0.0);
    refm.u.assign(count, 0.0);
    if (const auto *m = u_delta.find(mi))
    {
      for (std::size_t j = 0; j < count; ++j)
      {
        diff.u[j] += m->u[da + j];
      }
    }
    if (const auto *m = u_ref.find(mi))
    {
      for (std::size_t j = 0; j < count; ++j)
      {
        diff.u[j] -= m->u[ra + j];
        refm.u[j] = m->u[ra + j];
      }
    }
    const double wgt = mi.angular_weight();
    diff_l2 += wgt * mode_l2_squared(diff, d, 0, count - 1);
    diff_h1 += wgt * mode_h1_squared(diff, d, 0, count - 1);
    ref_l2 += wgt * mode_l2_squared(refm, d, 0, count - 1);
    ref_h1 += wgt * mode_h1_squared(refm, d, 0, count - 1);
  }
  SuperlensError e;
  e.l2_abs = std::sqrt(diff_l2);
  e.h1_abs = std::sqrt(diff_h1);
  e.l2_rel = ref_l2 > 0.0 ? e.l2_abs / std::sqrt(ref_l2) : e.l2_abs;
  e.h1_rel = ref_h1 > 0.0 ? e.h1_abs / std::sqrt(ref_h1) : e.h1_abs;
  return e;
}

double lens_energy_invariant(const LimitConstruction &lc)
{
  const auto &s = *lc.u0.scenario;
  double worst = 0.0;
  for (const auto &t : lc.transport.modes)
  {
    const double e2 = t.energy(s.r2);
    if (e2 == 0.0)
    {
      continue;
    }
    for (double r : lc.u0.grid.nodes)
    {
      if (r < s.r1 || r > s.r2)
      {
        continue;
      }
      worst = std::max(worst, std::abs(t.energy(r) - e2) / std::abs(e2));
    }
  }
  return worst;
}

double measured_lens_energy_deviation(const Field &field)
{
  const auto &s = *field.scenario;
  const std::size_t i1 = field.grid.node_index(s.r1), i2 = field.grid.node_index(s.r2);
  double worst = 0.0;
  for (const auto &m : field.modes)
  {
    const double kappa = lens_kappa(s, m.mode);
    std::vector<double> e;
    for (std::size_t c = i1; c < i2; ++c)
    {
      const double hc = m.r[c + 1] - m.r[c];
      const Complex dv = (m.u[c + 1] - m.u[c]) / hc;
      const Complex v = 0.5 * (m.u[c] + m.u[c + 1]);
      e.push_back(std::norm(dv) + kappa * std::norm(v));
    }
    if (e.empty() || e.back() == 0.0)
    {
      continue;
    }
    for (double x : e)
    {
      worst = std::max(worst, std::abs(x - e.back()) / std::abs(e.back()));
    }
  }
  return worst;
}

double periodicity_error(const LensTransport &t, double r1, double r2, double period,
                         int samples)
{
  double worst = 0.0;
  for (const auto &m : t.modes)
  {
    for (int j = 0; j <= samples; ++j)
    {
      const double r = r1 + (r2 - r1) * j / samples;
      worst = std::max(worst, std::abs(m.v(r) - m.v(r + period)));
    }
  }
  return worst;
}

double reflection_symmetry_error(const Field &u, const Scenario &s)
{
  const double rm = s.r_m(), rsum = s.r1 + s.r2;
  double worst = 0.0;
  for (const auto &m : u.modes)
  {
    double amp = 0.0, err = 0.0;
    for (std::size_t j = 0; j < m.r.size(); ++j)
    {
      const double r = m.r[j];
      if (r < s.r1 || r > s.r2)
      {
        continue;
      }
      amp = std::max(amp, std::abs(m.u[j]));
      if (r >= rm)
      {
        err = std::max(err, std::abs(m.u[j] - u.mode_value(m, std::clamp(rsum - r, s.r1, rm))));
      }
    }
    if (amp > 0.0)
    {
      worst = std::max(worst, err / amp);
    }
  }
  return worst;
}

}  // namespace hmlens
