// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/modal_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace hmlens
{

double ModeIndex::angular_weight() const
{
  if (d == 3)
  {
    return 4.0 * kPi / (2.0 * n + 1.0);
  }
  if (n == 0)
  {
    return branch == AngularBranch::sine ? 0.0 : 2.0 * kPi;
  }
  return kPi;
}

double ModeIndex::angular(double theta) const
{
  switch (branch)
  {
    case AngularBranch::cosine:
      return std::cos(n * theta);
    case AngularBranch::sine:
      return std::sin(n * theta);
    case AngularBranch::zonal:
      return std::legendre(static_cast<unsigned>(n), std::cos(theta));
  }
  return 0.0;
}

RadialGrid RadialGrid::build(double R, const std::vector<double> &breakpoints, double h)
{
  if (!(h > 0.0) || !(R > 0.0))
  {
    throw DomainError("grid spacing and radius must be positive");
  }
  std::vector<double> marks{0.0};
  for (double b : breakpoints)
  {
    if (!(b > marks.back()) || !(b < R))
    {
      throw DomainError("grid breakpoints must increase strictly inside (0, R)");
    }
    marks.push_back(b);
  }
  marks.push_back(R);

  RadialGrid g;
  g.nodes.push_back(0.0);
  for (std::size_t s = 0; s + 1 < marks.size(); ++s)
  {
    const double a = marks[s], b = marks[s + 1];
    const auto m = static_cast<std::size_t>(std::max(1.0, std::ceil((b - a) / h - 1e-9)));
    for (std::size_t j = 1; j < m; ++j)
    {
      g.nodes.push_back(a + (b - a) * static_cast<double>(j) / static_cast<double>(m));
    }
    g.nodes.push_back(b);
    g.max_spacing = std::max(g.max_spacing, (b - a) / static_cast<double>(m));
  }
  return g;
}

std::size_t RadialGrid::node_index(double r) const
{
  auto it = std::lower_bound(nodes.begin(), nodes.end(), r);
  if (it == nodes.end() || *it != r)
  {
    std::ostringstream os;
    os << "radius " << r << " is not a grid node";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(it - nodes.begin());
}

double default_grid_spacing(const ScenarioSpec &s)
{
  return std::min(2.0 * kPi / 256.0, (s.r2 - s.r1) / 512.0);
}

double RingSource::profile(double r) const
{
  const double z = (r - center) / width;
  if (std::abs(z) > 6.0)
  {
    return 0.0;
  }
  return std::exp(-0.5 * z * z);
}

Complex ModeProblem::p(double r) const
{
  return std::pow(r, scenario->d - 1) * coefficient_at(scenario->layers, r).b1;
}

Complex ModeProblem::q(double r) const
{
  if (mode.n == 0)
  {
    return 0.0;
  }
  return mode.mu() * coefficient_at(scenario->layers, r).b2 * std::pow(r, scenario->d - 3);
}

Complex ModeProblem::w(double r) const
{
  if (scenario->k == 0.0)
  {
    return 0.0;
  }
  return scenario->k * scenario->k * coefficient_at(scenario->layers, r).sigma *
         std::pow(r, scenario->d - 1);
}

Complex ModeProblem::rhs(double r) const
{
  if (amplitude == 0.0)
  {
    return 0.0;
  }
  double g = source.profile(r);
  if (balanced)
  {
    g *= r - balance_center;
  }
  return amplitude * g * std::pow(r, scenario->d - 1);
}

namespace
{

void check_mode(const Scenario &s, const ModeIndex &mode)
{
  if (mode.d != s.d || mode.n < 0)
  {
    throw DomainError("mode index does not match the scenario dimension");
  }
  if ((s.d == 3) != (mode.branch == AngularBranch::zonal))
  {
    throw DomainError("d = 3 uses zonal modes, d = 2 uses cosine/sine modes");
  }
  if (mode.branch == AngularBranch::sine && mode.n == 0)
  {
    throw DomainError("sine branch of mode 0 vanishes identically");
  }
}

}  // namespace

ModeProblem reduce_to_mode(const Scenario &s, const ModeIndex &mode, const RingSource &source,
                           const RadialGrid &grid)
{
  check_mode(s, mode);
  if (grid.nodes.size() < 3 || grid.nodes.back() != s.R)
  {
    throw DomainError("grid must cover [0, R] with at least two cells");
  }
  ModeProblem mp;
  mp.mode = mode;
  mp.scenario = &s;
  mp.grid = grid;
  mp.source = source;
  for (const auto &sm : source.modes)
  {
    if (sm.n == mode.n && sm.branch == mode.branch)
    {
      mp.amplitude += sm.amplitude;
    }
  }
  if (mp.amplitude != 0.0 && !(source.support_lo() > s.r2 && source.support_hi() < s.R))
  {
    throw DomainError("source support must lie inside (r2, R)");
  }
  mp.outer = s.boundary_condition();
  mp.center_dirichlet = mode.n >= 1;
  mp.pin_outer = mp.outer == BoundaryKind::neumann_gauge && mode.n == 0;
  if (mp.outer == BoundaryKind::robin)
  {
    mp.robin = kI * s.k * std::pow(s.R, s.d - 1);
  }

  const auto &r = grid.nodes;
  const std::size_t M = r.size() - 1;
  mp.h.resize(M);
  mp.p_mid.resize(M);
  for (std::size_t c = 0; c < M; ++c)
  {
    mp.h[c] = r[c + 1] - r[c];
    if (!(mp.h[c] > 0.0))
    {
      throw DomainError("zero-width grid cell");
    }
    mp.p_mid[c] = mp.p(0.5 * (r[c] + r[c + 1]));
  }

  if (mp.pin_outer && mp.amplitude != 0.0)
  {
    if (source.balance_mode0)
    {
      // c = (sum g r^d) / (sum g r^{d-1}) over the half-cell samples
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i <= M; ++i)
      {
        for (int side = 0; side < 2; ++side)
        {
          if ((side == 0 && i == 0) || (side == 1 && i == M))
          {
            continue;
          }
          const double hc = side == 0 ? mp.h[i - 1] : mp.h[i];
          const double x = side == 0 ? r[i] - 0.25 * hc : r[i] + 0.25 * hc;
          const double wgt = source.profile(x) * std::pow(x, s.d - 1) * 0.5 * hc;
          num += wgt * x;
          den += wgt;
        }
      }
      if (den == 0.0)
      {
        throw DomainError("source profile vanishes on the grid");
      }
      mp.balanced = true;
      mp.balance_center = num / den;
    }
  }

  mp.mass_lo.assign(M + 1, 0.0);
  mp.mass_hi.assign(M + 1, 0.0);
  mp.load_lo.assign(M + 1, 0.0);
  mp.load_hi.assign(M + 1, 0.0);
  for (std::size_t i = 0; i <= M; ++i)
  {
    if (i > 0)
    {
      const double x = r[i] - 0.25 * mp.h[i - 1];
      mp.mass_lo[i] = (mp.w(x) - mp.q(x)) * (0.5 * mp.h[i - 1]);
      mp.load_lo[i] = mp.rhs(x) * (0.5 * mp.h[i - 1]);
    }
    if (i < M)
    {
      const double x = r[i] + 0.25 * mp.h[i];
      mp.mass_hi[i] = (mp.w(x) - mp.q(x)) * (0.5 * mp.h[i]);
      mp.load_hi[i] = mp.rhs(x) * (0.5 * mp.h[i]);
    }
  }

  if (mp.pin_outer && mp.amplitude != 0.0 && !mp.balanced)
  {
    Complex total = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i <= M; ++i)
    {
      total += mp.load_lo[i] + mp.load_hi[i];
      scale += std::abs(mp.load_lo[i]) + std::abs(mp.load_hi[i]);
    }
    if (std::abs(total) > 1e-10 * scale)
    {
      throw DomainError("compatibility violated: mode-0 source has nonzero integral at k = 0");
    }
  }
  return mp;
}

TridiagonalSystem discretize(const ModeProblem &mp)
{
  const std::size_t M = mp.h.size();
  TridiagonalSystem a(M + 1);
  for (std::size_t i = 0; i <= M; ++i)
  {
    Complex diag = 0.0;
    if (i > 0)
    {
      const Complex c = mp.p_mid[i - 1] / mp.h[i - 1];
      a.lower[i - 1] = c;
      diag -= c;
    }
    if (i < M)
    {
      const Complex c = mp.p_mid[i] / mp.h[i];
      a.upper[i] = c;
      diag -= c;
    }
    a.diag[i] = diag;
    a.rhs[i] = mp.load_lo[i] + mp.load_hi[i];
  }
  // zeroth-order terms with u interpolated linearly to the half-cell samples
  for (std::size_t c = 0; c < M; ++c)
  {
    const Complex ma = mp.mass_hi[c], mb = mp.mass_lo[c + 1];
    a.diag[c] += (9.0 * ma + mb) / 16.0;
    a.diag[c + 1] += (ma + 9.0 * mb) / 16.0;
    a.upper[c] += 3.0 * (ma + mb) / 16.0;
    a.lower[c] += 3.0 * (ma + mb) / 16.0;
  }
  a.diag[M] += mp.robin;

  auto make_dirichlet = [&](std::size_t i) {
    a.diag[i] = 1.0;
    a.rhs[i] = 0.0;
    if (i > 0)
    {
      a.lower[i - 1] = 0.0;
    }
    if (i < M)
    {
      a.upper[i] = 0.0;
    }
  };
  if (mp.center_dirichlet)
  {
    make_dirichlet(0);
  }
  if (mp.outer == BoundaryKind::dirichlet || mp.pin_outer)
  {
    make_dirichlet(M);
  }
  return a;
}

namespace
{

// Zeroth-order contributions of cell c to its lower and upper node rows.
struct CellMass
{
  Complex row_lo;
  Complex row_hi;
};

CellMass cell_mass(const ModeProblem &mp, std::size_t c, Complex u_lo, Complex u_hi)
{
  const Complex ua = 0.75 * u_lo + 0.25 * u_hi;
  const Complex ub = 0.25 * u_lo + 0.75 * u_hi;
  const Complex ma = mp.mass_hi[c], mb = mp.mass_lo[c + 1];
  return {0.75 * ma * ua + 0.25 * mb * ub, 0.25 * ma * ua + 0.75 * mb * ub};
}

}  // namespace

ModeSolution solve_mode(const ModeProblem &mp)
{
  const TridiagonalSystem a = discretize(mp);
  BandedSolution sol = solve_banded(a, mp.mode.n);
  const std::size_t M = mp.h.size();

  ModeSolution out;
  out.mode = mp.mode;
  out.r = mp.grid.nodes;
  out.u = std::move(sol.x);
  out.condition = sol.condition_estimate;
  out.flux_mid.resize(M);
  for (std::size_t c = 0; c < M; ++c)
  {
    out.flux_mid[c] = mp.p_mid[c] * (out.u[c + 1] - out.u[c]) / mp.h[c];
  }
  out.flux_lo.assign(M + 1, 0.0);
  out.flux_hi.assign(M + 1, 0.0);
  for (std::size_t i = 0; i <= M; ++i)
  {
    if (i > 0)
    {
      const CellMass cm = cell_mass(mp, i - 1, out.u[i - 1], out.u[i]);
      out.flux_lo[i] = out.flux_mid[i - 1] + mp.load_lo[i] - cm.row_hi;
    }
    if (i < M)
    {
      const CellMass cm = cell_mass(mp, i, out.u[i], out.u[i + 1]);
      out.flux_hi[i] = out.flux_mid[i] - (mp.load_hi[i] - cm.row_lo);
    }
  }
  if (mp.outer == BoundaryKind::robin)
  {
    out.flux_hi[M] = mp.robin * out.u[M];
  }
  else if (mp.outer == BoundaryKind::dirichlet || mp.pin_outer)
  {
    out.flux_hi[M] = out.flux_lo[M];
  }
  if (mp.center_dirichlet)
  {
    out.flux_lo[0] = out.flux_hi[0];
  }
  return out;
}

const ModeSolution *Field::find(const ModeIndex &m) const
{
  for (const auto &ms : modes)
  {
    if (ms.mode == m)
    {
      return &ms;
    }
  }
  return nullptr;
}

Complex Field::mode_value(const ModeSolution &m, double r) const
{
  const auto &x = m.r;
  if (!(r >= 0.0) || r > x.back())
  {
    std::ostringstream os;
    os << "radius " << r << " outside [0, R]";
    throw DomainError(os.str());
  }
  auto it = std::upper_bound(x.begin(), x.end(), r);
  if (it == x.end())
  {
    return m.u.back();
  }
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double t = (r - x[j - 1]) / (x[j] - x[j - 1]);
  return (1.0 - t) * m.u[j - 1] + t * m.u[j];
}

Complex Field::evaluate(double r, double theta) const
{
  Complex acc = 0.0;
  for (const auto &m : modes)
  {
    acc += mode_value(m, r) * m.mode.angular(theta);
  }
  return acc;
}

double mode_l2_squared(const ModeSolution &m, int d, std::size_t ia, std::size_t ib)
{
  double acc = 0.0;
  for (std::size_t c = ia; c < ib; ++c)
  {
    const double hc = m.r[c + 1] - m.r[c];
    acc += 0.5 * hc *
           (std::norm(m.u[c]) * std::pow(m.r[c], d - 1) +
            std::norm(m.u[c + 1]) * std::pow(m.r[c + 1], d - 1));
  }
  return acc;
}

double mode_h1_squared(const ModeSolution &m, int d, std::size_t ia, std::size_t ib)
{
  const double mu = m.mode.mu();
  double acc = 0.0;
  for (std::size_t c = ia; c < ib; ++c)
  {
    const double hc = m.r[c + 1] - m.r[c];
    const double rm = 0.5 * (m.r[c] + m.r[c + 1]);
    const Complex du = (m.u[c + 1] - m.u[c]) / hc;
    const Complex um = 0.5 * (m.u[c] + m.u[c + 1]);
    acc += hc * (std::norm(du) * std::pow(rm, d - 1));
    if (mu > 0.0)
    {
      acc += hc * mu * std::norm(um) * std::pow(rm, d - 3);
    }
  }
  return acc;
}

double Field::l2_norm(double a, double b) const
{
  const std::size_t ia = grid.node_index(a), ib = grid.node_index(b);
  double acc = 0.0;
  for (const auto &m : modes)
  {
    acc += m.mode.angular_weight() * mode_l2_squared(m, m.mode.d, ia, ib);
  }
  return std::sqrt(acc);
}

double Field::h1_seminorm(double a, double b) const
{
  const std::size_t ia = grid.node_index(a), ib = grid.node_index(b);
  double acc = 0.0;
  for (const auto &m : modes)
  {
    acc += m.mode.angular_weight() * mode_h1_squared(m, m.mode.d, ia, ib);
  }
  return std::sqrt(acc);
}

double Field::h1_norm(double a, double b) const
{
  const double l2 = l2_norm(a, b), semi = h1_seminorm(a, b);
  return std::sqrt(l2 * l2 + semi * semi);
}

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body)
{
  std::vector<std::exception_ptr> errors(n);
  auto run_one = [&](std::size_t i) {
    try
    {
      body(i);
    }
    catch (...)
    {
      errors[i] = std::current_exception();
    }
  };
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
  if (workers <= 1)
  {
    for (std::size_t i = 0; i < n; ++i)
    {
      run_one(i);
    }
  }
  else
  {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < workers; ++t)
    {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++)
        {
          run_one(i);
        }
      });
    }
    for (auto &th : pool)
    {
      th.join();
    }
  }
  // lowest index wins so the reported failure does not depend on scheduling
  for (auto &e : errors)
  {
    if (e)
    {
      std::rethrow_exception(e);
    }
  }
}

Field solve_scenario(std::shared_ptr<const Scenario> s, const RingSource &source, int n_max,
                     const RadialGrid &grid, int threads)
{
  if (!s)
  {
    throw DomainError("null scenario");
  }
  if (s->delta == 0.0 && s->has_lens())
  {
    throw DomainError("lens problems are solved with delta > 0 only");
  }
  std::vector<ModeIndex> wanted;
  for (const auto &sm : source.modes)
  {
    if (sm.n > n_max)
    {
      std::ostringstream os;
      os << "source mode " << sm.n << " exceeds N_max = " << n_max;
      throw DomainError(os.str());
    }
    ModeIndex m{s->d, sm.n, sm.branch};
    check_mode(*s, m);
    if (std::find(wanted.begin(), wanted.end(), m) == wanted.end())
    {
      wanted.push_back(m);
    }
  }
  std::sort(wanted.begin(), wanted.end(), [](const ModeIndex &a, const ModeIndex &b) {
    return a.n != b.n ? a.n < b.n : a.branch < b.branch;
  });

  Field f;
  f.scenario = s;
  f.grid = grid;
  f.modes.resize(wanted.size());
  parallel_for(wanted.size(), threads, [&](std::size_t i) {
    const ModeProblem mp = reduce_to_mode(*s, wanted[i], source, grid);
    f.modes[i] = solve_mode(mp);
  });
  return f;
}

double power_balance_residual(const Field &field, const RingSource &source)
{
  double im_total = 0.0;
  double scale = 0.0;
  for (const auto &m : field.modes)
  {
    const ModeProblem mp = reduce_to_mode(*field.scenario, m.mode, source, field.grid);
    const std::size_t M = mp.h.size();
    Complex b = 0.0;
    double s_abs = 0.0;
    for (std::size_t c = 0; c < M; ++c)
    {
      b -= mp.p_mid[c] * std::norm(m.u[c + 1] - m.u[c]) / mp.h[c];
      const Complex ua = 0.75 * m.u[c] + 0.25 * m.u[c + 1];
      const Complex ub = 0.25 * m.u[c] + 0.75 * m.u[c + 1];
      b += mp.mass_hi[c] * std::norm(ua) + mp.mass_lo[c + 1] * std::norm(ub);
    }
    for (std::size_t i = 0; i <= M; ++i)
    {
      const Complex load = mp.load_lo[i] + mp.load_hi[i];
      b -= load * std::conj(m.u[i]);
      s_abs += std::abs(load * std::conj(m.u[i]));
    }
    b += mp.robin * std::norm(m.u[M]);
    const double wgt = m.mode.angular_weight();
    im_total += wgt * b.imag();
    scale += wgt * s_abs;
  }
  return scale > 0.0 ? std::abs(im_total) / scale : 0.0;
}

double flux_continuity_defect(const Field &field)
{
  double worst = 0.0, scale = 0.0;
  const auto bps = field.scenario->breakpoints();
  for (const auto &m : field.modes)
  {
    for (std::size_t i = 0; i < m.r.size(); ++i)
    {
      scale = std::max({scale, std::abs(m.flux_lo[i]), std::abs(m.flux_hi[i])});
    }
    for (double b : bps)
    {
      auto it = std::lower_bound(m.r.begin(), m.r.end(), b);
      if (it == m.r.end() || *it != b)
      {
        continue;
      }
      const std::size_t i = static_cast<std::size_t>(it - m.r.begin());
      worst = std::max(worst, std::abs(m.flux_lo[i] - m.flux_hi[i]));
    }
  }
  return scale > 0.0 ? worst / scale : 0.0;
}

void write_mode_csv(std::ostream &os, const Field &field)
{
  os << "mode_n,r,re_u,im_u,re_flux,im_flux\n";
  os.precision(17);
  for (const auto &m : field.modes)
  {
    for (std::size_t i = 0; i < m.r.size(); ++i)
    {
      const Complex flux = 0.5 * (m.flux_lo[i] + m.flux_hi[i]);
      os << m.mode.n << ',' << m.r[i] << ',' << m.u[i].real() << ',' << m.u[i].imag() << ','
         << flux.real() << ',' << flux.imag() << '\n';
    }
  }
}

void write_field_csv(std::ostream &os, const Field &field, int n_theta, int radial_stride)
{
  os << "r,theta,re_u,im_u\n";
  os.precision(17);
  const auto &nodes = field.grid.nodes;
  const int d = field.scenario ? field.scenario->d : 2;
  const std::size_t stride = static_cast<std::size_t>(std::max(1, radial_stride));
  for (std::size_t i = 0; i < nodes.size(); i += stride)
  {
    for (int j = 0; j < n_theta; ++j)
    {
      const double theta = d == 2 ? 2.0 * kPi * j / n_theta
                                  : kPi * j / std::max(1, n_theta - 1);
      const Complex v = field.evaluate(nodes[i], theta);
      os << nodes[i] << ',' << theta << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

}  // namespace hmlens
