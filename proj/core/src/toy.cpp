// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/toy.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "hmlens/banded.hpp"
#include "hmlens/medium.hpp"
#include "hmlens/modal_solver.hpp"
#include "hmlens/rates.hpp"

namespace hmlens
{

ToyMedium ToyMedium::scalar(std::function<Complex(double)> a)
{
  ToyMedium m;
  m.scalar_profile = a;
  m.a11 = [a](double x1, double) { return a(x1); };
  m.a22 = m.a11;
  m.separable = true;
  return m;
}

ToyMedium ToyMedium::diagonal(std::function<Complex(double, double)> a11,
                              std::function<Complex(double, double)> a22)
{
  ToyMedium m;
  m.a11 = std::move(a11);
  m.a22 = std::move(a22);
  m.separable = false;
  return m;
}

double ToySource::profile(double x1) const
{
  const double z = (x1 - center) / width;
  return std::abs(z) > 6.0 ? 0.0 : std::exp(-0.5 * z * z);
}

namespace
{

bool multiple_of(double x, double h)
{
  const double q = x / h;
  return std::abs(q - std::round(q)) <= 1e-9 * std::max(1.0, q);
}

int cells_of(double x, double h)
{
  return static_cast<int>(std::lround(x / h));
}

}  // namespace

bool ToyConfig::tuned() const
{
  return is_tuned(0.0, T, basis == ToyBasis::sine ? 2.0 * kPi : 4.0 * kPi);
}

void ToyConfig::validate() const
{
  auto fail = [](const std::string &m) { throw DomainError(m); };
  if (n2 < 4 || n2 % 2 != 0)
  {
    fail("toy grid needs an even number n2 >= 4 of x2 intervals");
  }
  if (!(delta >= 0.0))
  {
    fail("loss delta must be non-negative");
  }
  const double hh = h();
  if (!(l > 0.0) || !multiple_of(l, hh))
  {
    fail("l must be a positive multiple of h = 2 pi / n2");
  }
  if (!(T >= 0.0) || !multiple_of(T, hh))
  {
    fail("T must be a non-negative multiple of h = 2 pi / n2");
  }
  if (!(L > T) || !multiple_of(L - T, hh))
  {
    fail("L - T must be a positive multiple of h = 2 pi / n2");
  }
  if (modal_refine < 1)
  {
    fail("modal_refine must be >= 1");
  }
  for (const auto &s : sources)
  {
    const bool left = s.support_lo() > -l && s.support_hi() < 0.0;
    const bool right = s.support_lo() > T && s.support_hi() < L;
    if (!left && !right)
    {
      fail("toy source support must lie inside R_l or R_r, away from R_c");
    }
    for (const auto &m : s.modes)
    {
      if (m.m < 1)
      {
        fail("toy source modes start at m = 1");
      }
    }
  }
}

Complex ToyConfig::source(double x1, double x2) const
{
  Complex acc = 0.0;
  for (const auto &s : sources)
  {
    const double g = s.profile(x1);
    if (g == 0.0)
    {
      continue;
    }
    for (const auto &m : s.modes)
    {
      acc += m.amplitude * g * std::sin(kappa(m.m) * x2);
    }
  }
  return acc;
}

double ToyField::l2_norm(std::size_t i0, std::size_t i1) const
{
  const double h1 = x1[1] - x1[0], h2 = x2[1] - x2[0];
  double acc = 0.0;
  for (std::size_t i = i0; i <= i1; ++i)
  {
    const double wi = (i == i0 || i == i1) && i0 != i1 ? 0.5 : 1.0;
    for (std::size_t j = 0; j < x2.size(); ++j)
    {
      acc += wi * std::norm(at(i, j));
    }
  }
  return std::sqrt(acc * h1 * h2);
}

double ToyField::h1_seminorm(std::size_t i0, std::size_t i1) const
{
  const double h1 = x1[1] - x1[0], h2 = x2[1] - x2[0];
  double acc = 0.0;
  for (std::size_t i = i0; i < i1; ++i)
  {
    for (std::size_t j = 0; j < x2.size(); ++j)
    {
      acc += std::norm(at(i + 1, j) - at(i, j)) * h2 / h1;
    }
  }
  for (std::size_t i = i0; i <= i1; ++i)
  {
    const double wi = (i == i0 || i == i1) && i0 != i1 ? 0.5 : 1.0;
    for (std::size_t j = 0; j + 1 < x2.size(); ++j)
    {
      acc += wi * std::norm(at(i, j + 1) - at(i, j)) * h1 / h2;
    }
  }
  return std::sqrt(acc);
}

double ToyField::h1_norm() const
{
  const double a = l2_norm(0, x1.size() - 1), b = h1_seminorm(0, x1.size() - 1);
  return std::sqrt(a * a + b * b);
}

std::size_t ToyField::index_of(double x) const
{
  const double h1 = x1[1] - x1[0];
  const double q = (x - x1.front()) / h1;
  const long i = std::lround(q);
  if (i < 0 || static_cast<std::size_t>(i) >= x1.size() || std::abs(q - i) > 1e-6)
  {
    std::ostringstream os;
    os << "x1 = " << x << " is not a grid line";
    throw DomainError(os.str());
  }
  return static_cast<std::size_t>(i);
}

ToyField toy_fd_generic(double x_lo, int n1, int n2,
                        const std::function<ToyCoefficients(double, double)> &coefficient,
                        const std::function<Complex(double, double)> &source)
{
  if (n1 < 2 || n2 < 2)
  {
    throw DomainError("toy FD grid needs at least two cells per direction");
  }
  const double h = 2.0 * kPi / n2;
  ToyField f;
  f.x1.resize(static_cast<std::size_t>(n1) + 1);
  f.x2.resize(static_cast<std::size_t>(n2) + 1);
  for (int i = 0; i <= n1; ++i)
  {
    f.x1[static_cast<std::size_t>(i)] = x_lo + h * i;
  }
  for (int j = 0; j <= n2; ++j)
  {
    f.x2[static_cast<std::size_t>(j)] = h * j;
  }
  f.values.assign(f.x1.size() * f.x2.size(), 0.0);

  const int ni = n1 - 1, nj = n2 - 1;
  auto idx = [nj](int i, int j) { return (i - 1) * nj + (j - 1); };
  using Sparse = Eigen::SparseMatrix<Complex>;
  std::vector<Eigen::Triplet<Complex>> trip;
  trip.reserve(static_cast<std::size_t>(ni) * nj * 5);
  Eigen::VectorXcd b(ni * nj);
  bool any_source = false;
  for (int i = 1; i <= n1 - 1; ++i)
  {
    const double x = f.x1[static_cast<std::size_t>(i)];
    for (int j = 1; j <= n2 - 1; ++j)
    {
      const double y = f.x2[static_cast<std::size_t>(j)];
      const Complex ce = coefficient(x + 0.5 * h, y).a11;
      const Complex cw = coefficient(x - 0.5 * h, y).a11;
      const Complex cn = 0.5 * (coefficient(x - 0.25 * h, y + 0.5 * h).a22 +
                                coefficient(x + 0.25 * h, y + 0.5 * h).a22);
      const Complex cs = 0.5 * (coefficient(x - 0.25 * h, y - 0.5 * h).a22 +
                                coefficient(x + 0.25 * h, y - 0.5 * h).a22);
      const int k = idx(i, j);
      trip.emplace_back(k, k, -(ce + cw + cn + cs));
      if (i < n1 - 1)
      {
        trip.emplace_back(k, idx(i + 1, j), ce);
      }
      if (i > 1)
      {
        trip.emplace_back(k, idx(i - 1, j), cw);
      }
      if (j < n2 - 1)
      {
        trip.emplace_back(k, idx(i, j + 1), cn);
      }
      if (j > 1)
      {
        trip.emplace_back(k, idx(i, j - 1), cs);
      }
      b[k] = h * h * source(x, y);
      any_source = any_source || b[k] != 0.0;
    }
  }
  if (!any_source)
  {
    return f;
  }
  Sparse A(ni * nj, ni * nj);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  Eigen::SparseLU<Sparse> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
  {
    throw SolverError("toy FD factorization failed (near resonance?): " + lu.lastErrorMessage());
  }
  const Eigen::VectorXcd sol = lu.solve(b);
  if (lu.info() != Eigen::Success || !sol.allFinite())
  {
    throw SolverError("toy FD solve failed");
  }
  for (int i = 1; i <= n1 - 1; ++i)
  {
    for (int j = 1; j <= n2 - 1; ++j)
    {
      f.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = sol[idx(i, j)];
    }
  }
  return f;
}

namespace
{

ToyCoefficients lossy_center(double delta)
{
  return ToyCoefficients{Complex(1.0, -delta), Complex(-1.0, -delta)};
}

}  // namespace

ToyField toy_solve_fd(const ToyConfig &c)
{
  c.validate();
  const double h = c.h();
  const int n1 = cells_of(c.l, h) + cells_of(c.T, h) + cells_of(c.L - c.T, h);
  auto coef = [&c](double x1, double x2) {
    if (x1 > 0.0 && x1 < c.T)
    {
      return lossy_center(c.delta);
    }
    return ToyCoefficients{c.a.a11(x1, x2), c.a.a22(x1, x2)};
  };
  auto src = [&c](double x1, double x2) { return c.source(x1, x2); };
  return toy_fd_generic(-c.l, n1, c.n2, coef, src);
}

ToyField toy_reference(const ToyConfig &c)
{
  c.validate();
  const double h = c.h();
  const int n1 = cells_of(c.l, h) + cells_of(c.L - c.T, h);
  auto shift = [&c](double x1) { return x1 < 0.0 ? x1 : x1 + c.T; };
  auto coef = [&c, shift](double x1, double x2) {
    const double xs = shift(x1);
    return ToyCoefficients{c.a.a11(xs, x2), c.a.a22(xs, x2)};
  };
  auto src = [&c, shift](double x1, double x2) { return c.source(shift(x1), x2); };
  return toy_fd_generic(-c.l, n1, c.n2, coef, src);
}

namespace
{

// 1-D finite-volume solve of (A1 u')' - kappa^2 A2 u = f on [x_lo, x_lo + n h], zero ends.
ToyModeProfile solve_line(int m, double kappa, double x_lo, int n, double h,
                          const std::function<Complex(double)> &A1,
                          const std::function<Complex(double)> &A2,
                          const std::function<Complex(double)> &f)
{
  const std::size_t N = static_cast<std::size_t>(n);
  ToyModeProfile out;
  out.m = m;
  out.kappa = kappa;
  out.x1.resize(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
  {
    out.x1[i] = x_lo + h * static_cast<double>(i);
  }
  std::vector<Complex> pc(N), mlo(N + 1, 0.0), mhi(N + 1, 0.0), llo(N + 1, 0.0),
      lhi(N + 1, 0.0);
  for (std::size_t c = 0; c < N; ++c)
  {
    pc[c] = A1(out.x1[c] + 0.5 * h);
  }
  const double k2 = kappa * kappa;
  for (std::size_t i = 0; i <= N; ++i)
  {
    if (i > 0)
    {
      const double x = out.x1[i] - 0.25 * h;
      mlo[i] = -k2 * A2(x) * (0.5 * h);
      llo[i] = f(x) * (0.5 * h);
    }
    if (i < N)
    {
      const double x = out.x1[i] + 0.25 * h;
      mhi[i] = -k2 * A2(x) * (0.5 * h);
      lhi[i] = f(x) * (0.5 * h);
    }
  }
  TridiagonalSystem a(N + 1);
  for (std::size_t i = 0; i <= N; ++i)
  {
    Complex diag = mlo[i] + mhi[i];
    if (i > 0)
    {
      a.lower[i - 1] = pc[i - 1] / h;
      diag -= pc[i - 1] / h;
    }
    if (i < N)
    {
      a.upper[i] = pc[i] / h;
      diag -= pc[i] / h;
    }
    a.diag[i] = diag;
    a.rhs[i] = llo[i] + lhi[i];
  }
  for (std::size_t i : {std::size_t{0}, N})
  {
    a.diag[i] = 1.0;
    a.rhs[i] = 0.0;
    if (i > 0)
    {
      a.lower[i - 1] = 0.0;
    }
    if (i < N)
    {
      a.upper[i] = 0.0;
    }
  }
  out.u = solve_banded(a, m).x;
  out.flux_lo.assign(N + 1, 0.0);
  out.flux_hi.assign(N + 1, 0.0);
  for (std::size_t i = 0; i <= N; ++i)
  {
    if (i > 0)
    {
      out.flux_lo[i] = pc[i - 1] * (out.u[i] - out.u[i - 1]) / h + llo[i] - mlo[i] * out.u[i];
    }
    if (i < N)
    {
      out.flux_hi[i] = pc[i] * (out.u[i + 1] - out.u[i]) / h - (lhi[i] - mhi[i] * out.u[i]);
    }
  }
  return out;
}

std::vector<int> source_modes(const ToyConfig &c)
{
  std::vector<int> ms;
  for (const auto &s : c.sources)
  {
    for (const auto &m : s.modes)
    {
      if (std::find(ms.begin(), ms.end(), m.m) == ms.end())
      {
        ms.push_back(m.m);
      }
    }
  }
  std::sort(ms.begin(), ms.end());
  return ms;
}

Complex mode_source(const ToyConfig &c, int m, double x1)
{
  Complex acc = 0.0;
  for (const auto &s : c.sources)
  {
    const double g = s.profile(x1);
    for (const auto &sm : s.modes)
    {
      if (sm.m == m)
      {
        acc += sm.amplitude * g;
      }
    }
  }
  return acc;
}

void require_separable(const ToyConfig &c)
{
  if (!c.a.separable)
  {
    throw DomainError("modal toy path needs a scalar coefficient depending on x1 only");
  }
}

}  // namespace

std::vector<ToyModeProfile> toy_solve_modal(const ToyConfig &c, std::vector<int> modes)
{
  c.validate();
  require_separable(c);
  if (modes.empty())
  {
    modes = source_modes(c);
  }
  const double hm = c.h() / c.modal_refine;
  const int n = (cells_of(c.l, c.h()) + cells_of(c.T, c.h()) + cells_of(c.L - c.T, c.h())) *
                c.modal_refine;
  const Complex cen1(1.0, -c.delta), cen2(-1.0, -c.delta);
  auto A1 = [&](double x) { return x > 0.0 && x < c.T ? cen1 : c.a.scalar_profile(x); };
  auto A2 = [&](double x) { return x > 0.0 && x < c.T ? cen2 : c.a.scalar_profile(x); };
  std::vector<ToyModeProfile> out(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k)
  {
    const int m = modes[k];
    out[k] = solve_line(m, c.kappa(m), -c.l, n, hm, A1, A2,
                        [&](double x) { return mode_source(c, m, x); });
  }
  return out;
}

ToyField toy_synthesize(const ToyConfig &c, const std::vector<ToyModeProfile> &profiles)
{
  const double h = c.h();
  ToyField f;
  const std::size_t n1 = static_cast<std::size_t>(
      cells_of(c.l, h) + cells_of(c.T, h) + cells_of(c.L - c.T, h));
  f.x1.resize(n1 + 1);
  f.x2.resize(static_cast<std::size_t>(c.n2) + 1);
  for (std::size_t i = 0; i <= n1; ++i)
  {
    f.x1[i] = -c.l + h * static_cast<double>(i);
  }
  for (std::size_t j = 0; j < f.x2.size(); ++j)
  {
    f.x2[j] = h * static_cast<double>(j);
  }
  f.values.assign(f.x1.size() * f.x2.size(), 0.0);
  const std::size_t stride = static_cast<std::size_t>(c.modal_refine);
  for (const auto &p : profiles)
  {
    if (p.x1.size() != n1 * stride + 1)
    {
      throw DomainError("modal profile grid does not match the toy configuration");
    }
    for (std::size_t i = 0; i <= n1; ++i)
    {
      for (std::size_t j = 1; j + 1 < f.x2.size(); ++j)
      {
        f.at(i, j) += p.u[i * stride] * std::sin(p.kappa * f.x2[j]);
      }
    }
  }
  return f;
}

ToyShiftError toy_shift_compare(const ToyField &u_delta, const ToyField &u_hat,
                                const ToyConfig &c)
{
  const std::size_t i0 = u_delta.index_of(-c.l), iz = u_delta.index_of(0.0);
  const std::size_t iT = u_delta.index_of(c.T), iL = u_delta.index_of(c.L);
  const std::size_t shift = iT - iz;
  if (u_hat.x1.size() + shift != u_delta.x1.size() || u_hat.x2.size() != u_delta.x2.size())
  {
    throw DomainError("toy fields are not on matching grids");
  }
  auto rel = [&](std::size_t a, std::size_t b, std::size_t off) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = a; i <= b; ++i)
    {
      for (std::size_t j = 0; j < u_delta.x2.size(); ++j)
      {
        num += std::norm(u_delta.at(i, j) - u_hat.at(i - off, j));
        den += std::norm(u_hat.at(i - off, j));
      }
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  };
  ToyShiftError e;
  e.err_l = rel(i0, iz, 0);
  e.err_r = rel(iT, iL, shift);
  return e;
}

ToyLimit toy_limit_modal(const ToyConfig &c)
{
  c.validate();
  require_separable(c);
  const double h = c.h();
  const double hm = h / c.modal_refine;
  const int nl = cells_of(c.l, h) * c.modal_refine;
  const int n = nl + cells_of(c.L - c.T, h) * c.modal_refine;
  auto shift = [&c](double x) { return x < 0.0 ? x : x + c.T; };
  auto A = [&](double x) { return c.a.scalar_profile(shift(x)); };

  ToyLimit lim;
  for (int m : source_modes(c))
  {
    lim.reference.push_back(solve_line(m, c.kappa(m), -c.l, n, hm, A, A, [&](double x) {
      return mode_source(c, m, shift(x));
    }));
  }

  const std::size_t n1 = static_cast<std::size_t>(
      cells_of(c.l, h) + cells_of(c.T, h) + cells_of(c.L - c.T, h));
  ToyField &f = lim.u0;
  f.x1.resize(n1 + 1);
  f.x2.resize(static_cast<std::size_t>(c.n2) + 1);
  for (std::size_t i = 0; i <= n1; ++i)
  {
    f.x1[i] = -c.l + h * static_cast<double>(i);
  }
  for (std::size_t j = 0; j < f.x2.size(); ++j)
  {
    f.x2[j] = h * static_cast<double>(j);
  }
  f.values.assign(f.x1.size() * f.x2.size(), 0.0);
  const std::size_t iz = static_cast<std::size_t>(cells_of(c.l, h));
  const std::size_t iT = iz + static_cast<std::size_t>(cells_of(c.T, h));
  const std::size_t stride = static_cast<std::size_t>(c.modal_refine);
  const std::size_t z = static_cast<std::size_t>(nl);

  for (const auto &p : lim.reference)
  {
    const double k = p.kappa;
    const Complex v0 = p.u[z], v1 = p.flux_lo[z];
    auto v = [&](double x) { return v0 * std::cos(k * x) + v1 * (std::sin(k * x) / k); };
    auto dv = [&](double x) { return -v0 * (k * std::sin(k * x)) + v1 * std::cos(k * x); };
    auto energy = [&](double x) { return kPi * (std::norm(dv(x)) + k * k * std::norm(v(x))); };

    const double e0 = energy(0.0);
    if (e0 > 0.0)
    {
      for (std::size_t i = iz; i <= iT; ++i)
      {
        lim.energy_deviation =
            std::max(lim.energy_deviation, std::abs(energy(f.x1[i]) - e0) / e0);
      }
    }
    const double scale = std::abs(v0) + std::abs(v1);
    if (scale > 0.0)
    {
      lim.stitch_residual_0 = std::max(
          lim.stitch_residual_0,
          (std::abs(v(0.0) - p.u[z]) + std::abs(dv(0.0) - p.flux_hi[z])) / scale);
      lim.stitch_residual_T = std::max(
          lim.stitch_residual_T,
          (std::abs(v(c.T) - p.u[z]) + std::abs(dv(c.T) - p.flux_hi[z])) / scale);
    }

    for (std::size_t i = 0; i <= n1; ++i)
    {
      Complex val;
      if (i <= iz)
      {
        val = p.u[i * stride];
      }
      else if (i < iT)
      {
        val = v(f.x1[i]);
      }
      else
      {
        val = p.u[(i - (iT - iz)) * stride];
      }
      for (std::size_t j = 1; j + 1 < f.x2.size(); ++j)
      {
        f.at(i, j) += val * std::sin(k * f.x2[j]);
      }
    }
  }
  return lim;
}

InstabilityReport instability_probe(const ToyConfig &c, const std::vector<double> &deltas)
{
  if (deltas.empty())
  {
    throw DomainError("instability probe needs at least one delta");
  }
  InstabilityReport rep;
  std::vector<double> xs, ys;
  for (double d : deltas)
  {
    ToyConfig cd = c;
    cd.delta = d;
    const auto profiles = toy_solve_modal(cd);
    double acc = 0.0;
    for (const auto &p : profiles)
    {
      // int_0^{2 pi} sin^2(kappa x2) = pi for integer and half-integer kappa
      const double k2 = p.kappa * p.kappa;
      for (std::size_t i = 0; i + 1 < p.x1.size(); ++i)
      {
        const double hh = p.x1[i + 1] - p.x1[i];
        const Complex du = (p.u[i + 1] - p.u[i]) / hh;
        const Complex um = 0.5 * (p.u[i] + p.u[i + 1]);
        acc += kPi * hh * (std::norm(du) + (k2 + 1.0) * std::norm(um));
      }
    }
    rep.rows.push_back({d, std::sqrt(acc)});
    xs.push_back(d);
    ys.push_back(std::sqrt(acc));
  }
  double lo = ys.front(), hi = ys.front();
  for (double y : ys)
  {
    lo = std::min(lo, y);
    hi = std::max(hi, y);
  }
  rep.max_min_ratio = lo > 0.0 ? hi / lo : 0.0;
  const auto ismall = std::min_element(xs.begin(), xs.end()) - xs.begin();
  const auto ibig = std::max_element(xs.begin(), xs.end()) - xs.begin();
  rep.ratio = ys[static_cast<std::size_t>(ibig)] > 0.0
                  ? ys[static_cast<std::size_t>(ismall)] / ys[static_cast<std::size_t>(ibig)]
                  : 0.0;
  if (xs.size() >= 3 && lo > 0.0)
  {
    rep.growth_exponent = -estimate_rate(xs, ys).slope;
  }
  return rep;
}

void write_toy_csv(std::ostream &os, const ToyField &f, int stride)
{
  os << "x1,x2,re_u,im_u\n";
  os.precision(17);
  const std::size_t s = static_cast<std::size_t>(std::max(1, stride));
  for (std::size_t i = 0; i < f.x1.size(); i += s)
  {
    for (std::size_t j = 0; j < f.x2.size(); j += s)
    {
      const Complex v = f.at(i, j);
      os << f.x1[i] << ',' << f.x2[j] << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
}

}  // namespace hmlens
