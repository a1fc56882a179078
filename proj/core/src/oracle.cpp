// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/oracle.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <cmath>
#include <ostream>
#include <sstream>

namespace hmlens
{

namespace
{

using SpMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

// Two-point Gauss rule on [a, b].
template <typename F>
void gauss2(double a, double b, F &&f)
{
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double off = half / std::sqrt(3.0);
  f(mid - off, half);
  f(mid + off, half);
}

struct Edge
{
  std::size_t a;
  std::size_t b;
  Complex coef;
};

}  // namespace

PolarGrid PolarGrid::matched(const RadialGrid &radial, int n_theta)
{
  if (n_theta < 4 || n_theta % 2 != 0)
  {
    throw DomainError("n_theta must be even and at least 4");
  }
  return PolarGrid{radial, n_theta};
}

double PolarField::l2_norm(std::size_t ia, std::size_t ib) const
{
  const auto &r = grid.radial.nodes;
  const double dt = grid.dtheta();
  double acc = 0.0;
  for (std::size_t i = ia; i <= ib; ++i)
  {
    const double lo = i > ia ? 0.5 * (r[i] - r[i - 1]) : 0.0;
    const double hi = i < ib ? 0.5 * (r[i + 1] - r[i]) : 0.0;
    if (i == 0)
    {
      acc += kPi * hi * hi * std::norm(center);
      continue;
    }
    for (int j = 0; j < grid.n_theta; ++j)
    {
      acc += r[i] * (lo + hi) * dt * std::norm(at(i, j));
    }
  }
  return std::sqrt(acc);
}

PolarField fd_polar_solve(const Scenario &s, const RingSource &source, const PolarGrid &grid,
                          const ObjectField &object)
{
  if (s.d != 2)
  {
    throw DomainError("the polar oracle is two-dimensional");
  }
  if (s.has_lens() && !(s.delta > 0.0))
  {
    throw DomainError("lens problems need delta > 0");
  }
  const auto &r = grid.radial.nodes;
  if (r.size() < 3 || r.front() != 0.0 || r.back() != s.R)
  {
    throw DomainError("radial grid must cover [0, R]");
  }
  const std::size_t M = r.size() - 1;
  const int N = grid.n_theta;
  const double dt = grid.dtheta();
  const std::size_t n_unknowns = 1 + M * static_cast<std::size_t>(N);
  auto id = [N](std::size_t i, int j) {
    return i == 0 ? std::size_t(0) : 1 + (i - 1) * N + static_cast<std::size_t>((j + N) % N);
  };
  auto coef = [&](double x, double th) {
    if (object && x < s.r1)
    {
      return object(x, th);
    }
    return coefficient_at(s.layers, x);
  };

  const bool support_ok = source.support_lo() > s.r2 && source.support_hi() < s.R;
  bool any_source = false;
  for (const auto &m : source.modes)
  {
    any_source = any_source || m.amplitude != 0.0;
  }
  if (any_source && !support_ok)
  {
    throw DomainError("source support must lie inside (r2, R)");
  }
  const BoundaryKind bc = s.boundary_condition();
  const bool pinned = bc == BoundaryKind::neumann_gauge;

  // Radial control-volume pieces of node i as (a, b) intervals.
  auto pieces = [&](std::size_t i) {
    std::vector<std::pair<double, double>> out;
    if (i > 0)
    {
      out.emplace_back(r[i] - 0.5 * (r[i] - r[i - 1]), r[i]);
    }
    if (i < M)
    {
      out.emplace_back(r[i], r[i] + 0.5 * (r[i + 1] - r[i]));
    }
    return out;
  };

  // Mode-0 balancing centre in this quadrature.
  double c0 = 0.0;
  bool balance = false;
  if (pinned && source.balance_mode0)
  {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i <= M; ++i)
    {
      for (auto [a, b] : pieces(i))
      {
        gauss2(a, b, [&](double x, double w) {
          num += w * x * x * source.profile(x);
          den += w * x * source.profile(x);
        });
      }
    }
    for (const auto &m : source.modes)
    {
      if (m.n == 0 && m.amplitude != 0.0)
      {
        if (den == 0.0)
        {
          throw DomainError("source profile vanishes on the grid");
        }
        balance = true;
      }
    }
    c0 = balance ? num / den : 0.0;
  }
  auto f = [&](double x, double th) {
    Complex acc = 0.0;
    for (const auto &m : source.modes)
    {
      double g = source.profile(x);
      if (m.n == 0 && balance)
      {
        g *= x - c0;
      }
      const ModeIndex mi{2, m.n, m.branch};
      acc += m.amplitude * g * mi.angular(th);
    }
    return acc;
  };

  std::vector<Edge> edges;
  std::vector<Complex> mass(n_unknowns, 0.0), load(n_unknowns, 0.0), robin(n_unknowns, 0.0);
  const double k2 = s.k * s.k;

  // Radial edges.
  for (std::size_t c = 0; c < M; ++c)
  {
    const double hc = r[c + 1] - r[c];
    const double xm = 0.5 * (r[c] + r[c + 1]);
    for (int j = 0; j < N; ++j)
    {
      const Complex e = xm * coef(xm, grid.theta(j)).b1 * dt / hc;
      edges.push_back(Edge{id(c, j), id(c + 1, j), e});
    }
  }
  // Angular edges.
  for (std::size_t i = 1; i <= M; ++i)
  {
    for (int j = 0; j < N; ++j)
    {
      const double th = grid.theta(j) + 0.5 * dt;
      Complex integral = 0.0;
      for (auto [a, b] : pieces(i))
      {
        gauss2(a, b, [&](double x, double w) { integral += w * coef(x, th).b2 / x; });
      }
      edges.push_back(Edge{id(i, j), id(i, j + 1), integral / dt});
    }
  }
  // Mass and load.
  for (std::size_t i = 0; i <= M; ++i)
  {
    for (int j = 0; j < N; ++j)
    {
      const double th = grid.theta(j);
      for (auto [a, b] : pieces(i))
      {
        gauss2(a, b, [&](double x, double w) {
          const CoefficientTriple t = coef(x, th);
          mass[id(i, j)] += k2 * t.sigma * x * w * dt;
          load[id(i, j)] += f(x, th) * x * w * dt;
        });
      }
    }
  }
  if (bc == BoundaryKind::robin)
  {
    for (int j = 0; j < N; ++j)
    {
      robin[id(M, j)] = kI * s.k * s.R * dt;
    }
  }

  std::vector<char> fixed(n_unknowns, 0);
  if (bc == BoundaryKind::dirichlet)
  {
    for (int j = 0; j < N; ++j)
    {
      fixed[id(M, j)] = 1;
    }
  }
  if (pinned)
  {
    fixed[id(M, 0)] = 1;
  }

  std::vector<Triplet> trip;
  trip.reserve(edges.size() * 4 + n_unknowns);
  std::vector<Complex> diag(n_unknowns, 0.0);
  for (const auto &e : edges)
  {
    if (!fixed[e.a])
    {
      diag[e.a] -= e.coef;
      if (!fixed[e.b])
      {
        trip.emplace_back(e.a, e.b, e.coef);
      }
    }
    if (!fixed[e.b])
    {
      diag[e.b] -= e.coef;
      if (!fixed[e.a])
      {
        trip.emplace_back(e.b, e.a, e.coef);
      }
    }
  }
  Eigen::VectorXcd rhs(n_unknowns);
  for (std::size_t p = 0; p < n_unknowns; ++p)
  {
    if (fixed[p])
    {
      trip.emplace_back(p, p, Complex(1.0));
      rhs[p] = 0.0;
    }
    else
    {
      trip.emplace_back(p, p, diag[p] + mass[p] + robin[p]);
      rhs[p] = load[p];
    }
  }
  SpMat A(n_unknowns, n_unknowns);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();

  Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu;
  lu.analyzePattern(A);
  lu.factorize(A);
  if (lu.info() != Eigen::Success)
  {
    throw SolverError("polar oracle factorization failed (near-singular system): " +
                      lu.lastErrorMessage());
  }
  Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite())
  {
    throw SolverError("polar oracle solve produced a non-finite field");
  }
  const double rel_res = (A * x - rhs).norm() / std::max(rhs.norm(), 1e-300);
  if (!(rel_res < 1e-6))
  {
    std::ostringstream os;
    os << "polar oracle residual " << rel_res << " indicates a near-singular system";
    throw SolverError(os.str());
  }

  if (pinned)
  {
    Complex mean = 0.0;
    for (int j = 0; j < N; ++j)
    {
      mean += x[id(M, j)];
    }
    mean /= double(N);
    for (auto &v : x)
    {
      v -= mean;
    }
  }

  PolarField out;
  out.grid = grid;
  out.unknowns = n_unknowns;
  out.center = x[0];
  out.values.assign(x.data() + 1, x.data() + n_unknowns);

  // Imaginary part of the discrete variational identity.
  Complex bilinear = 0.0;
  double scale = 0.0;
  Complex work = 0.0;
  for (const auto &e : edges)
  {
    bilinear -= e.coef * std::norm(x[e.b] - x[e.a]);
  }
  for (std::size_t p = 0; p < n_unknowns; ++p)
  {
    bilinear += (mass[p] + robin[p]) * std::norm(x[p]);
    const Complex fu = std::conj(x[p]) * load[p];
    work += fu;
    scale += std::abs(fu);
  }
  out.power_balance = scale > 0.0 ? std::abs((bilinear - work).imag()) / scale : 0.0;
  return out;
}

std::vector<Complex> angular_spectrum(const std::vector<Complex> &trace)
{
  const std::size_t N = trace.size();
  std::vector<Complex> c(N, 0.0);
  for (std::size_t n = 0; n < N; ++n)
  {
    Complex acc = 0.0;
    for (std::size_t j = 0; j < N; ++j)
    {
      const double ph = -2.0 * kPi * double((n * j) % N) / double(N);
      acc += trace[j] * Complex(std::cos(ph), std::sin(ph));
    }
    c[n] = acc / double(N);
  }
  return c;
}

std::vector<Complex> angular_spectrum(const PolarField &field, std::size_t radial_index)
{
  if (radial_index >= field.grid.radial.nodes.size())
  {
    throw DomainError("radius index outside the polar grid");
  }
  std::vector<Complex> trace(field.grid.n_theta);
  for (int j = 0; j < field.grid.n_theta; ++j)
  {
    trace[j] = field.at(radial_index, j);
  }
  return angular_spectrum(trace);
}

double oracle_modal_difference(const PolarField &fd, const Field &modal)
{
  PolarField diff = fd;
  PolarField ref = fd;
  const auto &r = fd.grid.radial.nodes;
  ref.center = modal.evaluate(0.0, 0.0);
  diff.center = fd.center - ref.center;
  for (std::size_t i = 1; i < r.size(); ++i)
  {
    for (int j = 0; j < fd.grid.n_theta; ++j)
    {
      const std::size_t p = (i - 1) * fd.grid.n_theta + j;
      ref.values[p] = modal.evaluate(r[i], fd.grid.theta(j));
      diff.values[p] = fd.values[p] - ref.values[p];
    }
  }
  const double den = ref.l2_norm(0, r.size() - 1);
  const double num = diff.l2_norm(0, r.size() - 1);
  return den > 0.0 ? num / den : num;
}

void write_polar_csv(std::ostream &os, const PolarField &f, int radial_stride)
{
  os << "r,theta,re_u,im_u\n";
  const auto &r = f.grid.radial.nodes;
  const std::size_t stride = static_cast<std::size_t>(std::max(1, radial_stride));
  for (std::size_t i = 0; i < r.size(); i += stride)
  {
    for (int j = 0; j < f.grid.n_theta; ++j)
    {
      const Complex u = f.at(i, j);
      os << r[i] << ',' << f.grid.theta(j) << ',' << u.real() << ',' << u.imag() << '\n';
    }
  }
}

}  // namespace hmlens
