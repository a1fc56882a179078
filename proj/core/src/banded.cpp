// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/banded.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace hmlens
{

std::vector<Complex> TridiagonalSystem::apply(const std::vector<Complex> &x) const
{
  const std::size_t n = size();
  std::vector<Complex> y(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    Complex acc = diag[i] * x[i];
    if (i > 0)
    {
      acc += lower[i - 1] * x[i - 1];
    }
    if (i + 1 < n)
    {
      acc += upper[i] * x[i + 1];
    }
    y[i] = acc;
  }
  return y;
}

double TridiagonalSystem::one_norm() const
{
  const std::size_t n = size();
  double best = 0.0;
  for (std::size_t j = 0; j < n; ++j)
  {
    double col = std::abs(diag[j]);
    if (j > 0)
    {
      col += std::abs(upper[j - 1]);
    }
    if (j + 1 < n)
    {
      col += std::abs(lower[j]);
    }
    best = std::max(best, col);
  }
  return best;
}

TridiagonalLU::TridiagonalLU(const TridiagonalSystem &a)
  : dl_(a.lower), d_(a.diag), du_(a.upper), ipiv_(a.size()), anorm_(a.one_norm())
{
  const std::size_t n = d_.size();
  if (n == 0)
  {
    throw DomainError("empty tridiagonal system");
  }
  if (dl_.size() + 1 != n || du_.size() + 1 != n)
  {
    throw DomainError("tridiagonal band sizes do not match the diagonal");
  }
  du2_.assign(n > 2 ? n - 2 : 0, Complex(0.0));
  for (std::size_t i = 0; i < n; ++i)
  {
    ipiv_[i] = i;
  }
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    if (std::abs(d_[i]) >= std::abs(dl_[i]))
    {
      // no interchange
      if (d_[i] != 0.0)
      {
        const Complex fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      }
    }
    else
    {
      const Complex fact = d_[i] / dl_[i];
      d_[i] = dl_[i];
      dl_[i] = fact;
      const Complex temp = du_[i];
      du_[i] = d_[i + 1];
      d_[i + 1] = temp - fact * d_[i + 1];
      if (i + 2 < n)
      {
        du2_[i] = du_[i + 1];
        du_[i + 1] = -fact * du_[i + 1];
      }
      ipiv_[i] = i + 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i)
  {
    if (d_[i] == 0.0 || !std::isfinite(std::abs(d_[i])))
    {
      std::ostringstream os;
      os << "zero pivot at row " << i << " of " << n;
      throw SolverError(os.str());
    }
  }
  inv_d_.resize(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    inv_d_[i] = 1.0 / d_[i];
  }
}

std::vector<Complex> TridiagonalLU::solve(std::vector<Complex> b) const
{
  const std::size_t n = d_.size();
  for (std::size_t i = 0; i + 1 < n; ++i)
  {
    if (ipiv_[i] == i)
    {
      b[i + 1] -= dl_[i] * b[i];
    }
    else
    {
      const Complex temp = b[i];
      b[i] = b[i + 1];
      b[i + 1] = temp - dl_[i] * b[i];
    }
  }
  b[n - 1] *= inv_d_[n - 1];
  if (n > 1)
  {
    b[n - 2] = (b[n - 2] - du_[n - 2] * b[n - 1]) * inv_d_[n - 2];
  }
  for (std::size_t ii = n > 2 ? n - 2 : 0; ii-- > 0;)
  {
    b[ii] = (b[ii] - du_[ii] * b[ii + 1] - du2_[ii] * b[ii + 2]) * inv_d_[ii];
  }
  return b;
}

std::vector<Complex> TridiagonalLU::solve_adjoint(std::vector<Complex> b) const
{
  const std::size_t n = d_.size();
  b[0] *= std::conj(inv_d_[0]);
  if (n > 1)
  {
    b[1] = (b[1] - std::conj(du_[0]) * b[0]) * std::conj(inv_d_[1]);
  }
  for (std::size_t i = 2; i < n; ++i)
  {
    b[i] = (b[i] - std::conj(du_[i - 1]) * b[i - 1] - std::conj(du2_[i - 2]) * b[i - 2]) *
           std::conj(inv_d_[i]);
  }
  for (std::size_t ii = n - 1; ii-- > 0;)
  {
    if (ipiv_[ii] == ii)
    {
      b[ii] -= std::conj(dl_[ii]) * b[ii + 1];
    }
    else
    {
      const Complex temp = b[ii + 1];
      b[ii + 1] = b[ii] - std::conj(dl_[ii]) * temp;
      b[ii] = temp;
    }
  }
  return b;
}

double TridiagonalLU::condition_estimate() const
{
  const std::size_t n = d_.size();
  auto norm1 = [](const std::vector<Complex> &v) {
    double s = 0.0;
    for (const auto &z : v)
    {
      s += std::abs(z);
    }
    return s;
  };

  std::vector<Complex> x(n, Complex(1.0 / static_cast<double>(n)));
  double est = 0.0;
  std::size_t last_j = n;
  for (int iter = 0; iter < 5; ++iter)
  {
    const std::vector<Complex> y = solve(x);
    est = std::max(est, norm1(y));
    std::vector<Complex> xi(n);
    for (std::size_t i = 0; i < n; ++i)
    {
      const double m = std::abs(y[i]);
      xi[i] = m > 0.0 ? y[i] / m : Complex(1.0);
    }
    const std::vector<Complex> z = solve_adjoint(xi);
    std::size_t j = 0;
    double zmax = 0.0;
    Complex zx = 0.0;
    for (std::size_t i = 0; i < n; ++i)
    {
      if (std::abs(z[i]) > zmax)
      {
        zmax = std::abs(z[i]);
        j = i;
      }
      zx += std::conj(z[i]) * x[i];
    }
    if (iter > 0 && (zmax <= zx.real() || j == last_j))
    {
      break;
    }
    last_j = j;
    std::fill(x.begin(), x.end(), Complex(0.0));
    x[j] = 1.0;
  }

  // Higham's alternating vector guards against the worst cases of the power iteration.
  std::vector<Complex> b(n);
  for (std::size_t i = 0; i < n; ++i)
  {
    const double sign = (i % 2 == 0) ? 1.0 : -1.0;
    b[i] = sign * (1.0 + (n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0));
  }
  const double alt = 2.0 * norm1(solve(b)) / (3.0 * static_cast<double>(n));
  return anorm_ * std::max(est, alt);
}

BandedSolution solve_banded(const TridiagonalSystem &a, int mode)
{
  if (a.rhs.size() != a.size())
  {
    throw DomainError("right-hand side size does not match the system");
  }
  try
  {
    TridiagonalLU lu(a);
    BandedSolution out;
    out.condition_estimate = lu.condition_estimate();
    if (!(out.condition_estimate < 1.0 / std::numeric_limits<double>::epsilon()))
    {
      std::ostringstream os;
      os << "numerically singular system (condition estimate " << out.condition_estimate
         << ")";
      throw SolverError(os.str(), mode, out.condition_estimate);
    }
    out.x = lu.solve(a.rhs);
    for (const auto &z : out.x)
    {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
      {
        throw SolverError("non-finite solution", mode, out.condition_estimate);
      }
    }
    return out;
  }
  catch (const SolverError &e)
  {
    if (e.mode() == mode)
    {
      throw;
    }
    throw SolverError(e.what(), mode, e.condition_estimate());
  }
}

}  // namespace hmlens
