// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/rates.hpp"

#include <cmath>

#include "hmlens/common.hpp"

namespace hmlens
{

RateFit estimate_rate(const std::vector<double> &xs, const std::vector<double> &errs)
{
  if (xs.size() != errs.size())
  {
    throw DomainError("rate fit needs matching abscissae and errors");
  }
  if (xs.size() < 3)
  {
    throw DomainError("rate fit needs at least three points");
  }
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    if (!(xs[i] > 0.0) || !(errs[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(errs[i]))
    {
      throw DomainError("rate fit needs finite positive values");
    }
    const double lx = std::log(xs[i]), ly = std::log(errs[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (den <= 0.0)
  {
    throw DomainError("rate fit needs distinct abscissae");
  }
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    const double r = std::log(errs[i]) - (fit.intercept + fit.slope * std::log(xs[i]));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace hmlens
