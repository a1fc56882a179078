// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_RATES_HPP
#define HMLENS_RATES_HPP

#include <vector>

#include "hmlens/common.hpp"

namespace hmlens
{

struct RateFit
{
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  // root-mean-square residual of the log-log fit
};

// Least-squares slope of log(errs) against log(xs). Needs at least three points, all
// positive; throws DomainError otherwise.
RateFit estimate_rate(const std::vector<double> &xs, const std::vector<double> &errs);

}  // namespace hmlens

#endif  // HMLENS_RATES_HPP
