// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_HOMOGENIZATION_HPP
#define HMLENS_HOMOGENIZATION_HPP

#include <memory>
#include <vector>

#include "hmlens/modal_solver.hpp"

namespace hmlens
{

enum class Shell
{
  outer,  // [r_m, r2]
  inner   // [r1, r_m]
};

// Two-phase radial laminate on [r_lo, r_hi]: phase one where frac(r / eps) < theta.
struct LaminateSpec
{
  Shell shell = Shell::outer;
  double r_lo = 0.0;
  double r_hi = 0.0;
  Profile b1_one;
  Profile b1_zero;
  Profile b2_one;
  Profile b2_zero;
  double theta = 0.5;
  double eps = 0.0;
  double delta = 0.0;

  // Phase values of the three-dimensional quasistatic construction with theta = 1/2.
  static LaminateSpec preset(Shell shell, double r1, double r2, double eps, double delta);
  bool phase_one(double r) const;
  Complex b1(double r) const;
  Complex b2(double r) const;
};

struct EffectiveCoefficients
{
  Profile b1H;  // theta-weighted harmonic mean
  Profile b2H;  // theta-weighted arithmetic mean
};

EffectiveCoefficients effective_coefficients(const LaminateSpec &lam);

// Closed forms of the effective coefficients of the presets.
CoefficientTriple closed_form_effective(Shell shell, double r, double delta);

struct ClosedFormCheck
{
  double max_deviation = 0.0;        // computed vs closed form, both shells
  double limit_deviation = 0.0;      // delta = 0 evaluation vs the ideal lens tensor
  double extrapolated_deviation = 0.0;  // linear extrapolation from delta in {1e-2, 1e-3}
  double outer_remainder_slope = 0.0;   // log-log slope of the O(delta^2) remainders
  double inner_remainder_slope = 0.0;
  double outer_remainder_constant = 0.0;  // max remainder / delta^2
  double inner_remainder_constant = 0.0;
};

ClosedFormCheck closed_form_check(double delta, double r1 = 1.0, double r2 = 2.0);

// Scenario whose lens is the laminate of both presets. Throws DomainError when the grid
// of spacing <= eps / 8 would exceed `node_budget` nodes.
Scenario laminate_scenario(const ScenarioSpec &spec, double eps, double theta = 0.5,
                           std::size_t node_budget = 1000000);

enum class EffectiveSource
{
  harmonic_means,  // evaluate effective_coefficients on the presets
  closed_form      // closed-form expressions
};

Scenario homogenized_scenario(const ScenarioSpec &spec,
                              EffectiveSource from = EffectiveSource::harmonic_means);

// Grid spacing used for a laminate of period eps: min(h_base, eps / 8).
double laminate_spacing(double h_base, double eps);

struct HomogenizationRow
{
  int mode = 0;
  double eps = 0.0;
  double l2_error = 0.0;     // ||u_eps - u_H||_{L2(Omega)}, relative to ||u_H||
  double flux_error = 0.0;   // ||sigma_eps - sigma_H||_{L2(r1, r2)}
  double grad_error = 0.0;   // ||d_r u_eps - d_r u_H||_{L2(r1, r2)}
  double h1_norm = 0.0;      // ||u_eps||_{H1(Omega)}
  std::size_t nodes = 0;
};

struct ConvergenceReport
{
  std::vector<double> abscissae;
  std::vector<HomogenizationRow> rows;  // ordered by (mode, eps)
  std::vector<int> modes;
  // Observed L2 rate per mode (reported, not asserted).
  std::vector<double> l2_rates;
  double harmonic_vs_closed_form = 0.0;  // relative field difference of the two u_H builds
  double max_power_balance = 0.0;        // over every solved u_eps and u_H
};

ConvergenceReport homogenization_convergence(const ScenarioSpec &base,
                                             const std::vector<double> &eps_list,
                                             const std::vector<int> &modes,
                                             const RingSource &source, double h_base,
                                             int threads = 1);

}  // namespace hmlens

#endif  // HMLENS_HOMOGENIZATION_HPP
