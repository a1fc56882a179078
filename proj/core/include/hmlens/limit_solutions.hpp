// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_LIMIT_SOLUTIONS_HPP
#define HMLENS_LIMIT_SOLUTIONS_HPP

#include <memory>
#include <vector>

#include "hmlens/modal_solver.hpp"

namespace hmlens
{

// Radial wave flow v'' + kappa v = 0 through the lens started from Cauchy data at r2.
struct ModeTransport
{
  ModeIndex mode;
  double kappa = 0.0;
  double r2 = 0.0;
  Complex value = 0.0;  // v(r2)
  Complex slope = 0.0;  // v'(r2), equal to the outside flux at r2

  Complex v(double r) const;
  Complex dv(double r) const;
  // |v'|^2 + kappa |v|^2, constant along the flow.
  double energy(double r) const;
  // Amplification max |v| / |v(r2)| scale over a distance `span` from r2.
  double growth(double span) const;
};

struct LensTransport
{
  SchemeTag scheme = SchemeTag::none;
  std::vector<ModeTransport> modes;
};

// kappa of the lens-interior radial equation for the ideal (delta = 0) lens of s.
double lens_kappa(const Scenario &s, const ModeIndex &mode);

struct LimitConstruction
{
  Field u0;
  LensTransport transport;
  // Scheme 1, kappa = 0 modes: |v'(r2)| (r2 - r1); zero otherwise.
  double mode0_defect = 0.0;
  double gluing_value = 0.0;   // max_n |v_n(r1) - v_n(r2)|
  double gluing_slope = 0.0;   // max_n |v_n'(r1) -+ v_n'(r2)| (minus for scheme 1, plus for 2)
  double transmission_r1 = 0.0;  // relative value + flux mismatch at r1
  double transmission_r2 = 0.0;
  std::vector<int> dropped_modes;  // scheme-2 modes above the amplification cap
};

// u_hat for a lens-free scenario.
Field solve_reference(std::shared_ptr<const Scenario> s, const RingSource &source, int n_max,
                      const RadialGrid &grid, int threads = 1);

// Builds u0 from u_hat for the lens scenario s; the lens part of u0 lives on the lens nodes
// of `lens_grid`. Scheme 1 transports the data across the lens, scheme 2 transports across
// the outer shell and reflects through r_m.
LimitConstruction extend_scheme1(const Field &ref, std::shared_ptr<const Scenario> s,
                                 const RadialGrid &lens_grid);
LimitConstruction extend_scheme2(const Field &ref, std::shared_ptr<const Scenario> s,
                                 const RadialGrid &lens_grid, double growth_cap = 1e12);

struct SuperlensError
{
  double l2_abs = 0.0;
  double l2_rel = 0.0;
  double h1_abs = 0.0;
  double h1_rel = 0.0;
};

// Difference of two fields over [a, b]; nodes of both fields must coincide there.
// Modes listed in `exclude` are skipped in both fields.
SuperlensError superlens_error(const Field &u_delta, const Field &u_ref, double a, double b,
                               const std::vector<int> &exclude = {});

// Closed-form energy deviation max |E(r) - E(r2)| / E(r2) over the lens nodes of u0.
double lens_energy_invariant(const LimitConstruction &lc);
// The same quantity from node differences of an arbitrary field (solved or constructed).
double measured_lens_energy_deviation(const Field &field);

// max_n |v_n(r) - v_n(r + period)| over `samples` radii in [r1, r2].
double periodicity_error(const LensTransport &t, double r1, double r2, double period,
                         int samples = 64);

// sup over modes of |v(r_m + s) - v(r_m - s)| relative to the mode's largest lens value.
double reflection_symmetry_error(const Field &u, const Scenario &s);

}  // namespace hmlens

#endif  // HMLENS_LIMIT_SOLUTIONS_HPP
