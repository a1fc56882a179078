// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_ORACLE_HPP
#define HMLENS_ORACLE_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "hmlens/modal_solver.hpp"

namespace hmlens
{

struct PolarGrid
{
  RadialGrid radial;
  int n_theta = 32;

  static PolarGrid matched(const RadialGrid &radial, int n_theta);
  double dtheta() const { return 2.0 * kPi / n_theta; }
  double theta(int j) const { return j * dtheta(); }
};

// Angularly varying object coefficients on r < r1; replaces the radial object profiles.
using ObjectField = std::function<CoefficientTriple(double r, double theta)>;

struct PolarField
{
  PolarGrid grid;
  Complex center = 0.0;
  std::vector<Complex> values;  // values[(i - 1) * n_theta + j] at radial node i >= 1
  double power_balance = 0.0;   // relative residual of the discrete identity
  std::size_t unknowns = 0;

  Complex at(std::size_t i, int j) const
  {
    return i == 0 ? center : values[(i - 1) * grid.n_theta + j];
  }
  // Node quadrature over radial nodes [ia, ib].
  double l2_norm(std::size_t ia, std::size_t ib) const;
};

// Two-dimensional finite-volume solve of div(A grad u) + k^2 Sigma u = f on the disc.
// Needs d = 2. Throws SolverError when the factorization fails.
PolarField fd_polar_solve(const Scenario &s, const RingSource &source, const PolarGrid &grid,
                          const ObjectField &object = {});

// Discrete Fourier coefficients c_n = (1/N) sum_j u_j exp(-i n theta_j), n = 0..N-1.
std::vector<Complex> angular_spectrum(const std::vector<Complex> &trace);
std::vector<Complex> angular_spectrum(const PolarField &field, std::size_t radial_index);

// Relative L2 difference of the oracle field and a modal field on the oracle nodes.
double oracle_modal_difference(const PolarField &fd, const Field &modal);

void write_polar_csv(std::ostream &os, const PolarField &f, int radial_stride = 1);

}  // namespace hmlens

#endif  // HMLENS_ORACLE_HPP
