// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_MODAL_SOLVER_HPP
#define HMLENS_MODAL_SOLVER_HPP

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

#include "hmlens/banded.hpp"
#include "hmlens/medium.hpp"

namespace hmlens
{

enum class AngularBranch
{
  cosine,  // d = 2, cos(n theta)
  sine,    // d = 2, sin(n theta)
  zonal    // d = 3, P_n(cos theta)
};

struct ModeIndex
{
  int d = 2;
  int n = 0;
  AngularBranch branch = AngularBranch::cosine;

  // Eigenvalue of minus the Laplace-Beltrami operator on the unit sphere.
  double mu() const { return d == 2 ? double(n) * n : double(n) * (n + 1); }
  // Integral of the squared angular function over the unit sphere.
  double angular_weight() const;
  // Angular function at angle theta (polar angle for d = 3).
  double angular(double theta) const;
  bool operator==(const ModeIndex &o) const
  {
    return d == o.d && n == o.n && branch == o.branch;
  }
};

struct RadialGrid
{
  std::vector<double> nodes;
  double max_spacing = 0.0;

  // Uniform cells of width <= h on each segment between consecutive breakpoints; every
  // breakpoint becomes a node.
  static RadialGrid build(double R, const std::vector<double> &breakpoints, double h);
  std::size_t cells() const { return nodes.size() - 1; }
  // Index of the node equal to r; throws DomainError if r is not a node.
  std::size_t node_index(double r) const;
};

// min(2 pi / 256, (r2 - r1) / 512).
double default_grid_spacing(const ScenarioSpec &s);

struct SourceMode
{
  int n = 0;
  AngularBranch branch = AngularBranch::cosine;
  Complex amplitude = 1.0;
};

// f = sum_n amplitude_n g(r) Y_n. g is a Gaussian ring of the given center and width,
// cut off beyond six widths.
struct RingSource
{
  double center = 0.0;
  double width = 0.1;
  std::vector<SourceMode> modes;
  // Replace g by g (r - c) in the n = 0 block of a gauged Neumann problem so that the
  // discrete compatibility condition holds exactly.
  bool balance_mode0 = true;

  double profile(double r) const;
  double support_lo() const { return center - 6.0 * width; }
  double support_hi() const { return center + 6.0 * width; }
};

// Discrete radial problem (p u')' - q u + w u = rhs with finite-volume data on the grid.
struct ModeProblem
{
  ModeIndex mode;
  const Scenario *scenario = nullptr;
  RadialGrid grid;
  BoundaryKind outer = BoundaryKind::robin;
  bool center_dirichlet = false;
  bool pin_outer = false;   // n = 0 gauged Neumann block: u(R) = 0 during the solve
  double balance_center = 0.0;
  bool balanced = false;

  std::vector<double> h;           // cell widths
  std::vector<Complex> p_mid;      // p at cell midpoints
  std::vector<Complex> mass_lo;    // (w - q) at the quarter point below the node, times h/2
  std::vector<Complex> mass_hi;
  std::vector<Complex> load_lo;    // integral of rhs over the lower half control volume
  std::vector<Complex> load_hi;
  Complex robin = 0.0;             // boundary flux = robin * u(R)

  Complex amplitude = 0.0;  // source amplitude of this mode
  RingSource source;

  Complex p(double r) const;
  Complex q(double r) const;
  Complex w(double r) const;
  Complex rhs(double r) const;
};

// Builds the discrete problem of one mode. The source amplitude of the matching mode (if
// any) enters the right-hand side.
ModeProblem reduce_to_mode(const Scenario &s, const ModeIndex &mode, const RingSource &source,
                           const RadialGrid &grid);

TridiagonalSystem discretize(const ModeProblem &mp);

struct ModeSolution
{
  ModeIndex mode;
  std::vector<double> r;
  std::vector<Complex> u;
  std::vector<Complex> flux_mid;  // p u' on each cell
  std::vector<Complex> flux_lo;   // one-sided flux at each node from below
  std::vector<Complex> flux_hi;   // one-sided flux at each node from above
  double condition = 0.0;
};

ModeSolution solve_mode(const ModeProblem &mp);

struct Field
{
  std::shared_ptr<const Scenario> scenario;
  RadialGrid grid;
  std::vector<ModeSolution> modes;

  // Mode profile lookup; nullptr when the mode is absent (identically zero).
  const ModeSolution *find(const ModeIndex &m) const;
  // Linear interpolation of one mode at r.
  Complex mode_value(const ModeSolution &m, double r) const;
  // Point value; theta is the polar angle for d = 3 (zonal synthesis).
  Complex evaluate(double r, double theta) const;
  // Discrete quadrature norms over the radial region [a, b] (both nodes of the grid).
  double l2_norm(double a, double b) const;
  double h1_seminorm(double a, double b) const;
  double h1_norm(double a, double b) const;
};

// Per-mode L2 and H1-seminorm integrands on [a, b], squared, without angular weights.
double mode_l2_squared(const ModeSolution &m, int d, std::size_t ia, std::size_t ib);
double mode_h1_squared(const ModeSolution &m, int d, std::size_t ia, std::size_t ib);

// Solves every source mode. Mode solves run on up to `threads` threads; the result is
// independent of the thread count. Throws DomainError when a source mode exceeds n_max or
// when a lens problem is posed with delta = 0.
Field solve_scenario(std::shared_ptr<const Scenario> s, const RingSource &source, int n_max,
                     const RadialGrid &grid, int threads = 1);

// Relative imaginary part of the discrete variational identity.
double power_balance_residual(const Field &field, const RingSource &source);

// Largest one-sided flux mismatch over interface nodes, relative to the largest flux.
double flux_continuity_defect(const Field &field);

void write_mode_csv(std::ostream &os, const Field &field);
void write_field_csv(std::ostream &os, const Field &field, int n_theta, int radial_stride = 1);

// Deterministic parallel map over [0, n): body(i) for every i.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)> &body);

}  // namespace hmlens

#endif  // HMLENS_MODAL_SOLVER_HPP
