// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_TOY_HPP
#define HMLENS_TOY_HPP

#include <functional>
#include <iosfwd>
#include <vector>

#include "hmlens/common.hpp"

namespace hmlens
{

// Coefficient a on R_l and R_r. The FD path accepts diag(a11, a22) fields; the modal path
// needs a scalar a depending on x1 only.
struct ToyMedium
{
  std::function<Complex(double, double)> a11 = [](double, double) { return Complex(1.0); };
  std::function<Complex(double, double)> a22 = [](double, double) { return Complex(1.0); };
  std::function<Complex(double)> scalar_profile = [](double) { return Complex(1.0); };
  bool separable = true;

  static ToyMedium scalar(std::function<Complex(double)> a);
  static ToyMedium diagonal(std::function<Complex(double, double)> a11,
                            std::function<Complex(double, double)> a22);
};

enum class ToyBasis
{
  sine,     // sin(m x2), m >= 1
  complete  // sin(m x2 / 2), m >= 1
};

struct ToySourceMode
{
  int m = 1;
  Complex amplitude = 1.0;
};

// f = sum_m amplitude_m g(x1) sin(kappa_m x2) with a Gaussian g cut off beyond six widths.
struct ToySource
{
  double center = 0.0;
  double width = 0.1;
  std::vector<ToySourceMode> modes;

  double profile(double x1) const;
  double support_lo() const { return center - 6.0 * width; }
  double support_hi() const { return center + 6.0 * width; }
};

struct ToyConfig
{
  double l = 0.5 * kPi;
  double L = 2.5 * kPi;
  double T = 2.0 * kPi;
  double delta = 1e-3;
  ToyMedium a;
  std::vector<ToySource> sources;
  int n2 = 256;  // x2 intervals; h = 2 pi / n2 in both directions
  ToyBasis basis = ToyBasis::sine;
  int modal_refine = 4;  // modal x1 spacing is h / modal_refine

  double h() const { return 2.0 * kPi / n2; }
  double kappa(int m) const { return basis == ToyBasis::sine ? double(m) : 0.5 * m; }
  bool tuned() const;
  // Throws DomainError unless l, T, L - T are positive multiples of h, sources avoid R_c
  // and lie inside R, and delta >= 0.
  void validate() const;
  Complex source(double x1, double x2) const;
};

// Node values on a tensor grid including the zero Dirichlet boundary.
struct ToyField
{
  std::vector<double> x1;
  std::vector<double> x2;
  std::vector<Complex> values;  // values[i * x2.size() + j]

  Complex at(std::size_t i, std::size_t j) const { return values[i * x2.size() + j]; }
  Complex &at(std::size_t i, std::size_t j) { return values[i * x2.size() + j]; }
  // Discrete norms over x1 indices [i0, i1].
  double l2_norm(std::size_t i0, std::size_t i1) const;
  double h1_seminorm(std::size_t i0, std::size_t i1) const;
  double h1_norm() const;
  std::size_t index_of(double x1) const;
};

struct ToyCoefficients
{
  Complex a11;
  Complex a22;
};

// Conservative 5-point solve of div(A grad u) = f on [x_lo, x_lo + n1 h] x [0, 2 pi] with
// zero Dirichlet data; coefficient(x1, x2) is queried away from grid lines in the normal
// direction and at half-cell offsets x1 +- h/4 along grid lines.
ToyField toy_fd_generic(double x_lo, int n1, int n2,
                        const std::function<ToyCoefficients(double, double)> &coefficient,
                        const std::function<Complex(double, double)> &source);

ToyField toy_solve_fd(const ToyConfig &c);
// u_hat on R_T from the shifted medium and source.
ToyField toy_reference(const ToyConfig &c);

struct ToyModeProfile
{
  int m = 1;
  double kappa = 1.0;
  std::vector<double> x1;
  std::vector<Complex> u;
  std::vector<Complex> flux_lo;  // one-sided flux A1 u' from below at each node
  std::vector<Complex> flux_hi;  // one-sided flux from above
};

// Per-mode x1 profiles on [-l, L] for the modes in `modes` (empty: modes of the source).
std::vector<ToyModeProfile> toy_solve_modal(const ToyConfig &c, std::vector<int> modes = {});
// Synthesis of modal profiles on the FD grid of c.
ToyField toy_synthesize(const ToyConfig &c, const std::vector<ToyModeProfile> &profiles);

struct ToyShiftError
{
  double err_l = 0.0;
  double err_r = 0.0;
};

ToyShiftError toy_shift_compare(const ToyField &u_delta, const ToyField &u_hat,
                                const ToyConfig &c);

// Limit field from the modal reference and closed-form wave transport in R_c.
struct ToyLimit
{
  std::vector<ToyModeProfile> reference;  // u_hat modes on R_T
  ToyField u0;                            // on the FD grid of c
  double energy_deviation = 0.0;          // max over modes of relative energy drift in R_c
  double stitch_residual_0 = 0.0;         // relative value + flux mismatch at x1 = 0
  double stitch_residual_T = 0.0;         // relative value + flux mismatch at x1 = T
};

ToyLimit toy_limit_modal(const ToyConfig &c);

struct InstabilityRow
{
  double delta = 0.0;
  double h1_norm = 0.0;
};

struct InstabilityReport
{
  std::vector<InstabilityRow> rows;
  double growth_exponent = 0.0;  // -slope of log norm versus log delta
  double ratio = 0.0;            // norm at the smallest delta / norm at the largest delta
  double max_min_ratio = 0.0;
};

// H1 norms of the modal solution over a delta list; T is not checked for tuning.
InstabilityReport instability_probe(const ToyConfig &c, const std::vector<double> &deltas);

void write_toy_csv(std::ostream &os, const ToyField &f, int stride = 1);

}  // namespace hmlens

#endif  // HMLENS_TOY_HPP
