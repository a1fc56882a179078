// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_MEDIUM_HPP
#define HMLENS_MEDIUM_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "hmlens/common.hpp"

namespace hmlens
{

// Radial profile of one coefficient, r -> value.
using Profile = std::function<Complex(double)>;

enum class SchemeTag
{
  none,
  scheme1_2d,
  scheme1_3d_k,
  scheme2
};

enum class BoundaryKind
{
  robin,          // A grad u . nu - i k u = 0, used for k > 0
  neumann_gauge,  // zero flux, boundary mean of u fixed to zero (k = 0)
  dirichlet       // u = 0
};

// Zeroth-order term of the complementary lens. The reduction-consistent choice s(r) =
// r^{1-d} makes each mode satisfy v'' + (mu_n + k^2) v = 0 in the lens for d = 2 and d = 3.
// The literal choice uses 1/r^2 in both dimensions.
enum class Scheme2Sigma
{
  reduction_consistent,
  inverse_square
};

enum class LayerKind
{
  free_space,
  object,
  lens
};

// Tuned lenses check that the lens thickness matches the radial period. `unchecked`
// bypasses the check for deliberate instability experiments.
enum class Tuning
{
  enforce,
  unchecked
};

enum class LensVariant
{
  ideal,
  laminate,
  homogenized
};

// Complex polynomial in r; objects in the modal path are described by these.
struct Polynomial
{
  std::vector<Complex> coeffs;

  static Polynomial constant(Complex c) { return Polynomial{{c}}; }
  Complex operator()(double r) const;
  Polynomial derivative() const;
};

struct ObjectSpec
{
  Polynomial alpha_r = Polynomial::constant(2.0);
  Polynomial alpha_t = Polynomial::constant(2.0);
  Polynomial sigma = Polynomial::constant(1.0);
};

// One radial layer of A = b1 e_r (x) e_r + b2 (I - e_r (x) e_r) with zeroth-order term sigma.
struct LayerSpec
{
  double r_lo = 0.0;
  double r_hi = 0.0;
  Profile b1;
  Profile b2;
  Profile sigma;
  LayerKind kind = LayerKind::free_space;
};

struct CoefficientTriple
{
  Complex b1;
  Complex b2;
  Complex sigma;
};

// Serializable recipe of a scenario.
struct ScenarioSpec
{
  int d = 2;
  double k = 0.0;
  double delta = 0.0;
  double r1 = 1.0;
  double r2 = 2.0;
  double R = 0.0;  // 0 selects the default 1.25 r2 + 1
  SchemeTag scheme = SchemeTag::none;
  Scheme2Sigma scheme2_sigma = Scheme2Sigma::reduction_consistent;
  std::optional<BoundaryKind> boundary;  // unset: robin when k > 0, else neumann_gauge
  ObjectSpec object;
  bool magnified_reference = false;
  Tuning tuning = Tuning::enforce;
  LensVariant variant = LensVariant::ideal;
  double laminate_eps = 0.0;
  double laminate_theta = 0.5;

  double domain_radius() const { return R > 0.0 ? R : 1.25 * r2 + 1.0; }
  BoundaryKind boundary_kind() const
  {
    return boundary ? *boundary : (k > 0.0 ? BoundaryKind::robin : BoundaryKind::neumann_gauge);
  }
};

// A fully resolved scenario: the recipe with R and boundary filled in, plus the ordered
// layer list partitioning (0, R]. Immutable after construction.
struct Scenario : ScenarioSpec
{
  std::vector<LayerSpec> layers;

  double r_m() const { return 0.5 * (r1 + r2); }
  double outer_radius() const { return R; }
  BoundaryKind boundary_condition() const { return *boundary; }
  bool has_lens() const;
  // Every layer boundary strictly inside (0, R), ascending.
  std::vector<double> breakpoints() const;
  // Throws DomainError when an invariant is violated.
  void validate() const;
};

// Lens builders. Each returns the lens layers only; loss enters as -i delta on b1, b2 and
// +i delta on sigma.
std::vector<LayerSpec> build_scheme1_2d(double r1, double r2, double delta, double k,
                                        Tuning tuning = Tuning::enforce);
std::vector<LayerSpec> build_scheme1_3d_k(double r1, double r2, double k, double delta,
                                          Tuning tuning = Tuning::enforce);
std::vector<LayerSpec> build_scheme2(int d, double r1, double r2, double delta, double k,
                                     Scheme2Sigma sigma = Scheme2Sigma::reduction_consistent);

// Lens layers for `spec.scheme` with the ideal coefficients.
std::vector<LayerSpec> build_lens(const ScenarioSpec &spec);

// Object + lens + free-space assembly. `lens_layers` must cover [r1, r2] exactly.
Scenario assemble_scenario(const ScenarioSpec &spec, std::vector<LayerSpec> lens_layers);

// Builds an ideal-lens or magnified-reference scenario. Laminate variants are built by the
// homogenization module.
Scenario make_scenario(const ScenarioSpec &spec);

// Lens-free scenario whose object is the lens object magnified by r2/r1.
Scenario magnified_reference_medium(const Scenario &s);

// Coefficients of the layer containing r; at an interface the layer below wins.
CoefficientTriple coefficient_at(std::span<const LayerSpec> layers, double r);

// True when (r2 - r1) / period is a positive integer to 1e-9 relative accuracy.
bool is_tuned(double r1, double r2, double period);

const char *to_string(SchemeTag tag);
const char *to_string(BoundaryKind kind);

}  // namespace hmlens

#endif  // HMLENS_MEDIUM_HPP
