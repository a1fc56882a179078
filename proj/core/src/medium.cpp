// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/medium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace hmlens
{

Complex Polynomial::operator()(double r) const
{
  Complex acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
  {
    acc = acc * r + *it;
  }
  return acc;
}

Polynomial Polynomial::derivative() const
{
  Polynomial out;
  for (std::size_t i = 1; i < coeffs.size(); ++i)
  {
    out.coeffs.push_back(static_cast<double>(i) * coeffs[i]);
  }
  if (out.coeffs.empty())
  {
    out.coeffs.push_back(0.0);
  }
  return out;
}

namespace
{

LayerSpec free_layer(double lo, double hi)
{
  return LayerSpec{lo, hi, [](double) { return Complex(1.0); },
                   [](double) { return Complex(1.0); }, [](double) { return Complex(1.0); },
                   LayerKind::free_space};
}

void require(bool cond, const std::string &message)
{
  if (!cond)
  {
    throw DomainError(message);
  }
}

std::string describe_tuning(double r1, double r2, const char *label)
{
  std::ostringstream os;
  os << "lens thickness r2 - r1 = " << (r2 - r1) << " is not a positive multiple of "
     << label << " (tuning violated)";
  return os.str();
}

}  // namespace

bool is_tuned(double r1, double r2, double period)
{
  const double ratio = (r2 - r1) / period;
  const double nearest = std::round(ratio);
  return nearest >= 1.0 && std::abs(ratio - nearest) <= 1e-9 * std::max(1.0, ratio);
}

std::vector<LayerSpec> build_scheme1_2d(double r1, double r2, double delta, double /*k*/,
                                        Tuning tuning)
{
  require(r1 > 0.0 && r1 < r2, "scheme1_2d requires 0 < r1 < r2");
  require(delta >= 0.0, "loss delta must be non-negative");
  if (tuning == Tuning::enforce && !is_tuned(r1, r2, 2.0 * kPi))
  {
    throw DomainError(describe_tuning(r1, r2, "2*pi"));
  }
  const Complex loss(0.0, delta);
  return {LayerSpec{r1, r2, [loss](double r) { return 1.0 / r - loss; },
                    [loss](double r) { return -r - loss; }, [loss](double) { return loss; },
                    LayerKind::lens}};
}

std::vector<LayerSpec> build_scheme1_3d_k(double r1, double r2, double k, double delta,
                                          Tuning tuning)
{
  require(k > 0.0, "scheme1_3d_k requires k > 0");
  require(r1 > 0.0 && r1 < r2, "scheme1_3d_k requires 0 < r1 < r2");
  require(delta >= 0.0, "loss delta must be non-negative");
  if (tuning == Tuning::enforce && !is_tuned(r1, r2, 4.0 * kPi))
  {
    throw DomainError(describe_tuning(r1, r2, "4*pi"));
  }
  const Complex loss(0.0, delta);
  const double k2 = k * k;
  return {LayerSpec{r1, r2, [loss](double r) { return 1.0 / (r * r) - loss; },
                    [loss](double) { return -1.0 - loss; },
                    [loss, k2](double r) { return 1.0 / (4.0 * k2 * r * r) + loss; },
                    LayerKind::lens}};
}

std::vector<LayerSpec> build_scheme2(int d, double r1, double r2, double delta, double /*k*/,
                                     Scheme2Sigma sigma)
{
  require(d == 2 || d == 3, "dimension must be 2 or 3");
  require(r1 > 0.0 && r1 < r2, "scheme2 requires 0 < r1 < r2");
  require(delta >= 0.0, "loss delta must be non-negative");
  const double rm = 0.5 * (r1 + r2);
  const Complex loss(0.0, delta);
  const double radial_exp = 1.0 - d;
  const double tangential_exp = 3.0 - d;
  auto s = [d, sigma](double r) {
    return sigma == Scheme2Sigma::inverse_square ? 1.0 / (r * r) : std::pow(r, 1.0 - d);
  };
  LayerSpec inner{r1, rm, [=](double r) { return -std::pow(r, radial_exp) - loss; },
                  [=](double r) { return std::pow(r, tangential_exp) - loss; },
                  [=](double r) { return -s(r) + loss; }, LayerKind::lens};
  LayerSpec outer{rm, r2, [=](double r) { return std::pow(r, radial_exp) - loss; },
                  [=](double r) { return -std::pow(r, tangential_exp) - loss; },
                  [=](double r) { return s(r) + loss; }, LayerKind::lens};
  return {inner, outer};
}

std::vector<LayerSpec> build_lens(const ScenarioSpec &spec)
{
  switch (spec.scheme)
  {
    case SchemeTag::scheme1_2d:
      require(spec.d == 2, "scheme1_2d is two-dimensional");
      return build_scheme1_2d(spec.r1, spec.r2, spec.delta, spec.k, spec.tuning);
    case SchemeTag::scheme1_3d_k:
      require(spec.d == 3, "scheme1_3d_k is three-dimensional");
      return build_scheme1_3d_k(spec.r1, spec.r2, spec.k, spec.delta, spec.tuning);
    case SchemeTag::scheme2:
      return build_scheme2(spec.d, spec.r1, spec.r2, spec.delta, spec.k, spec.scheme2_sigma);
    case SchemeTag::none:
      break;
  }
  return {};
}

Scenario assemble_scenario(const ScenarioSpec &spec, std::vector<LayerSpec> lens_layers)
{
  Scenario s;
  static_cast<ScenarioSpec &>(s) = spec;
  s.R = spec.domain_radius();
  s.boundary = spec.boundary_kind();

  const ObjectSpec obj = spec.object;
  if (spec.magnified_reference)
  {
    // Object magnified by r2 / r1 fills B_{r2}.
    const double c = spec.r1 / spec.r2;
    const double a_scale = std::pow(c, spec.d - 2);
    const double s_scale = std::pow(c, spec.d);
    s.layers.push_back(LayerSpec{
        0.0, spec.r2, [obj, c, a_scale](double r) { return a_scale * obj.alpha_r(c * r); },
        [obj, c, a_scale](double r) { return a_scale * obj.alpha_t(c * r); },
        [obj, c, s_scale](double r) { return s_scale * obj.sigma(c * r); }, LayerKind::object});
    if (spec.r2 < s.R)
    {
      s.layers.push_back(free_layer(spec.r2, s.R));
    }
  }
  else
  {
    s.layers.push_back(LayerSpec{0.0, spec.r1, [obj](double r) { return obj.alpha_r(r); },
                                 [obj](double r) { return obj.alpha_t(r); },
                                 [obj](double r) { return obj.sigma(r); }, LayerKind::object});
    double top = spec.r1;
    for (auto &layer : lens_layers)
    {
      s.layers.push_back(std::move(layer));
      top = s.layers.back().r_hi;
    }
    if (top < s.R)
    {
      s.layers.push_back(free_layer(top, s.R));
    }
  }
  s.validate();
  return s;
}

Scenario make_scenario(const ScenarioSpec &spec)
{
  if (spec.variant != LensVariant::ideal && !spec.magnified_reference)
  {
    throw DomainError("laminate and homogenized lenses are built by the homogenization module");
  }
  if (spec.magnified_reference || spec.scheme == SchemeTag::none)
  {
    return assemble_scenario(spec, {});
  }
  return assemble_scenario(spec, build_lens(spec));
}

Scenario magnified_reference_medium(const Scenario &s)
{
  ScenarioSpec spec = s;
  spec.scheme = SchemeTag::none;
  spec.variant = LensVariant::ideal;
  spec.magnified_reference = true;
  return make_scenario(spec);
}

bool Scenario::has_lens() const
{
  return std::any_of(layers.begin(), layers.end(),
                     [](const LayerSpec &l) { return l.kind == LayerKind::lens; });
}

std::vector<double> Scenario::breakpoints() const
{
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < layers.size(); ++i)
  {
    out.push_back(layers[i].r_hi);
  }
  return out;
}

void Scenario::validate() const
{
  require(d == 2 || d == 3, "dimension must be 2 or 3");
  require(k >= 0.0 && std::isfinite(k), "frequency k must be finite and non-negative");
  require(delta >= 0.0 && std::isfinite(delta), "loss delta must be finite and non-negative");
  require(!layers.empty(), "scenario has no layers");
  require(layers.front().r_lo == 0.0, "layers must start at r = 0");
  require(layers.back().r_hi == R, "layers must end at r = R");
  for (std::size_t i = 0; i < layers.size(); ++i)
  {
    require(layers[i].r_lo < layers[i].r_hi, "layer with empty radial extent");
    if (i + 1 < layers.size())
    {
      require(layers[i].r_hi == layers[i + 1].r_lo, "layers must be contiguous");
    }
  }
  if (magnified_reference || scheme == SchemeTag::none)
  {
    require(0.0 < r1 && r1 <= r2 && r2 < R, "reference scenario requires 0 < r1 <= r2 < R");
  }
  else
  {
    require(0.0 < r1 && r1 < r2 && r2 < R, "lens scenario requires 0 < r1 < r2 < R");
  }
  const BoundaryKind bc = *boundary;
  if (bc == BoundaryKind::robin)
  {
    require(k > 0.0, "Robin boundary condition requires k > 0");
  }
  if (bc == BoundaryKind::neumann_gauge)
  {
    require(k == 0.0, "gauged Neumann boundary condition requires k = 0");
  }

  // Ellipticity of every non-lens layer, sampled.
  for (const auto &layer : layers)
  {
    if (layer.kind == LayerKind::lens)
    {
      continue;
    }
    for (int j = 0; j <= 8; ++j)
    {
      const double r = layer.r_lo + (layer.r_hi - layer.r_lo) * (j + 0.5) / 9.0;
      const Complex b1 = layer.b1(r), b2 = layer.b2(r), sg = layer.sigma(r);
      require(std::isfinite(b1.real()) && std::isfinite(b2.real()) && std::isfinite(sg.real()),
              "non-finite coefficient in a non-lens layer");
      require(b1.real() > 0.0 && b2.real() > 0.0, "non-lens layer is not uniformly elliptic");
      if (layer.kind == LayerKind::object)
      {
        require(sg.real() > 0.0 && sg.imag() >= 0.0,
                "object zeroth-order term needs Re sigma > 0 and Im sigma >= 0");
      }
      else
      {
        require(sg.real() > 0.0, "non-lens layer needs Re sigma > 0");
      }
    }
  }
}

CoefficientTriple coefficient_at(std::span<const LayerSpec> layers, double r)
{
  if (layers.empty() || !(r > 0.0) || r > layers.back().r_hi)
  {
    std::ostringstream os;
    os << "radius " << r << " outside (0, R]";
    throw DomainError(os.str());
  }
  auto it = std::lower_bound(layers.begin(), layers.end(), r,
                             [](const LayerSpec &l, double x) { return l.r_hi < x; });
  return CoefficientTriple{it->b1(r), it->b2(r), it->sigma(r)};
}

const char *to_string(SchemeTag tag)
{
  switch (tag)
  {
    case SchemeTag::none:
      return "none";
    case SchemeTag::scheme1_2d:
      return "scheme1_2d";
    case SchemeTag::scheme1_3d_k:
      return "scheme1_3d_k";
    case SchemeTag::scheme2:
      return "scheme2";
  }
  return "unknown";
}

const char *to_string(BoundaryKind kind)
{
  switch (kind)
  {
    case BoundaryKind::robin:
      return "robin";
    case BoundaryKind::neumann_gauge:
      return "neumann_gauge";
    case BoundaryKind::dirichlet:
      return "dirichlet";
  }
  return "unknown";
}

}  // namespace hmlens
