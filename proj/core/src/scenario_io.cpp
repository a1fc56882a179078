// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include "hmlens/homogenization.hpp"
#include "io_detail.hpp"

namespace hmlens
{

namespace detail
{

void check_object(const json &j, const std::string &path, std::initializer_list<const char *> keys)
{
  if (!j.is_object())
  {
    throw ConfigError(path, "expected an object");
  }
  for (auto it = j.begin(); it != j.end(); ++it)
  {
    if (std::none_of(keys.begin(), keys.end(), [&](const char *k) { return it.key() == k; }))
    {
      throw ConfigError(path + "/" + it.key(), "unknown key");
    }
  }
}

double get_number(const json &j, const char *key, const std::string &path, double fallback)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  const json &v = j.at(key);
  if (!v.is_number())
  {
    throw ConfigError(path + "/" + key, "expected a number");
  }
  const double x = v.get<double>();
  if (!std::isfinite(x))
  {
    throw ConfigError(path + "/" + key, "expected a finite number");
  }
  return x;
}

int get_int(const json &j, const char *key, const std::string &path, int fallback)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  const json &v = j.at(key);
  if (!v.is_number_integer())
  {
    throw ConfigError(path + "/" + key, "expected an integer");
  }
  return v.get<int>();
}

bool get_bool(const json &j, const char *key, const std::string &path, bool fallback)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  const json &v = j.at(key);
  if (!v.is_boolean())
  {
    throw ConfigError(path + "/" + key, "expected a boolean");
  }
  return v.get<bool>();
}

std::string get_string(const json &j, const char *key, const std::string &path,
                       const std::string &fallback)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  const json &v = j.at(key);
  if (!v.is_string())
  {
    throw ConfigError(path + "/" + key, "expected a string");
  }
  return v.get<std::string>();
}

std::vector<double> get_numbers(const json &j, const char *key, const std::string &path,
                                const std::vector<double> &fallback)
{
  if (!j.contains(key))
  {
    return fallback;
  }
  const json &v = j.at(key);
  const std::string p = path + "/" + key;
  if (!v.is_array())
  {
    throw ConfigError(p, "expected an array of numbers");
  }
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i)
  {
    if (!v[i].is_number() || !std::isfinite(v[i].get<double>()))
    {
      throw ConfigError(p + "/" + std::to_string(i), "expected a finite number");
    }
    out.push_back(v[i].get<double>());
  }
  return out;
}

}  // namespace detail

using namespace detail;

namespace
{

template <typename E>
E parse_enum(const std::string &text, const std::string &path,
             std::initializer_list<std::pair<const char *, E>> table)
{
  for (const auto &[name, value] : table)
  {
    if (text == name)
    {
      return value;
    }
  }
  std::string allowed;
  for (const auto &entry : table)
  {
    allowed += (allowed.empty() ? "" : ", ") + std::string(entry.first);
  }
  throw ConfigError(path, "unknown value '" + text + "' (expected one of " + allowed + ")");
}

json polynomial_to_json(const Polynomial &p)
{
  json arr = json::array();
  for (const auto &c : p.coeffs)
  {
    arr.push_back(complex_to_json(c));
  }
  return arr;
}

Polynomial polynomial_from_json(const json &j, const std::string &path)
{
  if (!j.is_array() || j.empty())
  {
    throw ConfigError(path, "expected a non-empty array of polynomial coefficients");
  }
  Polynomial p;
  for (std::size_t i = 0; i < j.size(); ++i)
  {
    p.coeffs.push_back(complex_from_json(j[i], path + "/" + std::to_string(i)));
  }
  return p;
}

}  // namespace

json complex_to_json(Complex c)
{
  return json::array({c.real(), c.imag()});
}

Complex complex_from_json(const json &j, const std::string &path)
{
  if (j.is_number())
  {
    return Complex(j.get<double>(), 0.0);
  }
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
  {
    const Complex c(j[0].get<double>(), j[1].get<double>());
    if (std::isfinite(c.real()) && std::isfinite(c.imag()))
    {
      return c;
    }
  }
  throw ConfigError(path, "expected a number or a [re, im] pair");
}

const char *to_string(AngularBranch b)
{
  switch (b)
  {
    case AngularBranch::cosine:
      return "cosine";
    case AngularBranch::sine:
      return "sine";
    case AngularBranch::zonal:
      return "zonal";
  }
  return "unknown";
}

const char *to_string(LensVariant v)
{
  switch (v)
  {
    case LensVariant::ideal:
      return "ideal";
    case LensVariant::laminate:
      return "laminate";
    case LensVariant::homogenized:
      return "homogenized";
  }
  return "unknown";
}

const char *to_string(ToyBasis b)
{
  return b == ToyBasis::sine ? "sine" : "complete";
}

json scenario_to_json(const ScenarioSpec &s)
{
  json j;
  j["d"] = s.d;
  j["k"] = s.k;
  j["delta"] = s.delta;
  j["r1"] = s.r1;
  j["r2"] = s.r2;
  j["R"] = s.domain_radius();
  j["scheme"] = to_string(s.scheme);
  j["scheme2_sigma"] =
      s.scheme2_sigma == Scheme2Sigma::inverse_square ? "inverse_square" : "reduction_consistent";
  j["boundary"] = to_string(s.boundary_kind());
  j["object"] = {{"alpha_r", polynomial_to_json(s.object.alpha_r)},
                 {"alpha_t", polynomial_to_json(s.object.alpha_t)},
                 {"sigma", polynomial_to_json(s.object.sigma)}};
  j["magnified_reference"] = s.magnified_reference;
  j["tuning"] = s.tuning == Tuning::enforce ? "enforce" : "unchecked";
  j["variant"] = to_string(s.variant);
  j["laminate_eps"] = s.laminate_eps;
  j["laminate_theta"] = s.laminate_theta;
  return j;
}

ScenarioSpec scenario_from_json(const json &j, const std::string &path)
{
  check_object(j, path,
               {"d", "k", "delta", "r1", "r2", "R", "scheme", "scheme2_sigma", "boundary", "object",
                "magnified_reference", "tuning", "variant", "laminate_eps", "laminate_theta"});
  ScenarioSpec s;
  s.d = get_int(j, "d", path, s.d);
  if (s.d != 2 && s.d != 3)
  {
    throw ConfigError(path + "/d", "dimension must be 2 or 3");
  }
  s.k = get_number(j, "k", path, s.k);
  if (s.k < 0.0)
  {
    throw ConfigError(path + "/k", "frequency must be non-negative");
  }
  s.delta = get_number(j, "delta", path, s.delta);
  if (s.delta < 0.0)
  {
    throw ConfigError(path + "/delta", "loss must be non-negative");
  }
  s.r1 = get_number(j, "r1", path, s.r1);
  s.r2 = get_number(j, "r2", path, s.r2);
  s.R = get_number(j, "R", path, s.R);
  if (!(s.r1 > 0.0))
  {
    throw ConfigError(path + "/r1", "r1 must be positive");
  }
  if (!(s.r2 >= s.r1))
  {
    throw ConfigError(path + "/r2", "r2 must not be below r1");
  }
  if (s.R != 0.0 && !(s.R > s.r2))
  {
    throw ConfigError(path + "/R", "R must exceed r2 (or be 0 for the default)");
  }
  s.scheme = parse_enum<SchemeTag>(get_string(j, "scheme", path, "none"), path + "/scheme",
                                   {{"none", SchemeTag::none},
                                    {"scheme1_2d", SchemeTag::scheme1_2d},
                                    {"scheme1_3d_k", SchemeTag::scheme1_3d_k},
                                    {"scheme2", SchemeTag::scheme2}});
  s.scheme2_sigma = parse_enum<Scheme2Sigma>(
      get_string(j, "scheme2_sigma", path, "reduction_consistent"), path + "/scheme2_sigma",
      {{"reduction_consistent", Scheme2Sigma::reduction_consistent},
       {"inverse_square", Scheme2Sigma::inverse_square}});
  if (j.contains("boundary"))
  {
    s.boundary = parse_enum<BoundaryKind>(get_string(j, "boundary", path, ""), path + "/boundary",
                                          {{"robin", BoundaryKind::robin},
                                           {"neumann_gauge", BoundaryKind::neumann_gauge},
                                           {"dirichlet", BoundaryKind::dirichlet}});
  }
  if (j.contains("object"))
  {
    const std::string op = path + "/object";
    check_object(j.at("object"), op, {"alpha_r", "alpha_t", "sigma"});
    const json &o = j.at("object");
    if (o.contains("alpha_r"))
    {
      s.object.alpha_r = polynomial_from_json(o.at("alpha_r"), op + "/alpha_r");
    }
    if (o.contains("alpha_t"))
    {
      s.object.alpha_t = polynomial_from_json(o.at("alpha_t"), op + "/alpha_t");
    }
    if (o.contains("sigma"))
    {
      s.object.sigma = polynomial_from_json(o.at("sigma"), op + "/sigma");
    }
  }
  s.magnified_reference = get_bool(j, "magnified_reference", path, false);
  s.tuning = parse_enum<Tuning>(get_string(j, "tuning", path, "enforce"), path + "/tuning",
                                {{"enforce", Tuning::enforce}, {"unchecked", Tuning::unchecked}});
  s.variant = parse_enum<LensVariant>(get_string(j, "variant", path, "ideal"), path + "/variant",
                                      {{"ideal", LensVariant::ideal},
                                       {"laminate", LensVariant::laminate},
                                       {"homogenized", LensVariant::homogenized}});
  s.laminate_eps = get_number(j, "laminate_eps", path, 0.0);
  s.laminate_theta = get_number(j, "laminate_theta", path, 0.5);
  if (s.variant == LensVariant::laminate && !(s.laminate_eps > 0.0))
  {
    throw ConfigError(path + "/laminate_eps", "laminate lenses need a positive period");
  }
  if (!(s.laminate_theta > 0.0 && s.laminate_theta < 1.0))
  {
    throw ConfigError(path + "/laminate_theta", "volume fraction must lie in (0, 1)");
  }
  return s;
}

json source_to_json(const RingSource &s)
{
  json modes = json::array();
  for (const auto &m : s.modes)
  {
    modes.push_back(
        {{"n", m.n}, {"branch", to_string(m.branch)}, {"amplitude", complex_to_json(m.amplitude)}});
  }
  return {{"center", s.center},
          {"width", s.width},
          {"balance_mode0", s.balance_mode0},
          {"modes", modes}};
}

RingSource source_from_json(const json &j, const std::string &path)
{
  check_object(j, path, {"center", "width", "balance_mode0", "modes"});
  RingSource s;
  s.center = get_number(j, "center", path, s.center);
  s.width = get_number(j, "width", path, s.width);
  if (!(s.width > 0.0))
  {
    throw ConfigError(path + "/width", "width must be positive");
  }
  s.balance_mode0 = get_bool(j, "balance_mode0", path, true);
  if (j.contains("modes"))
  {
    const json &arr = j.at("modes");
    if (!arr.is_array())
    {
      throw ConfigError(path + "/modes", "expected an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
      const std::string mp = path + "/modes/" + std::to_string(i);
      check_object(arr[i], mp, {"n", "branch", "amplitude"});
      SourceMode m;
      m.n = get_int(arr[i], "n", mp, 0);
      if (m.n < 0)
      {
        throw ConfigError(mp + "/n", "mode index must be non-negative");
      }
      m.branch = parse_enum<AngularBranch>(get_string(arr[i], "branch", mp, "cosine"),
                                           mp + "/branch",
                                           {{"cosine", AngularBranch::cosine},
                                            {"sine", AngularBranch::sine},
                                            {"zonal", AngularBranch::zonal}});
      if (arr[i].contains("amplitude"))
      {
        m.amplitude = complex_from_json(arr[i].at("amplitude"), mp + "/amplitude");
      }
      s.modes.push_back(m);
    }
  }
  return s;
}

json toy_source_to_json(const ToySource &s)
{
  json modes = json::array();
  for (const auto &m : s.modes)
  {
    modes.push_back({{"m", m.m}, {"amplitude", complex_to_json(m.amplitude)}});
  }
  return {{"center", s.center}, {"width", s.width}, {"modes", modes}};
}

ToySource toy_source_from_json(const json &j, const std::string &path)
{
  check_object(j, path, {"center", "width", "modes"});
  ToySource s;
  s.center = get_number(j, "center", path, s.center);
  s.width = get_number(j, "width", path, s.width);
  if (!(s.width > 0.0))
  {
    throw ConfigError(path + "/width", "width must be positive");
  }
  if (j.contains("modes"))
  {
    const json &arr = j.at("modes");
    if (!arr.is_array())
    {
      throw ConfigError(path + "/modes", "expected an array");
    }
    for (std::size_t i = 0; i < arr.size(); ++i)
    {
      const std::string mp = path + "/modes/" + std::to_string(i);
      check_object(arr[i], mp, {"m", "amplitude"});
      ToySourceMode m;
      m.m = get_int(arr[i], "m", mp, 1);
      if (m.m < 1)
      {
        throw ConfigError(mp + "/m", "sine mode index must be at least 1");
      }
      if (arr[i].contains("amplitude"))
      {
        m.amplitude = complex_from_json(arr[i].at("amplitude"), mp + "/amplitude");
      }
      s.modes.push_back(m);
    }
  }
  return s;
}

Scenario build_scenario(const ScenarioSpec &s)
{
  switch (s.variant)
  {
    case LensVariant::laminate:
      return laminate_scenario(s, s.laminate_eps, s.laminate_theta);
    case LensVariant::homogenized:
      return homogenized_scenario(s);
    case LensVariant::ideal:
      break;
  }
  return make_scenario(s);
}

}  // namespace hmlens
