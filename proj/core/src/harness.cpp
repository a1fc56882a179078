// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "hmlens/homogenization.hpp"
#include "hmlens/limit_solutions.hpp"
#include "hmlens/oracle.hpp"
#include "hmlens/rates.hpp"
#include "io_detail.hpp"

namespace hmlens
{

using namespace detail;

namespace
{

constexpr const char *kVersion = "0.1.0";
constexpr double kExactFloor = 1e-9;

const std::pair<const char *, ExperimentKind> kKinds[] = {
    {"scheme1_2d_quasistatic", ExperimentKind::scheme1_2d_quasistatic},
    {"scheme1_2d_k", ExperimentKind::scheme1_2d_k},
    {"scheme1_3d_k", ExperimentKind::scheme1_3d_k},
    {"scheme2_quasistatic", ExperimentKind::scheme2_quasistatic},
    {"scheme2_k", ExperimentKind::scheme2_k},
    {"toy", ExperimentKind::toy},
    {"homogenize", ExperimentKind::homogenize},
    {"validate_oracle", ExperimentKind::validate_oracle},
    {"instability", ExperimentKind::instability}};

// Asserted invariants of one run.
class Checks
{
public:
  void le(const std::string &name, double value, double tol) { add(name, value, tol, "<="); }
  void ge(const std::string &name, double value, double tol) { add(name, value, tol, ">="); }
  void flag(const std::string &name, bool ok)
  {
    items_.push_back({{"name", name}, {"value", ok}, {"relation", "true"}, {"pass", ok}});
    pass_ = pass_ && ok;
  }
  const json &items() const { return items_; }
  bool pass() const { return pass_; }

private:
  void add(const std::string &name, double value, double tol, const char *rel)
  {
    const bool finite = std::isfinite(value);
    const bool ok = finite && (rel[0] == '<' ? value <= tol : value >= tol);
    json v = finite ? json(value) : json(nullptr);
    items_.push_back({{"name", name}, {"value", v}, {"tolerance", tol}, {"relation", rel},
                      {"pass", ok}});
    pass_ = pass_ && ok;
  }

  json items_ = json::array();
  bool pass_ = true;
};

json rate_json(const std::vector<double> &xs, const std::vector<double> &ys)
{
  const RateFit fit = estimate_rate(xs, ys);
  return {{"slope", fit.slope}, {"intercept", fit.intercept}, {"residual", fit.residual},
          {"points", xs.size()}};
}

bool all_finite(const json &j)
{
  if (j.is_number_float())
  {
    return std::isfinite(j.get<double>());
  }
  if (j.is_structured())
  {
    for (const auto &v : j)
    {
      if (!all_finite(v))
      {
        return false;
      }
    }
  }
  return true;
}

void require_decreasing(const std::vector<double> &xs, const std::string &path)
{
  if (xs.empty())
  {
    throw ConfigError(path, "sweep list is empty");
  }
  for (std::size_t i = 0; i < xs.size(); ++i)
  {
    if (!(xs[i] > 0.0))
    {
      throw ConfigError(path + "/" + std::to_string(i), "sweep values must be positive");
    }
    if (i > 0 && !(xs[i] < xs[i - 1]))
    {
      throw ConfigError(path + "/" + std::to_string(i), "sweep list must be strictly decreasing");
    }
  }
}

double grid_spacing(const ExperimentConfig &cfg)
{
  return cfg.grid_h > 0.0 ? cfg.grid_h : default_grid_spacing(cfg.scenario);
}

class Artifacts
{
public:
  Artifacts(const std::string &dir, bool fields) : dir_(dir), fields_(fields && !dir.empty()) {}

  bool fields() const { return fields_; }
  template <typename Writer>
  void write(const std::string &name, Writer &&writer)
  {
    if (!fields_)
    {
      return;
    }
    const auto path = std::filesystem::path(dir_) / name;
    std::ofstream os(path);
    if (!os)
    {
      throw Error("cannot write " + path.string());
    }
    writer(os);
    written_.push_back(path.string());
  }
  std::vector<std::string> written() const { return written_; }

private:
  std::string dir_;
  bool fields_;
  std::vector<std::string> written_;
};

struct KindOutput
{
  json norms = json::object();
  json rates = json::object();
  json extra = json::object();  // additional top-level sections
  json runtime = json::object();
};

ScenarioSpec with_delta(ScenarioSpec s, double delta)
{
  s.delta = delta;
  return s;
}

KindOutput run_superlens(const ExperimentConfig &cfg, const Tolerances &tol, Checks &checks,
                         Artifacts &art, int threads)
{
  KindOutput out;
  const ScenarioSpec &spec = cfg.scenario;
  const double h = grid_spacing(cfg);
  auto lens0 = std::make_shared<const Scenario>(make_scenario(with_delta(spec, cfg.deltas.front())));
  const RadialGrid grid = RadialGrid::build(lens0->R, lens0->breakpoints(), h);
  auto ref_s = std::make_shared<const Scenario>(magnified_reference_medium(*lens0));
  const Field u_hat = solve_reference(ref_s, cfg.source, cfg.n_max, grid, threads);

  double worst_power = power_balance_residual(u_hat, cfg.source);
  double worst_flux = flux_continuity_defect(u_hat);
  std::vector<double> l2_rel, reflection;
  json rows = json::array();
  Field last;
  for (double delta : cfg.deltas)
  {
    auto s = std::make_shared<const Scenario>(make_scenario(with_delta(spec, delta)));
    Field u = solve_scenario(s, cfg.source, cfg.n_max, grid, threads);
    const SuperlensError e = superlens_error(u, u_hat, spec.r2, s->R);
    const double pb = power_balance_residual(u, cfg.source);
    const double fc = flux_continuity_defect(u);
    worst_power = std::max(worst_power, pb);
    worst_flux = std::max(worst_flux, fc);
    json row = {{"delta", delta},           {"l2_abs", e.l2_abs},
                {"l2_rel", e.l2_rel},       {"h1_abs", e.h1_abs},
                {"h1_rel", e.h1_rel},       {"power_balance", pb},
                {"flux_continuity", fc},    {"h1_norm", u.h1_norm(0.0, s->R)},
                {"lens_energy_deviation", measured_lens_energy_deviation(u)}};
    if (spec.scheme == SchemeTag::scheme2)
    {
      const double refl = reflection_symmetry_error(u, *s);
      row["reflection_error"] = refl;
      reflection.push_back(refl);
    }
    rows.push_back(row);
    l2_rel.push_back(e.l2_rel);
    last = std::move(u);
  }
  out.norms["label"] = "discrete quadrature norms on the solver grid, region r2 < r < R";
  out.norms["delta_sweep"] = rows;
  out.norms["reference_h1_norm"] = u_hat.h1_norm(0.0, ref_s->R);
  if (cfg.deltas.size() >= 3)
  {
    out.rates["superlens_l2_rel"] = rate_json(cfg.deltas, l2_rel);
    checks.ge("superlens_rate_slope", out.rates["superlens_l2_rel"]["slope"].get<double>(),
              tol.superlens_slope_min);
  }
  checks.le("superlens_final_l2_rel", l2_rel.back(), tol.superlens_final_max);
  checks.le("power_balance_max", worst_power, tol.power_balance);
  checks.le("flux_continuity_max", worst_flux, tol.flux_continuity);

  // Limit construction from the reference.
  LimitConstruction lc = spec.scheme == SchemeTag::scheme2 ? extend_scheme2(u_hat, lens0, grid)
                                                           : extend_scheme1(u_hat, lens0, grid);
  json limit = {{"gluing_value", lc.gluing_value},
                {"gluing_slope", lc.gluing_slope},
                {"transmission_r1", lc.transmission_r1},
                {"transmission_r2", lc.transmission_r2},
                {"mode0_defect", lc.mode0_defect},
                {"dropped_modes", lc.dropped_modes}};
  checks.le("gluing_value", lc.gluing_value, tol.gluing);
  checks.le("gluing_slope", lc.gluing_slope, tol.gluing);
  checks.le("transmission_r1", lc.transmission_r1, tol.transmission);
  checks.le("transmission_r2", lc.transmission_r2, tol.transmission);
  if (spec.scheme == SchemeTag::scheme2)
  {
    const double refl0 = reflection_symmetry_error(lc.u0, *lens0);
    limit["reflection_error"] = refl0;
    checks.le("reflection_constructed", refl0, tol.reflection_constructed);
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < reflection.size(); ++i)
    {
      worst_ratio = std::max(worst_ratio, reflection[i] / reflection[i - 1]);
    }
    if (reflection.size() >= 2)
    {
      checks.flag("reflection_solved_decreasing", worst_ratio < 1.0);
    }
  }
  else
  {
    const double energy = lens_energy_invariant(lc);
    limit["lens_energy_deviation"] = energy;
    checks.le("lens_energy_invariant", energy, tol.lens_energy);
    const double period = spec.scheme == SchemeTag::scheme1_3d_k ? 4.0 * kPi : 2.0 * kPi;
    const double per = periodicity_error(lc.transport, spec.r1, spec.r2, period);
    limit["periodicity_error"] = per;
    limit["period"] = period;
    checks.le("periodicity", per, tol.periodicity);
  }
  out.norms["limit"] = limit;
  out.runtime["nodes"] = grid.nodes.size();
  out.runtime["modes"] = u_hat.modes.size();

  art.write("modes_delta_min.csv", [&](std::ostream &os) { write_mode_csv(os, last); });
  art.write("field_delta_min.csv",
            [&](std::ostream &os) { write_field_csv(os, last, cfg.n_theta_dump, cfg.radial_stride); });
  art.write("reference_modes.csv", [&](std::ostream &os) { write_mode_csv(os, u_hat); });
  art.write("limit_modes.csv", [&](std::ostream &os) { write_mode_csv(os, lc.u0); });
  return out;
}

ToyConfig toy_of(const ExperimentConfig &cfg)
{
  ToyConfig c = cfg.toy;
  const Complex a = cfg.toy_a;
  c.a = ToyMedium::scalar([a](double) { return a; });
  return c;
}

double toy_relative(const ToyField &a, const ToyField &b)
{
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
  {
    num += std::norm(a.values[i] - b.values[i]);
    den += std::norm(b.values[i]);
  }
  return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

KindOutput run_toy(const ExperimentConfig &cfg, const Tolerances &tol, Checks &checks,
                   Artifacts &art)
{
  KindOutput out;
  const ToyConfig c = toy_of(cfg);
  if (!c.tuned())
  {
    throw ConfigError("/toy/T", "toy experiments need a tuned T (multiple of 2 pi, or 4 pi for "
                                "the complete basis); use the instability kind for untuned runs");
  }
  const ToyField ud = toy_solve_fd(c);
  const ToyField uh = toy_reference(c);
  const ToyShiftError e = toy_shift_compare(ud, uh, c);
  const ToyField um = toy_synthesize(c, toy_solve_modal(c));
  const double fd_modal = toy_relative(um, ud);
  const ToyLimit lim = toy_limit_modal(c);
  out.norms = {{"label", "discrete quadrature norms on the toy grid"},
               {"err_l", e.err_l},
               {"err_r", e.err_r},
               {"fd_vs_modal", fd_modal},
               {"energy_deviation", lim.energy_deviation},
               {"stitch_residual_0", lim.stitch_residual_0},
               {"stitch_residual_T", lim.stitch_residual_T},
               {"h1_norm", ud.h1_norm()}};
  checks.le("toy_shift_err_l", e.err_l, tol.toy_shift);
  checks.le("toy_shift_err_r", e.err_r, tol.toy_shift);
  checks.le("toy_fd_vs_modal", fd_modal, tol.toy_fd_modal);
  checks.le("toy_energy_equality", lim.energy_deviation, tol.toy_energy);
  checks.le("toy_stitch_0", lim.stitch_residual_0, tol.toy_stitch);
  checks.le("toy_stitch_T", lim.stitch_residual_T, tol.toy_stitch);
  out.runtime["nodes"] = ud.values.size();
  art.write("toy_fd.csv", [&](std::ostream &os) { write_toy_csv(os, ud, cfg.radial_stride); });
  art.write("toy_reference.csv", [&](std::ostream &os) { write_toy_csv(os, uh, cfg.radial_stride); });
  art.write("toy_limit.csv", [&](std::ostream &os) { write_toy_csv(os, lim.u0, cfg.radial_stride); });
  return out;
}

json instability_json(const InstabilityReport &r)
{
  json rows = json::array();
  for (const auto &row : r.rows)
  {
    rows.push_back({{"delta", row.delta}, {"h1_norm", row.h1_norm}});
  }
  return {{"rows", rows},
          {"growth_exponent", r.growth_exponent},
          {"ratio_smallest_to_largest_delta", r.ratio},
          {"max_min_ratio", r.max_min_ratio}};
}

KindOutput run_instability(const ExperimentConfig &cfg, const Tolerances &tol, Checks &checks)
{
  KindOutput out;
  const ToyConfig c = toy_of(cfg);
  const InstabilityReport untuned = instability_probe(c, cfg.deltas);

  ToyConfig tuned = c;
  const double shift = cfg.control_T - c.T;
  tuned.T = cfg.control_T;
  tuned.L = c.L + shift;
  tuned.basis = cfg.control_basis;
  for (auto &s : tuned.sources)
  {
    if (s.center > 0.0)
    {
      s.center += shift;
    }
  }
  if (!tuned.tuned())
  {
    throw ConfigError("/toy/control_T", "control T must be tuned for the control basis");
  }
  const InstabilityReport control = instability_probe(tuned, cfg.deltas);

  // Single mode whose centre transfer is regular at this T.
  ToyConfig filtered = c;
  int best = 1;
  double best_gap = -1.0;
  for (int m = 1; m <= 16; ++m)
  {
    const double gap = std::abs(std::cos(c.kappa(m) * c.T));
    if (gap > best_gap + 1e-12)
    {
      best_gap = gap;
      best = m;
    }
  }
  for (auto &s : filtered.sources)
  {
    s.modes = {ToySourceMode{best, 1.0}};
  }
  const InstabilityReport single = instability_probe(filtered, cfg.deltas);

  out.norms = {{"label", "discrete H1 norms of the modal toy solution"},
               {"untuned", instability_json(untuned)},
               {"tuned_control", instability_json(control)},
               {"single_mode", instability_json(single)},
               {"single_mode_index", best}};
  if (cfg.deltas.size() >= 3)
  {
    std::vector<double> ys;
    for (const auto &r : untuned.rows)
    {
      ys.push_back(r.h1_norm);
    }
    out.rates["untuned_h1_growth"] = rate_json(cfg.deltas, ys);
  }
  checks.ge("untuned_growth_ratio", untuned.ratio, tol.instability_growth_min);
  checks.le("tuned_control_max_min", control.max_min_ratio, tol.tuned_max_min);
  checks.le("single_mode_max_min", single.max_min_ratio, tol.tuned_max_min);
  return out;
}

KindOutput run_homogenize(const ExperimentConfig &cfg, const Tolerances &tol, Checks &checks,
                          int threads)
{
  KindOutput out;
  const ScenarioSpec &spec = cfg.scenario;
  json cf = json::array();
  double worst_dev = 0.0;
  ClosedFormCheck first;
  for (std::size_t i = 0; i < cfg.closed_form_deltas.size(); ++i)
  {
    const ClosedFormCheck chk = closed_form_check(cfg.closed_form_deltas[i], spec.r1, spec.r2);
    if (i == 0)
    {
      first = chk;
    }
    worst_dev = std::max(worst_dev, chk.max_deviation);
    cf.push_back({{"delta", cfg.closed_form_deltas[i]}, {"max_deviation", chk.max_deviation}});
  }
  checks.le("closed_form_deviation", worst_dev, tol.closed_form);
  checks.le("limit_tensor_deviation", first.limit_deviation, tol.limit_tensor);
  checks.le("extrapolated_limit_deviation", first.extrapolated_deviation, tol.extrapolated_limit);
  checks.ge("outer_remainder_slope", first.outer_remainder_slope, tol.remainder_slope_min);
  checks.ge("inner_remainder_slope", first.inner_remainder_slope, tol.remainder_slope_min);

  const ConvergenceReport rep = homogenization_convergence(spec, cfg.epsilons, cfg.modes,
                                                           cfg.source, grid_spacing(cfg), threads);
  json rows = json::array();
  for (const auto &r : rep.rows)
  {
    rows.push_back({{"mode", r.mode},
                    {"eps", r.eps},
                    {"l2_error", r.l2_error},
                    {"flux_error", r.flux_error},
                    {"grad_error", r.grad_error},
                    {"flux_to_grad", r.grad_error > 0.0 ? r.flux_error / r.grad_error : 0.0},
                    {"h1_norm", r.h1_norm},
                    {"nodes", r.nodes}});
  }
  double worst_jitter = 0.0, worst_h1 = 0.0, worst_ratio = 0.0;
  bool overall_down = true;
  const std::size_t ne = cfg.epsilons.size();
  for (std::size_t k = 0; k < rep.modes.size(); ++k)
  {
    double lo = 1e300, hi = 0.0;
    for (std::size_t e = 0; e < ne; ++e)
    {
      const auto &r = rep.rows[k * ne + e];
      lo = std::min(lo, r.h1_norm);
      hi = std::max(hi, r.h1_norm);
      if (r.grad_error > 0.0)
      {
        worst_ratio = std::max(worst_ratio, r.flux_error / r.grad_error);
      }
      // rows at roundoff level (mode 0 homogenizes exactly) carry no trend
      if (e > 0 && r.l2_error > kExactFloor)
      {
        const double prev = rep.rows[k * ne + e - 1].l2_error;
        worst_jitter = std::max(worst_jitter, prev > 0.0 ? r.l2_error / prev : 0.0);
      }
    }
    worst_h1 = std::max(worst_h1, lo > 0.0 ? hi / lo : 0.0);
    const double last = rep.rows[k * ne + ne - 1].l2_error;
    overall_down = overall_down && (last < rep.rows[k * ne].l2_error || last <= kExactFloor);
  }
  json rates = json::array();
  for (std::size_t k = 0; k < rep.modes.size(); ++k)
  {
    rates.push_back({{"mode", rep.modes[k]}, {"observed_l2_rate", rep.l2_rates[k]}});
  }
  out.extra["homogenization"] = {{"label", "discrete quadrature norms on the laminate grid"},
                                 {"closed_form", cf},
                                 {"limit_deviation", first.limit_deviation},
                                 {"extrapolated_deviation", first.extrapolated_deviation},
                                 {"remainder_constants",
                                  {{"outer", first.outer_remainder_constant},
                                   {"inner", first.inner_remainder_constant}}},
                                 {"rows", rows},
                                 {"exact_floor", kExactFloor},
                                 {"harmonic_vs_closed_form", rep.harmonic_vs_closed_form}};
  out.norms["eps_sweep"] = rows;
  out.rates["homogenization_l2"] = rates;
  checks.le("l2_monotone_jitter", worst_jitter, tol.monotone_jitter);
  checks.flag("l2_decreasing_overall", overall_down);
  checks.le("h1_bound_ratio", worst_h1, tol.h1_bound_ratio);
  checks.le("flux_to_gradient_ratio", worst_ratio, tol.flux_gradient_ratio);
  checks.le("homogenized_identity", rep.harmonic_vs_closed_form, tol.homogenized_identity);
  checks.le("power_balance_max", rep.max_power_balance, tol.power_balance);
  out.runtime["nodes"] = rep.rows.empty() ? 0 : rep.rows.back().nodes;
  return out;
}

KindOutput run_oracle(const ExperimentConfig &cfg, const Tolerances &tol, Checks &checks,
                      Artifacts &art, int threads)
{
  KindOutput out;
  auto s = std::make_shared<const Scenario>(make_scenario(cfg.scenario));
  std::vector<double> hs, diffs;
  json rows = json::array();
  double worst_power = 0.0, worst_leak = 0.0, point_diff = 0.0;
  std::size_t unknowns = 0;
  for (std::size_t li = 0; li < cfg.oracle_levels.size(); ++li)
  {
    const OracleLevel &lv = cfg.oracle_levels[li];
    const RadialGrid grid = RadialGrid::build(s->R, s->breakpoints(), lv.h);
    const Field modal = solve_scenario(s, cfg.source, cfg.n_max, grid, threads);
    const PolarField fd = fd_polar_solve(*s, cfg.source, PolarGrid::matched(grid, lv.n_theta));
    const double diff = oracle_modal_difference(fd, modal);
    const double pm = power_balance_residual(modal, cfg.source);
    worst_power = std::max({worst_power, fd.power_balance, pm});

    // Angular leakage at r2: energy outside the source modes.
    const auto spec = angular_spectrum(fd, grid.node_index(s->r2));
    double total = 0.0, leak = 0.0;
    for (int n = 0; n < lv.n_theta; ++n)
    {
      const int folded = std::min(n, lv.n_theta - n);
      const bool in_source =
          std::any_of(cfg.source.modes.begin(), cfg.source.modes.end(),
                      [folded](const SourceMode &m) { return m.n == folded; });
      total += std::norm(spec[n]);
      leak += in_source ? 0.0 : std::norm(spec[n]);
    }
    const double leakage = total > 0.0 ? std::sqrt(leak / total) : 0.0;
    worst_leak = std::max(worst_leak, leakage);
    rows.push_back({{"h", lv.h},
                    {"n_theta", lv.n_theta},
                    {"l2_rel_diff", diff},
                    {"oracle_power_balance", fd.power_balance},
                    {"modal_power_balance", pm},
                    {"angular_leakage", leakage},
                    {"unknowns", fd.unknowns}});
    hs.push_back(lv.h);
    diffs.push_back(diff);
    unknowns = fd.unknowns;

    if (li + 1 == cfg.oracle_levels.size())
    {
      std::mt19937_64 rng(cfg.seed);
      std::uniform_int_distribution<std::size_t> pick_r(0, grid.nodes.size() - 1);
      std::uniform_int_distribution<int> pick_t(0, lv.n_theta - 1);
      double scale = 0.0;
      for (std::size_t i = 0; i < grid.nodes.size(); ++i)
      {
        scale = std::max(scale, std::abs(modal.evaluate(grid.nodes[i], 0.0)));
      }
      for (int k = 0; k < cfg.random_points; ++k)
      {
        const std::size_t i = pick_r(rng);
        const int j = pick_t(rng);
        const double th = fd.grid.theta(j);
        point_diff = std::max(point_diff, std::abs(fd.at(i, j) - modal.evaluate(grid.nodes[i], th)));
      }
      point_diff = scale > 0.0 ? point_diff / scale : point_diff;
      art.write("oracle_field.csv", [&](std::ostream &os) { write_polar_csv(os, fd, cfg.radial_stride); });
      art.write("modal_field.csv", [&](std::ostream &os) {
        write_field_csv(os, modal, lv.n_theta, cfg.radial_stride);
      });
    }
  }
  out.norms = {{"label", "relative discrete L2 over the polar nodes"},
               {"levels", rows},
               {"random_point_max_rel_diff", point_diff},
               {"random_points", cfg.random_points},
               {"delta_floor_note", "oracle runs below delta = 1e-4 are conditioning-limited"}};
  checks.le("oracle_modal_l2_finest", diffs.back(), tol.oracle_l2);
  if (hs.size() >= 3)
  {
    out.rates["oracle_modal_l2"] = rate_json(hs, diffs);
    checks.ge("oracle_refinement_order", out.rates["oracle_modal_l2"]["slope"].get<double>(),
              tol.oracle_order_min);
  }
  checks.le("power_balance_max", worst_power, tol.power_balance);
  checks.le("angular_leakage", worst_leak, tol.oracle_leakage);
  out.runtime["unknowns"] = unknowns;
  return out;
}

json toy_to_json(const ExperimentConfig &c)
{
  json sources = json::array();
  for (const auto &s : c.toy.sources)
  {
    sources.push_back(toy_source_to_json(s));
  }
  return {{"l", c.toy.l},
          {"L", c.toy.L},
          {"T", c.toy.T},
          {"delta", c.toy.delta},
          {"n2", c.toy.n2},
          {"basis", to_string(c.toy.basis)},
          {"modal_refine", c.toy.modal_refine},
          {"a", complex_to_json(c.toy_a)},
          {"sources", sources},
          {"control_T", c.control_T},
          {"control_basis", to_string(c.control_basis)}};
}

ToyBasis basis_from(const std::string &s, const std::string &path)
{
  if (s == "sine")
  {
    return ToyBasis::sine;
  }
  if (s == "complete")
  {
    return ToyBasis::complete;
  }
  throw ConfigError(path, "unknown basis '" + s + "' (expected sine or complete)");
}

}  // namespace

const char *to_string(ExperimentKind kind)
{
  for (const auto &[name, k] : kKinds)
  {
    if (k == kind)
    {
      return name;
    }
  }
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string &name, const std::string &path)
{
  for (const auto &[n, k] : kKinds)
  {
    if (name == n)
    {
      return k;
    }
  }
  throw ConfigError(path, "unknown experiment kind '" + name + "'");
}

bool is_superlens_kind(ExperimentKind kind)
{
  switch (kind)
  {
    case ExperimentKind::scheme1_2d_quasistatic:
    case ExperimentKind::scheme1_2d_k:
    case ExperimentKind::scheme1_3d_k:
    case ExperimentKind::scheme2_quasistatic:
    case ExperimentKind::scheme2_k:
      return true;
    default:
      return false;
  }
}

Tolerances Tolerances::from_profile(const std::string &name)
{
  Tolerances t;
  if (name == "default")
  {
    return t;
  }
  if (name != "relaxed")
  {
    throw ConfigError("/tolerance_profile", "unknown tolerance profile '" + name + "'");
  }
  t.profile = name;
  for (double *p : {&t.superlens_final_max, &t.gluing, &t.transmission, &t.lens_energy,
                    &t.periodicity, &t.reflection_constructed, &t.power_balance,
                    &t.flux_continuity, &t.toy_shift, &t.toy_energy, &t.toy_stitch,
                    &t.toy_fd_modal, &t.oracle_l2, &t.oracle_leakage, &t.closed_form,
                    &t.limit_tensor, &t.extrapolated_limit, &t.homogenized_identity})
  {
    *p *= 10.0;
  }
  for (double *p : {&t.superlens_slope_min, &t.oracle_order_min, &t.remainder_slope_min})
  {
    *p *= 0.8;
  }
  t.instability_growth_min = 5.0;
  t.tuned_max_min = 3.0;
  t.monotone_jitter = 1.25;
  t.h1_bound_ratio = 2.0;
  t.flux_gradient_ratio = 1.5;
  return t;
}

json Tolerances::to_json() const
{
  return {{"profile", profile},
          {"superlens_slope_min", superlens_slope_min},
          {"superlens_final_max", superlens_final_max},
          {"gluing", gluing},
          {"transmission", transmission},
          {"lens_energy", lens_energy},
          {"periodicity", periodicity},
          {"reflection_constructed", reflection_constructed},
          {"power_balance", power_balance},
          {"flux_continuity", flux_continuity},
          {"toy_shift", toy_shift},
          {"toy_energy", toy_energy},
          {"toy_stitch", toy_stitch},
          {"toy_fd_modal", toy_fd_modal},
          {"instability_growth_min", instability_growth_min},
          {"tuned_max_min", tuned_max_min},
          {"oracle_l2", oracle_l2},
          {"oracle_order_min", oracle_order_min},
          {"oracle_leakage", oracle_leakage},
          {"closed_form", closed_form},
          {"limit_tensor", limit_tensor},
          {"extrapolated_limit", extrapolated_limit},
          {"remainder_slope_min", remainder_slope_min},
          {"monotone_jitter", monotone_jitter},
          {"h1_bound_ratio", h1_bound_ratio},
          {"flux_gradient_ratio", flux_gradient_ratio},
          {"homogenized_identity", homogenized_identity}};
}

json config_to_json(const ExperimentConfig &c)
{
  json levels = json::array();
  for (const auto &l : c.oracle_levels)
  {
    levels.push_back({{"h", l.h}, {"n_theta", l.n_theta}});
  }
  return {{"kind", to_string(c.kind)},
          {"scenario", scenario_to_json(c.scenario)},
          {"source", source_to_json(c.source)},
          {"grid", {{"h", c.grid_h}, {"n_max", c.n_max}}},
          {"deltas", c.deltas},
          {"epsilons", c.epsilons},
          {"modes", c.modes},
          {"closed_form_deltas", c.closed_form_deltas},
          {"oracle", {{"levels", levels}, {"random_points", c.random_points}}},
          {"toy", toy_to_json(c)},
          {"seed", c.seed},
          {"tolerance_profile", c.tolerance_profile},
          {"output",
           {{"write_fields", c.write_fields},
            {"n_theta_dump", c.n_theta_dump},
            {"radial_stride", c.radial_stride}}}};
}

ExperimentConfig config_from_json(const json &j)
{
  check_object(j, "", {"kind", "scenario", "source", "grid", "deltas", "epsilons", "modes",
                       "closed_form_deltas", "oracle", "toy", "seed", "tolerance_profile",
                       "output"});
  if (!j.contains("kind"))
  {
    throw ConfigError("/kind", "missing experiment kind");
  }
  const ExperimentKind kind = experiment_kind_from_string(get_string(j, "kind", "", ""));
  // Unspecified entries fall back to the preset of the kind.
  ExperimentConfig c = preset(kind);
  if (j.contains("scenario"))
  {
    c.scenario = scenario_from_json(j.at("scenario"), "/scenario");
  }
  if (j.contains("source"))
  {
    c.source = source_from_json(j.at("source"), "/source");
  }
  if (j.contains("grid"))
  {
    const json &g = j.at("grid");
    check_object(g, "/grid", {"h", "n_max"});
    c.grid_h = get_number(g, "h", "/grid", c.grid_h);
    c.n_max = get_int(g, "n_max", "/grid", c.n_max);
  }
  c.deltas = get_numbers(j, "deltas", "", c.deltas);
  c.epsilons = get_numbers(j, "epsilons", "", c.epsilons);
  c.closed_form_deltas = get_numbers(j, "closed_form_deltas", "", c.closed_form_deltas);
  if (j.contains("modes"))
  {
    const json &m = j.at("modes");
    if (!m.is_array())
    {
      throw ConfigError("/modes", "expected an array of integers");
    }
    c.modes.clear();
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      if (!m[i].is_number_integer() || m[i].get<int>() < 0)
      {
        throw ConfigError("/modes/" + std::to_string(i), "expected a non-negative integer");
      }
      c.modes.push_back(m[i].get<int>());
    }
  }
  if (j.contains("oracle"))
  {
    const json &o = j.at("oracle");
    check_object(o, "/oracle", {"levels", "random_points"});
    c.random_points = get_int(o, "random_points", "/oracle", c.random_points);
    if (o.contains("levels"))
    {
      const json &lv = o.at("levels");
      if (!lv.is_array())
      {
        throw ConfigError("/oracle/levels", "expected an array");
      }
      c.oracle_levels.clear();
      for (std::size_t i = 0; i < lv.size(); ++i)
      {
        const std::string p = "/oracle/levels/" + std::to_string(i);
        check_object(lv[i], p, {"h", "n_theta"});
        c.oracle_levels.push_back(
            OracleLevel{get_number(lv[i], "h", p, 0.0), get_int(lv[i], "n_theta", p, 0)});
      }
    }
  }
  if (j.contains("toy"))
  {
    const json &t = j.at("toy");
    check_object(t, "/toy", {"l", "L", "T", "delta", "n2", "basis", "modal_refine", "a", "sources",
                             "control_T", "control_basis"});
    c.toy.l = get_number(t, "l", "/toy", c.toy.l);
    c.toy.L = get_number(t, "L", "/toy", c.toy.L);
    c.toy.T = get_number(t, "T", "/toy", c.toy.T);
    c.toy.delta = get_number(t, "delta", "/toy", c.toy.delta);
    c.toy.n2 = get_int(t, "n2", "/toy", c.toy.n2);
    c.toy.modal_refine = get_int(t, "modal_refine", "/toy", c.toy.modal_refine);
    if (t.contains("basis"))
    {
      c.toy.basis = basis_from(get_string(t, "basis", "/toy", ""), "/toy/basis");
    }
    if (t.contains("a"))
    {
      c.toy_a = complex_from_json(t.at("a"), "/toy/a");
    }
    if (t.contains("sources"))
    {
      const json &s = t.at("sources");
      if (!s.is_array())
      {
        throw ConfigError("/toy/sources", "expected an array");
      }
      c.toy.sources.clear();
      for (std::size_t i = 0; i < s.size(); ++i)
      {
        c.toy.sources.push_back(toy_source_from_json(s[i], "/toy/sources/" + std::to_string(i)));
      }
    }
    c.control_T = get_number(t, "control_T", "/toy", c.control_T);
    if (t.contains("control_basis"))
    {
      c.control_basis =
          basis_from(get_string(t, "control_basis", "/toy", ""), "/toy/control_basis");
    }
  }
  if (j.contains("seed"))
  {
    if (!j.at("seed").is_number_integer() || j.at("seed").get<std::int64_t>() < 0)
    {
      throw ConfigError("/seed", "expected a non-negative integer");
    }
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  c.tolerance_profile = get_string(j, "tolerance_profile", "", c.tolerance_profile);
  if (j.contains("output"))
  {
    const json &o = j.at("output");
    check_object(o, "/output", {"write_fields", "n_theta_dump", "radial_stride"});
    c.write_fields = get_bool(o, "write_fields", "/output", c.write_fields);
    c.n_theta_dump = get_int(o, "n_theta_dump", "/output", c.n_theta_dump);
    c.radial_stride = get_int(o, "radial_stride", "/output", c.radial_stride);
  }
  validate_config(c);
  return c;
}

void validate_config(const ExperimentConfig &c)
{
  Tolerances::from_profile(c.tolerance_profile);
  if (c.grid_h < 0.0)
  {
    throw ConfigError("/grid/h", "grid spacing must be non-negative (0 selects the default)");
  }
  if (c.n_max < 0)
  {
    throw ConfigError("/grid/n_max", "n_max must be non-negative");
  }
  if (c.n_theta_dump < 1)
  {
    throw ConfigError("/output/n_theta_dump", "must be at least 1");
  }
  if (c.radial_stride < 1)
  {
    throw ConfigError("/output/radial_stride", "must be at least 1");
  }
  if (c.random_points < 0)
  {
    throw ConfigError("/oracle/random_points", "must be non-negative");
  }
  for (std::size_t i = 0; i < c.source.modes.size(); ++i)
  {
    if (c.source.modes[i].n > c.n_max)
    {
      throw ConfigError("/source/modes/" + std::to_string(i) + "/n", "mode exceeds grid.n_max");
    }
  }

  const ScenarioSpec &s = c.scenario;
  auto expect = [](bool ok, const std::string &path, const std::string &msg) {
    if (!ok)
    {
      throw ConfigError(path, msg);
    }
  };
  auto dry_run = [](const ScenarioSpec &spec) {
    try
    {
      (void)build_scenario(spec);
    }
    catch (const DomainError &e)
    {
      throw ConfigError("/scenario", e.what());
    }
  };

  switch (c.kind)
  {
    case ExperimentKind::scheme1_2d_quasistatic:
    case ExperimentKind::scheme1_2d_k:
    case ExperimentKind::scheme1_3d_k:
    case ExperimentKind::scheme2_quasistatic:
    case ExperimentKind::scheme2_k:
    {
      require_decreasing(c.deltas, "/deltas");
      const bool quasi = c.kind == ExperimentKind::scheme1_2d_quasistatic ||
                         c.kind == ExperimentKind::scheme2_quasistatic;
      expect(quasi ? s.k == 0.0 : s.k > 0.0, "/scenario/k",
             quasi ? "quasistatic kinds need k = 0" : "finite-frequency kinds need k > 0");
      const SchemeTag want = c.kind == ExperimentKind::scheme1_3d_k ? SchemeTag::scheme1_3d_k
                             : (c.kind == ExperimentKind::scheme2_quasistatic ||
                                c.kind == ExperimentKind::scheme2_k)
                                 ? SchemeTag::scheme2
                                 : SchemeTag::scheme1_2d;
      expect(s.scheme == want, "/scenario/scheme",
             std::string("kind ") + to_string(c.kind) + " needs scheme " + to_string(want));
      expect(s.variant == LensVariant::ideal && !s.magnified_reference, "/scenario/variant",
             "superlens sweeps use the ideal lens");
      dry_run(with_delta(s, c.deltas.front()));
      break;
    }
    case ExperimentKind::validate_oracle:
      expect(s.d == 2, "/scenario/d", "the oracle is two-dimensional");
      expect(s.delta > 0.0, "/scenario/delta", "oracle runs need delta > 0");
      expect(!c.oracle_levels.empty(), "/oracle/levels", "sweep list is empty");
      for (std::size_t i = 0; i < c.oracle_levels.size(); ++i)
      {
        const std::string p = "/oracle/levels/" + std::to_string(i);
        expect(c.oracle_levels[i].h > 0.0, p + "/h", "spacing must be positive");
        expect(c.oracle_levels[i].n_theta >= 4 && c.oracle_levels[i].n_theta % 2 == 0,
               p + "/n_theta", "n_theta must be even and at least 4");
        expect(i == 0 || c.oracle_levels[i].h < c.oracle_levels[i - 1].h, p + "/h",
               "levels must refine strictly");
      }
      dry_run(s);
      break;
    case ExperimentKind::homogenize:
      require_decreasing(c.epsilons, "/epsilons");
      expect(!c.modes.empty(), "/modes", "mode list is empty");
      expect(!c.closed_form_deltas.empty(), "/closed_form_deltas", "sweep list is empty");
      for (std::size_t i = 0; i < c.closed_form_deltas.size(); ++i)
      {
        const double d = c.closed_form_deltas[i];
        expect(d > 0.0 && d < 1.0, "/closed_form_deltas/" + std::to_string(i),
               "closed-form deltas must lie in (0, 1)");
      }
      expect(s.d == 3, "/scenario/d", "the laminate lens is three-dimensional");
      expect(s.delta > 0.0, "/scenario/delta", "homogenization sweeps need delta > 0");
      for (std::size_t i = 0; i < c.modes.size(); ++i)
      {
        expect(c.modes[i] <= c.n_max, "/modes/" + std::to_string(i), "mode exceeds grid.n_max");
      }
      try
      {
        (void)homogenized_scenario(s);
        (void)laminate_scenario(s, c.epsilons.back());
      }
      catch (const DomainError &e)
      {
        throw ConfigError("/scenario", e.what());
      }
      break;
    case ExperimentKind::toy:
    case ExperimentKind::instability:
    {
      if (c.kind == ExperimentKind::instability)
      {
        require_decreasing(c.deltas, "/deltas");
      }
      expect(!c.toy.sources.empty(), "/toy/sources", "toy experiments need a source");
      try
      {
        ToyConfig t = c.toy;
        if (c.kind == ExperimentKind::instability)
        {
          t.delta = c.deltas.front();
        }
        t.validate();
      }
      catch (const DomainError &e)
      {
        throw ConfigError("/toy", e.what());
      }
      expect(c.kind == ExperimentKind::instability || c.toy.delta > 0.0, "/toy/delta",
             "toy runs need delta > 0");
      break;
    }
  }
}

std::uint64_t config_hash(const json &canonical)
{
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : canonical.dump())
  {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

RunResult run_experiment(const ExperimentConfig &cfg, const RunOptions &opts)
{
  validate_config(cfg);
  const std::string profile = opts.tolerance_profile.value_or(cfg.tolerance_profile);
  const Tolerances tol = Tolerances::from_profile(profile);
  const json canonical = config_to_json(cfg);
  const int threads = std::max(1, opts.threads);

  if (!opts.out_dir.empty())
  {
    std::filesystem::create_directories(opts.out_dir);
  }
  Artifacts art(opts.out_dir, cfg.write_fields);
  Checks checks;
  KindOutput out;
  switch (cfg.kind)
  {
    case ExperimentKind::toy:
      out = run_toy(cfg, tol, checks, art);
      break;
    case ExperimentKind::instability:
      out = run_instability(cfg, tol, checks);
      break;
    case ExperimentKind::homogenize:
      out = run_homogenize(cfg, tol, checks, threads);
      break;
    case ExperimentKind::validate_oracle:
      out = run_oracle(cfg, tol, checks, art, threads);
      break;
    default:
      out = run_superlens(cfg, tol, checks, art, threads);
      break;
  }

  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(config_hash(canonical)));
  json runtime = out.runtime;
  runtime["config_hash"] = hash;
  runtime["seed"] = cfg.seed;
  runtime["tolerances"] = tol.to_json();
  runtime["version"] = kVersion;
  runtime["norm_kind"] = "discrete quadrature norms on the solver grid";

  json report;
  report["config"] = canonical;
  report["norms"] = out.norms;
  report["rates"] = out.rates;
  for (auto it = out.extra.begin(); it != out.extra.end(); ++it)
  {
    report[it.key()] = it.value();
  }
  report["runtime"] = runtime;
  checks.flag("all_numbers_finite", all_finite(report));
  report["invariants"] = checks.items();
  report["pass"] = checks.pass();

  RunResult result;
  result.pass = checks.pass();
  result.report = report;
  result.artifacts = art.written();
  if (!opts.out_dir.empty())
  {
    const auto path = std::filesystem::path(opts.out_dir) / "report.json";
    std::ofstream os(path);
    if (!os)
    {
      throw Error("cannot write " + path.string());
    }
    os << report.dump(2) << '\n';
    result.artifacts.push_back(path.string());
  }
  return result;
}

}  // namespace hmlens
