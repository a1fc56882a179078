// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <cstdio>
#include <map>
#include <string>

#include "hmlens/harness.hpp"
#include "hmlens/homogenization.hpp"

using namespace hmlens;

namespace
{

struct Invariant
{
  double value = 0.0;
  bool pass = false;
};

std::map<std::string, Invariant> invariants(const RunResult &r)
{
  std::map<std::string, Invariant> out;
  for (const auto &inv : r.report.at("invariants"))
  {
    Invariant v;
    const json &val = inv.at("value");
    v.value = val.is_number() ? val.get<double>() : (val.is_boolean() && val.get<bool>() ? 1.0 : 0.0);
    v.pass = inv.at("pass").get<bool>();
    out[inv.at("name").get<std::string>()] = v;
  }
  return out;
}

class Board
{
public:
  void line(int id, const std::string &title, bool ok, const std::string &detail)
  {
    std::printf("%s [%d] %s: %s\n", ok ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
    all_ = all_ && ok;
  }
  bool all() const { return all_; }

private:
  bool all_ = true;
};

std::string fmt(const char *f, double a, double b = 0.0, double c = 0.0, double d = 0.0)
{
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

RunResult run(ExperimentKind kind)
{
  return run_experiment(preset(kind), RunOptions{});
}

}  // namespace

int main()
{
  Board board;
  const Tolerances tol;
  try
  {
    // 1
    {
      double worst = 0.0;
      for (double delta : {0.5, 0.1, 0.01})
      {
        worst = std::max(worst, closed_form_check(delta).max_deviation);
      }
      board.line(1, "homogenization closed forms", worst <= tol.closed_form,
                 fmt("max deviation %.3e <= %.0e", worst, tol.closed_form));
    }

    const RunResult s2q = run(ExperimentKind::scheme2_quasistatic);
    const auto i2q = invariants(s2q);
    // 2
    board.line(2, "scheme-2 quasistatic superlensing",
               i2q.at("superlens_rate_slope").pass && i2q.at("superlens_final_l2_rel").pass,
               fmt("slope %.3f >= %.1f, error at smallest delta %.3e <= %.0e",
                   i2q.at("superlens_rate_slope").value, tol.superlens_slope_min,
                   i2q.at("superlens_final_l2_rel").value, tol.superlens_final_max));

    // 3
    {
      bool ok = true;
      std::string detail;
      for (ExperimentKind k : {ExperimentKind::scheme1_2d_quasistatic, ExperimentKind::scheme1_2d_k})
      {
        const auto inv = invariants(run(k));
        const bool pass = inv.at("superlens_rate_slope").pass && inv.at("superlens_final_l2_rel").pass &&
                          inv.at("gluing_value").pass && inv.at("gluing_slope").pass;
        ok = ok && pass;
        detail += std::string(k == ExperimentKind::scheme1_2d_k ? " k=1:" : "k=0:") +
                  fmt(" slope %.3f, error %.3e, gluing %.1e/%.1e;", inv.at("superlens_rate_slope").value,
                      inv.at("superlens_final_l2_rel").value, inv.at("gluing_value").value,
                      inv.at("gluing_slope").value);
      }
      board.line(3, "scheme-1 tuned lens", ok, detail);
    }

    // 4
    {
      const auto inv = invariants(run(ExperimentKind::scheme1_3d_k));
      board.line(4, "3-D dispersion periodicity", inv.at("periodicity").pass,
                 fmt("max |v_n(r) - v_n(r + 4 pi)| over n <= 20: %.3e <= %.0e",
                     inv.at("periodicity").value, tol.periodicity));
    }

    // 5
    {
      const auto inv = invariants(run(ExperimentKind::toy));
      board.line(5, "toy shift and energy",
                 inv.at("toy_shift_err_l").pass && inv.at("toy_shift_err_r").pass &&
                     inv.at("toy_energy_equality").pass,
                 fmt("err_l %.3e, err_r %.3e <= %.0e;", inv.at("toy_shift_err_l").value,
                     inv.at("toy_shift_err_r").value, tol.toy_shift) +
                     fmt(" energy %.3e <= %.0e", inv.at("toy_energy_equality").value, tol.toy_energy));
    }

    // 6
    {
      const auto inv = invariants(run(ExperimentKind::instability));
      board.line(6, "instability of the untuned toy",
                 inv.at("untuned_growth_ratio").pass && inv.at("tuned_control_max_min").pass,
                 fmt("untuned growth %.2fx >= %.0fx; tuned max/min %.4f <= %.0f",
                     inv.at("untuned_growth_ratio").value, tol.instability_growth_min,
                     inv.at("tuned_control_max_min").value, tol.tuned_max_min));
    }

    // 7
    const RunResult orc = run(ExperimentKind::validate_oracle);
    {
      const auto inv = invariants(orc);
      board.line(7, "oracle equivalence",
                 inv.at("oracle_modal_l2_finest").pass && inv.at("oracle_refinement_order").pass,
                 fmt("finest relative L2 %.3e <= %.0e; order %.3f >= %.1f",
                     inv.at("oracle_modal_l2_finest").value, tol.oracle_l2,
                     inv.at("oracle_refinement_order").value, tol.oracle_order_min));
    }

    // 8
    {
      double worst = 0.0;
      bool ok = true;
      std::vector<RunResult> runs;
      for (ExperimentKind k : {ExperimentKind::scheme1_2d_quasistatic, ExperimentKind::scheme1_2d_k,
                               ExperimentKind::scheme1_3d_k, ExperimentKind::scheme2_k,
                               ExperimentKind::homogenize})
      {
        runs.push_back(run(k));
      }
      runs.push_back(s2q);
      runs.push_back(orc);
      for (const auto &r : runs)
      {
        const auto inv = invariants(r);
        worst = std::max(worst, inv.at("power_balance_max").value);
        ok = ok && inv.at("power_balance_max").pass;
      }
      board.line(8, "power balance on preset fields", ok,
                 fmt("max residual %.3e <= %.0e over %g presets", worst, tol.power_balance,
                     double(runs.size())));
    }

    // 9
    {
      const auto inv = invariants(run(ExperimentKind::homogenize));
      board.line(9, "homogenization convergence",
                 inv.at("l2_monotone_jitter").pass && inv.at("l2_decreasing_overall").pass &&
                     inv.at("h1_bound_ratio").pass,
                 fmt("worst successive ratio %.3f <= %.1f; H1 max/min %.3f <= %.1f",
                     inv.at("l2_monotone_jitter").value, tol.monotone_jitter,
                     inv.at("h1_bound_ratio").value, tol.h1_bound_ratio));
    }

    // 10
    board.line(10, "reflection symmetry",
               i2q.at("reflection_constructed").pass && i2q.at("reflection_solved_decreasing").pass,
               fmt("constructed %.3e <= %.0e; solved decreasing in delta: ",
                   i2q.at("reflection_constructed").value, tol.reflection_constructed) +
                   (i2q.at("reflection_solved_decreasing").pass ? "yes" : "no"));
  }
  catch (const std::exception &e)
  {
    std::printf("FAIL acceptance aborted: %s\n", e.what());
    return 1;
  }
  std::printf("%s\n", board.all() ? "ALL CRITERIA PASS" : "SOME CRITERIA FAIL");
  return board.all() ? 0 : 1;
}
