// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "hmlens/harness.hpp"

using namespace hmlens;

namespace
{

struct Common
{
  std::string out_dir;
  int threads = 1;
  std::string profile;
  bool dump_config = false;
};

void add_common(CLI::App *app, Common &c)
{
  app->add_option("--out-dir", c.out_dir, "directory for report.json and CSV dumps");
  app->add_option("--threads", c.threads, "worker threads for per-mode solves")
      ->check(CLI::PositiveNumber);
  app->add_option("--tolerance-profile", c.profile, "default or relaxed");
  app->add_flag("--dump-config", c.dump_config, "print the resolved config JSON and exit");
}

void print_summary(const RunResult &r)
{
  const json &cfg = r.report.at("config");
  std::cout << "experiment " << cfg.at("kind").get<std::string>() << " config_hash "
            << r.report.at("runtime").at("config_hash").get<std::string>() << '\n';
  for (const auto &inv : r.report.at("invariants"))
  {
    std::cout << (inv.at("pass").get<bool>() ? "PASS " : "FAIL ")
              << inv.at("name").get<std::string>() << " = " << inv.at("value").dump();
    if (inv.contains("tolerance"))
    {
      std::cout << ' ' << inv.at("relation").get<std::string>() << ' '
                << inv.at("tolerance").dump();
    }
    std::cout << '\n';
  }
  for (const auto &a : r.artifacts)
  {
    std::cout << "wrote " << a << '\n';
  }
  std::cout << (r.pass ? "RESULT PASS" : "RESULT FAIL") << '\n';
}

int execute(ExperimentConfig cfg, const Common &c)
{
  validate_config(cfg);
  if (c.dump_config)
  {
    std::cout << config_to_json(cfg).dump(2) << '\n';
    return exit_pass;
  }
  RunOptions opts;
  opts.out_dir = c.out_dir;
  opts.threads = c.threads;
  if (!c.profile.empty())
  {
    opts.tolerance_profile = c.profile;
  }
  const RunResult r = run_experiment(cfg, opts);
  print_summary(r);
  return r.pass ? exit_pass : exit_invariant_failure;
}

}  // namespace

int main(int argc, char **argv)
{
  CLI::App app{"hmlens: mode-decomposed superlens simulator and verification harness"};
  app.require_subcommand(1);
  Common common;

  std::string config_path;
  auto *run = app.add_subcommand("run", "run an experiment described by a JSON config");
  run->add_option("config", config_path, "experiment config JSON")->required();
  add_common(run, common);

  std::string sweep_preset = "scheme2_quasistatic";
  std::vector<double> deltas;
  auto *sd = app.add_subcommand("sweep-delta", "superlens sweep over the loss parameter");
  sd->add_option("--preset", sweep_preset,
                 "scheme1_2d_quasistatic, scheme1_2d_k, scheme1_3d_k, scheme2_quasistatic "
                 "or scheme2_k");
  sd->add_option("--deltas", deltas, "strictly decreasing loss values")->delimiter(',');
  add_common(sd, common);

  std::vector<double> eps;
  auto *se = app.add_subcommand("sweep-eps", "laminate convergence sweep over the period");
  se->add_option("--eps", eps, "strictly decreasing periods")->delimiter(',');
  add_common(se, common);

  auto *toy = app.add_subcommand("toy", "two-dimensional toy shift comparison");
  add_common(toy, common);
  auto *hom = app.add_subcommand("homogenize", "closed-form checks and laminate convergence");
  add_common(hom, common);
  auto *val = app.add_subcommand("validate", "polar finite-volume oracle against the modal solver");
  add_common(val, common);
  auto *ins = app.add_subcommand("instability", "untuned toy growth and tuned control");
  add_common(ins, common);

  try
  {
    app.parse(argc, argv);
  }
  catch (const CLI::ParseError &e)
  {
    const int rc = app.exit(e);
    return rc == 0 ? exit_pass : exit_config_error;
  }

  try
  {
    ExperimentConfig cfg;
    if (run->parsed())
    {
      std::ifstream is(config_path);
      if (!is)
      {
        throw ConfigError("/", "cannot open config file " + config_path);
      }
      json j;
      try
      {
        j = json::parse(is);
      }
      catch (const json::parse_error &e)
      {
        throw ConfigError("/", std::string("malformed JSON: ") + e.what());
      }
      cfg = config_from_json(j);
    }
    else if (sd->parsed())
    {
      const ExperimentKind kind = experiment_kind_from_string(sweep_preset, "--preset");
      if (!is_superlens_kind(kind))
      {
        throw ConfigError("--preset", "not a superlens experiment: " + sweep_preset);
      }
      cfg = preset(kind);
      if (!deltas.empty())
      {
        cfg.deltas = deltas;
      }
    }
    else if (se->parsed())
    {
      cfg = preset(ExperimentKind::homogenize);
      if (!eps.empty())
      {
        cfg.epsilons = eps;
      }
    }
    else if (toy->parsed())
    {
      cfg = preset(ExperimentKind::toy);
    }
    else if (hom->parsed())
    {
      cfg = preset(ExperimentKind::homogenize);
    }
    else if (val->parsed())
    {
      cfg = preset(ExperimentKind::validate_oracle);
    }
    else
    {
      cfg = preset(ExperimentKind::instability);
    }
    return execute(cfg, common);
  }
  catch (const ConfigError &e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  }
  catch (const DomainError &e)
  {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  }
  catch (const SolverError &e)
  {
    std::cerr << "solver failure: " << e.what();
    if (e.mode() >= 0)
    {
      std::cerr << " (mode " << e.mode() << ", condition estimate " << e.condition_estimate()
                << ')';
    }
    std::cerr << '\n';
    return exit_solver_failure;
  }
  catch (const std::exception &e)
  {
    std::cerr << "solver failure: " << e.what() << '\n';
    return exit_solver_failure;
  }
}
