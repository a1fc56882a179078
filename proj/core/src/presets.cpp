// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#include "hmlens/harness.hpp"

namespace hmlens
{

namespace
{

RingSource ring(double center, double width, int n_lo, int n_hi, AngularBranch branch)
{
  RingSource s;
  s.center = center;
  s.width = width;
  for (int n = n_lo; n <= n_hi; ++n)
  {
    s.modes.push_back(SourceMode{n, branch, 1.0});
  }
  return s;
}

ToySource toy_ring(double center, double width, int m_lo, int m_hi)
{
  ToySource s;
  s.center = center;
  s.width = width;
  for (int m = m_lo; m <= m_hi; ++m)
  {
    s.modes.push_back(ToySourceMode{m, 1.0});
  }
  return s;
}

ExperimentConfig scheme2_base(double k)
{
  ExperimentConfig c;
  c.scenario.d = 2;
  c.scenario.k = k;
  c.scenario.r1 = 1.0;
  c.scenario.r2 = 2.0;
  c.scenario.R = 3.5;
  c.scenario.scheme = SchemeTag::scheme2;
  c.source = ring(2.75, 0.08, 0, 12, AngularBranch::cosine);
  c.deltas = {1e-2, 1e-3, 1e-4};
  return c;
}

ExperimentConfig scheme1_2d_base(double k)
{
  ExperimentConfig c;
  c.scenario.d = 2;
  c.scenario.k = k;
  c.scenario.r1 = 0.5;
  c.scenario.r2 = 0.5 + 2.0 * kPi;
  c.scenario.scheme = SchemeTag::scheme1_2d;
  // mode 0 has no wave-transport representation at k > 0
  c.source = ring(8.0, 0.15, k > 0.0 ? 1 : 0, 12, AngularBranch::cosine);
  c.deltas = {1e-2, 1e-3, 1e-4};
  return c;
}

}  // namespace

ExperimentConfig preset(ExperimentKind kind)
{
  ExperimentConfig c;
  switch (kind)
  {
    case ExperimentKind::scheme2_quasistatic:
      c = scheme2_base(0.0);
      break;
    case ExperimentKind::scheme2_k:
      c = scheme2_base(1.0);
      break;
    case ExperimentKind::scheme1_2d_quasistatic:
      c = scheme1_2d_base(0.0);
      break;
    case ExperimentKind::scheme1_2d_k:
      c = scheme1_2d_base(1.0);
      c.grid_h = 2e-3;
      break;
    case ExperimentKind::scheme1_3d_k:
      c.scenario.d = 3;
      c.scenario.k = 1.0;
      c.scenario.r1 = 0.5;
      c.scenario.r2 = 0.5 + 4.0 * kPi;
      c.scenario.scheme = SchemeTag::scheme1_3d_k;
      c.source = ring(0.5 + 4.0 * kPi + 1.5, 0.15, 0, 20, AngularBranch::zonal);
      // high degrees need the finer grid; above 1e-4 the loss error is still pre-asymptotic
      c.grid_h = 1e-3;
      c.deltas = {1e-4, 1e-5, 1e-6};
      break;
    case ExperimentKind::validate_oracle:
      c = scheme2_base(0.0);
      c.scenario.delta = 1e-2;
      c.source = ring(2.75, 0.08, 0, 3, AngularBranch::cosine);
      c.deltas.clear();
      c.oracle_levels = {{1.0 / 32.0, 32}, {1.0 / 64.0, 64}, {1.0 / 128.0, 128}};
      break;
    case ExperimentKind::homogenize:
      c.scenario.d = 3;
      c.scenario.k = 0.0;
      c.scenario.delta = 1e-2;
      c.scenario.r1 = 1.0;
      c.scenario.r2 = 2.0;
      c.scenario.R = 3.5;
      c.scenario.scheme = SchemeTag::scheme2;
      c.scenario.boundary = BoundaryKind::dirichlet;
      c.source.center = 2.75;
      c.source.width = 0.08;
      c.modes = {0, 2, 5};
      for (int n : c.modes)
      {
        c.source.modes.push_back(SourceMode{n, AngularBranch::zonal, 1.0});
      }
      {
        double eps = 0.25 * (c.scenario.r2 - 0.5 * (c.scenario.r1 + c.scenario.r2));
        for (int i = 0; i <= 4; ++i, eps *= 0.5)
        {
          c.epsilons.push_back(eps);
        }
      }
      c.closed_form_deltas = {0.5, 0.1, 0.01};
      break;
    case ExperimentKind::toy:
      c.toy.l = 0.5 * kPi;
      c.toy.T = 2.0 * kPi;
      c.toy.L = 2.5 * kPi;
      c.toy.delta = 1e-3;
      c.toy.n2 = 256;
      c.toy.basis = ToyBasis::sine;
      c.toy.sources = {toy_ring(-0.25 * kPi, 0.1, 1, 3), toy_ring(2.25 * kPi, 0.1, 1, 3)};
      break;
    case ExperimentKind::instability:
      c.toy.l = 0.5 * kPi;
      c.toy.T = kPi;
      c.toy.L = 1.5 * kPi;
      c.toy.n2 = 256;
      c.toy.basis = ToyBasis::complete;
      c.toy.sources = {toy_ring(-0.25 * kPi, 0.1, 1, 10), toy_ring(1.25 * kPi, 0.1, 1, 10)};
      c.deltas = {1e-2, 1e-3, 1e-4};
      c.control_T = 2.0 * kPi;
      c.control_basis = ToyBasis::sine;
      break;
  }
  c.kind = kind;
  return c;
}

}  // namespace hmlens
