// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_SCENARIO_IO_HPP
#define HMLENS_SCENARIO_IO_HPP

#include <nlohmann/json.hpp>
#include <string>

#include "hmlens/modal_solver.hpp"
#include "hmlens/toy.hpp"

namespace hmlens
{

using json = nlohmann::json;

// Complex values serialize as [re, im]; a bare number reads as a real value.
json complex_to_json(Complex c);
Complex complex_from_json(const json &j, const std::string &path);

json scenario_to_json(const ScenarioSpec &s);
// Throws ConfigError with the JSON path of the offending entry.
ScenarioSpec scenario_from_json(const json &j, const std::string &path = "/scenario");

json source_to_json(const RingSource &s);
RingSource source_from_json(const json &j, const std::string &path = "/source");

json toy_source_to_json(const ToySource &s);
ToySource toy_source_from_json(const json &j, const std::string &path);

// Scenario of the recipe: ideal lens, magnified reference, laminate or homogenized lens.
Scenario build_scenario(const ScenarioSpec &s);

const char *to_string(AngularBranch b);
const char *to_string(LensVariant v);
const char *to_string(ToyBasis b);

}  // namespace hmlens

#endif  // HMLENS_SCENARIO_IO_HPP
