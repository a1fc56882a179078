// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_SRC_IO_DETAIL_HPP
#define HMLENS_SRC_IO_DETAIL_HPP

#include <initializer_list>
#include <string>
#include <vector>

#include "hmlens/scenario_io.hpp"

namespace hmlens::detail
{

// Rejects non-objects and keys outside `keys`.
void check_object(const json &j, const std::string &path, std::initializer_list<const char *> keys);
double get_number(const json &j, const char *key, const std::string &path, double fallback);
int get_int(const json &j, const char *key, const std::string &path, int fallback);
bool get_bool(const json &j, const char *key, const std::string &path, bool fallback);
std::string get_string(const json &j, const char *key, const std::string &path,
                       const std::string &fallback);
std::vector<double> get_numbers(const json &j, const char *key, const std::string &path,
                                const std::vector<double> &fallback);

}  // namespace hmlens::detail

#endif  // HMLENS_SRC_IO_DETAIL_HPP
