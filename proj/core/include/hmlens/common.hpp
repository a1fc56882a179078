// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_COMMON_HPP
#define HMLENS_COMMON_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hmlens
{

using Complex = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kI{0.0, 1.0};

// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

// Violated precondition or out-of-domain argument.
class DomainError : public Error
{
public:
  using Error::Error;
};

// Malformed experiment or scenario configuration. `path` is a JSON-pointer-like
// location of the offending entry.
class ConfigError : public Error
{
public:
  ConfigError(std::string path, const std::string &message)
    : Error(path + ": " + message), path_(std::move(path))
  {
  }
  const std::string &path() const { return path_; }

private:
  std::string path_;
};

// Linear solve failure. `mode` is the angular degree being solved, or -1 when the
// failure is not tied to a single mode (2-D oracle and toy solves).
class SolverError : public Error
{
public:
  SolverError(const std::string &message, int mode = -1, double condition = 0.0)
    : Error(message), mode_(mode), condition_(condition)
  {
  }
  int mode() const { return mode_; }
  double condition_estimate() const { return condition_; }

private:
  int mode_;
  double condition_;
};

}  // namespace hmlens

#endif  // HMLENS_COMMON_HPP
