// Copyright The hmlens Authors. All Rights Reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef HMLENS_BANDED_HPP
#define HMLENS_BANDED_HPP

#include <cstddef>
#include <vector>

#include "hmlens/common.hpp"

namespace hmlens
{

// Complex tridiagonal system. Row i reads lower[i-1] x[i-1] + diag[i] x[i] + upper[i] x[i+1].
struct TridiagonalSystem
{
  std::vector<Complex> lower;
  std::vector<Complex> diag;
  std::vector<Complex> upper;
  std::vector<Complex> rhs;

  std::size_t size() const { return diag.size(); }
  explicit TridiagonalSystem(std::size_t n = 0)
    : lower(n > 0 ? n - 1 : 0), diag(n), upper(n > 0 ? n - 1 : 0), rhs(n)
  {
  }
  // y = A x
  std::vector<Complex> apply(const std::vector<Complex> &x) const;
  double one_norm() const;
};

// LU factorization with partial pivoting (row interchanges), fill-in in a second
// superdiagonal.
class TridiagonalLU
{
public:
  explicit TridiagonalLU(const TridiagonalSystem &a);

  std::vector<Complex> solve(std::vector<Complex> b) const;
  // Solves A^H x = b.
  std::vector<Complex> solve_adjoint(std::vector<Complex> b) const;
  // 1-norm condition number estimate (Hager / Higham).
  double condition_estimate() const;

private:
  std::vector<Complex> dl_, d_, du_, du2_, inv_d_;
  std::vector<std::size_t> ipiv_;
  double anorm_ = 0.0;
};

struct BandedSolution
{
  std::vector<Complex> x;
  double condition_estimate = 0.0;
};

// Factor, solve and estimate the condition. Throws SolverError on a zero pivot or when
// the estimate exceeds 1 / machine epsilon. `mode` is attached to the error.
BandedSolution solve_banded(const TridiagonalSystem &a, int mode = -1);

}  // namespace hmlens

#endif  // HMLENS_BANDED_HPP
