#pragma once

#include <map>
#include <vector>

#include "cps/scalar.hpp"

namespace cps {

// Exact sparse linear system A x = b over the rational-function field.
struct LinearSystem {
  int ncols = 0;
  std::vector<std::map<int, Scalar>> rows;
  std::vector<Scalar> rhs;

  void add_row(std::map<int, Scalar> coeffs, Scalar r);
};

struct LinearSolution {
  bool consistent = false;
  int rank = 0;
  std::vector<Scalar> particular;  // free unknowns set to zero
  std::vector<int> free_cols;      // unknowns not pinned by any pivot
};

LinearSolution solve(const LinearSystem& sys);

// Dense exact inverse; throws DomainError when the matrix is singular.
std::vector<std::vector<Scalar>> invert_matrix(const std::vector<std::vector<Scalar>>& m);

}  // namespace cps
