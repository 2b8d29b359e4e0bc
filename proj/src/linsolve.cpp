#include "cps/linsolve.hpp"

#include <algorithm>

namespace cps {

void LinearSystem::add_row(std::map<int, Scalar> coeffs, Scalar r) {
  for (auto it = coeffs.begin(); it != coeffs.end();) {
    if (it->first < 0 || it->first >= ncols)
      throw DomainError("linear system: column index out of range");
    if (it->second.is_zero())
      it = coeffs.erase(it);
    else
      ++it;
  }
  rows.push_back(std::move(coeffs));
  rhs.push_back(std::move(r));
}

namespace {

// Pivot preference: fewest nonzero entries in the row, then lowest-degree
// pivot coefficient, then lowest column index (deterministic).
struct PivotChoice {
  int row = -1, col = -1;
  std::size_t row_len = 0;
  int deg = 0;
};

}  // namespace

LinearSolution solve(const LinearSystem& sys) {
  std::vector<std::map<int, Scalar>> rows = sys.rows;
  std::vector<Scalar> rhs = sys.rhs;
  std::vector<bool> row_done(rows.size(), false);
  std::vector<int> pivot_col_of_row(rows.size(), -1);
  std::vector<bool> col_pinned(static_cast<std::size_t>(sys.ncols), false);

  LinearSolution out;
  out.rank = 0;

  while (true) {
    PivotChoice best;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (row_done[r] || rows[r].empty()) continue;
      for (const auto& [c, v] : rows[r]) {
        if (col_pinned[static_cast<std::size_t>(c)]) continue;
        int deg = v.max_degree();
        bool better = false;
        if (best.row < 0) {
          better = true;
        } else if (rows[r].size() != best.row_len) {
          better = rows[r].size() < best.row_len;
        } else if (deg != best.deg) {
          better = deg < best.deg;
        } else {
          better = c < best.col;
        }
        if (better) best = PivotChoice{static_cast<int>(r), c, rows[r].size(), deg};
      }
    }
    if (best.row < 0) break;

    const std::size_t pr = static_cast<std::size_t>(best.row);
    const int pc = best.col;
    Scalar pv = rows[pr].at(pc);

    // Normalize the pivot row.
    for (auto& [c, v] : rows[pr]) v = v / pv;
    rhs[pr] = rhs[pr] / pv;
    rows[pr][pc] = Scalar::one();

    // Eliminate the pivot column from every other row.
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (r == pr) continue;
      auto it = rows[r].find(pc);
      if (it == rows[r].end()) continue;
      Scalar factor = it->second;
      rows[r].erase(it);
      for (const auto& [c, v] : rows[pr]) {
        if (c == pc) continue;
        Scalar nv = (rows[r].count(c) ? rows[r][c] : Scalar::zero()) - factor * v;
        if (nv.is_zero())
          rows[r].erase(c);
        else
          rows[r][c] = nv;
      }
      rhs[r] = rhs[r] - factor * rhs[pr];
    }

    row_done[pr] = true;
    pivot_col_of_row[pr] = pc;
    col_pinned[static_cast<std::size_t>(pc)] = true;
    ++out.rank;
  }

  // Consistency: any fully eliminated row must carry zero right-hand side.
  out.consistent = true;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (!row_done[r] && rows[r].empty() && !rhs[r].is_zero()) {
      out.consistent = false;
      break;
    }
  }

  out.particular.assign(static_cast<std::size_t>(sys.ncols), Scalar::zero());
  if (out.consistent) {
    for (std::size_t r = 0; r < rows.size(); ++r)
      if (pivot_col_of_row[r] >= 0)
        out.particular[static_cast<std::size_t>(pivot_col_of_row[r])] = rhs[r];
  }
  for (int c = 0; c < sys.ncols; ++c)
    if (!col_pinned[static_cast<std::size_t>(c)]) out.free_cols.push_back(c);
  return out;
}

std::vector<std::vector<Scalar>> invert_matrix(const std::vector<std::vector<Scalar>>& m) {
  const std::size_t n = m.size();
  for (const auto& row : m)
    if (row.size() != n) throw DomainError("invert: matrix must be square");

  std::vector<std::vector<Scalar>> a = m;
  std::vector<std::vector<Scalar>> inv(n, std::vector<Scalar>(n, Scalar::zero()));
  for (std::size_t i = 0; i < n; ++i) inv[i][i] = Scalar::one();

  for (std::size_t col = 0; col < n; ++col) {
    // Deterministic pivot: first row with nonzero entry, preferring the
    // lowest-degree coefficient among the first such candidates.
    std::size_t piv = n;
    for (std::size_t r = col; r < n; ++r) {
      if (a[r][col].is_zero()) continue;
      if (piv == n || a[r][col].max_degree() < a[piv][col].max_degree()) piv = r;
    }
    if (piv == n) throw DomainError("invert: singular matrix");
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);

    Scalar p = a[col][col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col][c] = a[col][c] / p;
      inv[col][c] = inv[col][c] / p;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col || a[r][col].is_zero()) continue;
      Scalar f = a[r][col];
      for (std::size_t c = 0; c < n; ++c) {
        a[r][c] = a[r][c] - f * a[col][c];
        inv[r][c] = inv[r][c] - f * inv[col][c];
      }
    }
  }
  return inv;
}

}  // namespace cps
