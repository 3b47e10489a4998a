#ifndef MINEGAME_LINALG_HPP
#define MINEGAME_LINALG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace minegame {

// Gaussian elimination with partial pivoting on a row-major n*n matrix and
// nrhs right-hand sides stored column-after-column (rhs[j*n + i]).  Returns
// false when a pivot degenerates (singular system); solutions land in rhs.
// Intended for the small excursion / hitting systems (n in the hundreds).
inline bool solve_dense(std::vector<double>& a, std::vector<double>& rhs,
                        int n, int nrhs) {
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::fabs(v));
  const double tiny = 1e-13 * std::max(scale, 1.0);

  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r * n + col]) > std::fabs(a[piv * n + col])) piv = r;
    if (std::fabs(a[piv * n + col]) < tiny) return false;
    if (piv != col) {
      for (int c = col; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      for (int j = 0; j < nrhs; ++j) std::swap(rhs[j * n + col], rhs[j * n + piv]);
    }
    const double inv = 1.0 / a[col * n + col];
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] * inv;
      if (f == 0.0) continue;
      a[r * n + col] = 0.0;
      for (int c = col + 1; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      for (int j = 0; j < nrhs; ++j) rhs[j * n + r] -= f * rhs[j * n + col];
    }
  }
  for (int j = 0; j < nrhs; ++j) {
    for (int r = n - 1; r >= 0; --r) {
      double acc = rhs[j * n + r];
      for (int c = r + 1; c < n; ++c) acc -= a[r * n + c] * rhs[j * n + c];
      rhs[j * n + r] = acc / a[r * n + r];
    }
  }
  return true;
}

}  // namespace minegame

#endif  // MINEGAME_LINALG_HPP
