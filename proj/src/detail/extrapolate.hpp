#pragma once

#include <cmath>
#include <vector>

namespace tscale::detail {

// Aitken's delta-squared on three successive values. Falls back to c unless
// the increments shrink geometrically with a ratio in (0, 0.9]; closer to 1
// the correction amplifies noise more than it removes bias.
inline double aitken(double a, double b, double c) {
  const double d1 = b - a;
  const double d2 = c - b;
  if (d1 == 0.0) return c;
  const double r = d2 / d1;
  if (!(r > 0.0 && r <= 0.9)) return c;
  return c - d2 * d2 / (d2 - d1);
}

// Aitken applied twice over the last five values (once with three or four).
inline double extrapolate_tail(const std::vector<double>& v) {
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  if (n < 3) return v.back();
  if (n < 5) return aitken(v[n - 3], v[n - 2], v[n - 1]);
  const double a0 = aitken(v[n - 5], v[n - 4], v[n - 3]);
  const double a1 = aitken(v[n - 4], v[n - 3], v[n - 2]);
  const double a2 = aitken(v[n - 3], v[n - 2], v[n - 1]);
  return aitken(a0, a1, a2);
}

// The last three values move toward target (distance nonincreasing up to slack).
inline bool trending_toward(const std::vector<double>& v, double target, double slack) {
  const std::size_t n = v.size();
  for (std::size_t i = n >= 3 ? n - 2 : 1; i < n; ++i) {
    if (std::fabs(v[i] - target) > std::fabs(v[i - 1] - target) + slack) return false;
  }
  return true;
}

}  // namespace tscale::detail
