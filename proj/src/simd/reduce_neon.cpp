#include <arm_neon.h>

#include <cmath>
#include <limits>

#include "tscale/simd/reduce.hpp"

namespace tscale::simd {
namespace {

double sum_neon(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vaddq_f64(a0, vld1q_f64(x + i));
    a1 = vaddq_f64(a1, vld1q_f64(x + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) acc += x[i];
  return acc;
}

double dot_neon(const double* x, const double* y, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0), a1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    a0 = vfmaq_f64(a0, vld1q_f64(x + i), vld1q_f64(y + i));
    a1 = vfmaq_f64(a1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
  }
  double acc = vaddvq_f64(vaddq_f64(a0, a1));
  for (; i < n; ++i) acc += x[i] * y[i];
  return acc;
}

double abs_sum_neon(const double* x, std::size_t n) {
  float64x2_t a0 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) a0 = vaddq_f64(a0, vabsq_f64(vld1q_f64(x + i)));
  double acc = vaddvq_f64(a0);
  for (; i < n; ++i) acc += std::fabs(x[i]);
  return acc;
}

double max_abs_neon(const double* x, std::size_t n) {
  float64x2_t m = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) m = vmaxq_f64(m, vabsq_f64(vld1q_f64(x + i)));
  double r = vmaxvq_f64(m);
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    if (a > r) r = a;
  }
  return r;
}

MinMax min_max_neon(const double* x, std::size_t n) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  float64x2_t lo = vdupq_n_f64(inf), hi = vdupq_n_f64(-inf);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vld1q_f64(x + i);
    lo = vminq_f64(lo, v);
    hi = vmaxq_f64(hi, v);
  }
  MinMax r{vminvq_f64(lo), vmaxvq_f64(hi)};
  for (; i < n; ++i) {
    if (x[i] < r.min) r.min = x[i];
    if (x[i] > r.max) r.max = x[i];
  }
  return r;
}

constexpr KernelTable kNeon{"neon", sum_neon, dot_neon, abs_sum_neon, max_abs_neon, min_max_neon};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace tscale::simd
