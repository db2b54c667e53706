#pragma once

// Reductions over contiguous double buffers.
//
// Every kernel exists as a scalar reference implementation and, where the
// target supports it, as an AVX2 (x86-64) or NEON (AArch64) variant. The
// variant is picked once at first use from the CPU features; setting the
// environment variable TSCALE_SIMD=scalar forces the reference path.
//
// Vector variants reassociate sums, so they agree with the scalar path to
// within n * eps * sum|x_i| rather than bit-for-bit. Sums of integers that
// stay below 2^53 are exact on every path.

#include <cstddef>
#include <span>

namespace tscale::simd {

struct MinMax {
  double min;
  double max;
};

struct KernelTable {
  const char* name;
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  double (*abs_sum)(const double* x, std::size_t n);
  // 0 for an empty buffer.
  double (*max_abs)(const double* x, std::size_t n);
  // {+inf, -inf} for an empty buffer.
  MinMax (*min_max)(const double* x, std::size_t n);
};

const KernelTable& scalar_kernels();

// nullptr when the variant is not compiled in or the CPU lacks the features.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

const KernelTable& active_kernels();

inline double sum(std::span<const double> x) { return active_kernels().sum(x.data(), x.size()); }

inline double dot(std::span<const double> x, std::span<const double> y) {
  return active_kernels().dot(x.data(), y.data(), x.size() < y.size() ? x.size() : y.size());
}

inline double abs_sum(std::span<const double> x) {
  return active_kernels().abs_sum(x.data(), x.size());
}

inline double max_abs(std::span<const double> x) {
  return active_kernels().max_abs(x.data(), x.size());
}

inline MinMax min_max(std::span<const double> x) {
  return active_kernels().min_max(x.data(), x.size());
}

}  // namespace tscale::simd
