#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "support/generators.hpp"
#include "tscale/simd/reduce.hpp"

using namespace tscale;
using tscale::testing::Rng;

namespace {

std::vector<const simd::KernelTable*> variants() {
  std::vector<const simd::KernelTable*> v;
  if (const auto* k = simd::avx2_kernels()) v.push_back(k);
  if (const auto* k = simd::neon_kernels()) v.push_back(k);
  return v;
}

const std::vector<std::size_t> kLengths{0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 31, 33, 64, 100, 1023, 4099};

}  // namespace

TEST_SUITE("simd") {
  TEST_CASE("scalar reference on small hand-checked buffers") {
    const auto& s = simd::scalar_kernels();
    const std::vector<double> x{1.0, -2.0, 3.5, -0.5};
    const std::vector<double> y{2.0, 1.0, 0.0, 4.0};
    CHECK(s.sum(x.data(), 4) == 2.0);
    CHECK(s.dot(x.data(), y.data(), 4) == -2.0);
    CHECK(s.abs_sum(x.data(), 4) == 7.0);
    CHECK(s.max_abs(x.data(), 4) == 3.5);
    CHECK(s.min_max(x.data(), 4).min == -2.0);
    CHECK(s.min_max(x.data(), 4).max == 3.5);
    CHECK(s.max_abs(x.data(), 0) == 0.0);
    CHECK(s.min_max(x.data(), 0).min == std::numeric_limits<double>::infinity());
  }

  TEST_CASE("vector variants agree with the scalar reference") {
    const auto& ref = simd::scalar_kernels();
    Rng rng(17);
    for (const auto* k : variants()) {
      CAPTURE(k->name);
      for (std::size_t n : kLengths) {
        CAPTURE(n);
        std::vector<double> x(n), y(n);
        for (std::size_t i = 0; i < n; ++i) {
          x[i] = rng.uniform(-1e3, 1e3);
          y[i] = rng.uniform(-1.0, 1.0);
        }
        const double scale = ref.abs_sum(x.data(), n) + 1.0;
        const double bound = 4.0 * static_cast<double>(n + 1) * std::numeric_limits<double>::epsilon() * scale;
        CHECK(std::fabs(k->sum(x.data(), n) - ref.sum(x.data(), n)) <= bound);
        CHECK(std::fabs(k->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= bound);
        CHECK(std::fabs(k->abs_sum(x.data(), n) - ref.abs_sum(x.data(), n)) <= bound);
        CHECK(k->max_abs(x.data(), n) == ref.max_abs(x.data(), n));
        CHECK(k->min_max(x.data(), n).min == ref.min_max(x.data(), n).min);
        CHECK(k->min_max(x.data(), n).max == ref.min_max(x.data(), n).max);
      }
    }
  }

  TEST_CASE("integer-valued buffers reduce exactly on every path") {
    Rng rng(5);
    for (const auto* k : variants()) {
      for (std::size_t n : kLengths) {
        std::vector<double> x(n), y(n);
        long long sum = 0, dot = 0, abs = 0;
        for (std::size_t i = 0; i < n; ++i) {
          const int a = rng.integer(-1000, 1000);
          const int b = rng.integer(-50, 50);
          x[i] = a;
          y[i] = b;
          sum += a;
          dot += static_cast<long long>(a) * b;
          abs += a < 0 ? -a : a;
        }
        CHECK(k->sum(x.data(), n) == static_cast<double>(sum));
        CHECK(k->dot(x.data(), y.data(), n) == static_cast<double>(dot));
        CHECK(k->abs_sum(x.data(), n) == static_cast<double>(abs));
      }
    }
  }

  TEST_CASE("max_abs and min_max see negative zero and extremes in the tail lanes") {
    for (const auto* k : variants()) {
      std::vector<double> x(13, 0.5);
      x[12] = -7.0;
      CHECK(k->max_abs(x.data(), 13) == 7.0);
      CHECK(k->min_max(x.data(), 13).min == -7.0);
      x[12] = 9.0;
      CHECK(k->min_max(x.data(), 13).max == 9.0);
    }
  }

  TEST_CASE("active table is one of the known variants") {
    const auto& a = simd::active_kernels();
    const bool known = &a == &simd::scalar_kernels() || &a == simd::avx2_kernels() || &a == simd::neon_kernels();
    CHECK(known);
  }
}
