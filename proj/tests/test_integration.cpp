#include <doctest.h>

#include <cmath>

#include "support/generators.hpp"
#include "support/oracles.hpp"
#include "tscale/integration.hpp"

using namespace tscale;
using namespace tscale::testing;

namespace {

const TimeScale Z = TimeScale::integers();
const TimeScale R = TimeScale::reals();
const TimeScale H = TimeScale::periodic(0.0, 1.0, 2.0);

double id(double t) { return t; }

}  // namespace

TEST_SUITE("integration") {
  TEST_CASE("riemann sums") {
    CHECK(riemann_sum(id, Z, Partition(Z, {0, 1, 2, 3})) == 3.0);
    CHECK(riemann_sum(id, R, Partition(R, {0, 0.5, 1})) == 0.25);
    CHECK(riemann_sum([](double) { return 1.0; }, H, Partition(H, {0, 0.25, 1, 2, 3})) == doctest::Approx(3.0));
    TagRule bad;
    bad.kind = TagRule::Kind::Custom;
    bad.custom = [](double, double hi) { return hi; };
    CHECK_THROWS(riemann_sum(id, R, Partition(R, {0, 1}), bad));
    TagRule mid = TagRule::midpoint();
    CHECK(riemann_sum(id, R, Partition(R, {0, 1}), mid) == 0.5);
    // A jump gap only admits its left end, whatever the rule.
    CHECK(riemann_sum(id, Z, Partition(Z, {0, 1}), mid) == 0.0);
  }

  TEST_CASE("single step integrals") {
    CHECK(single_step_integral([](double t) { return t * t; }, Z, 3.0) == 9.0);
    CHECK(single_step_integral([](double t) { return std::exp(t); }, R, 2.0) == 0.0);
    CHECK(single_step_integral(id, H, 1.0) == 1.0);
    CHECK_THROWS_AS(single_step_integral(id, H, 1.5), ScaleError);
  }

  TEST_CASE("bounded integrals") {
    const IntegralResult z = delta_integral(id, Z, 0, 4, 1e-8);
    CHECK(z.value == 6.0);
    CHECK(z.abs_error_estimate == 0.0);
    CHECK(z.converged);
    const IntegralResult r = delta_integral([](double t) { return t * t; }, R, 0, 1, 1e-8);
    CHECK(std::fabs(r.value - 1.0 / 3.0) <= 1e-8);
    CHECK(r.abs_error_estimate <= 1e-8);
    const IntegralResult h = delta_integral(id, H, 0, 3, 1e-8);
    CHECK(std::fabs(h.value - 4.0) <= 1e-8);
    CHECK(delta_integral(id, H, 2.5, 2.5, 1e-8).value == 0.0);
    CHECK_THROWS_WITH_AS(delta_integral(id, Z, 4, 0, 1e-8), "a must not exceed b", ScaleError);
    CHECK_THROWS_AS(delta_integral(id, H, 0, 1.5, 1e-8), ScaleError);
  }

  TEST_CASE("non-finite integrands are rejected") {
    CHECK_THROWS_AS(delta_integral([](double t) { return 1.0 / (t - 2.0); }, Z, 0, 4, 1e-8), std::domain_error);
  }

  TEST_CASE("trace records segments") {
    QuadratureOptions o;
    o.trace = true;
    const IntegralResult h = delta_integral(id, H, 0, 3, o);
    REQUIRE(h.segments.size() == 3);
    CHECK(h.segments[1].value == 1.0);
    CHECK(h.segments[1].panels == 0);
    CHECK(h.segments[0].value == doctest::Approx(0.5));
  }

  TEST_CASE("improper integrals") {
    const IntegralResult z = improper_integral([](double t) { return std::exp2(-t); }, Z, 0, 1e-6);
    CHECK(z.converged);
    CHECK(std::fabs(z.value - 2.0) <= 1e-6);
    const IntegralResult r = improper_integral([](double t) { return std::exp(-t); }, R, 0, 1e-6);
    CHECK(r.converged);
    CHECK(std::fabs(r.value - 1.0) <= 1e-6);
    const IntegralResult g =
        improper_integral([](double t) { return 1.0 / (t * t); }, TimeScale::geometric(1.0, 2.0), 1, 1e-6);
    CHECK(g.converged);
    CHECK(std::fabs(g.value - 2.0) <= 1e-6);
    TruncationPolicy small;
    small.max_span = 1e4;
    const IntegralResult one = improper_integral([](double) { return 1.0; }, R, 0, 1e-6, small);
    CHECK_FALSE(one.converged);
    const IntegralResult onez = improper_integral([](double) { return 1.0; }, Z, 0, 1e-6, small);
    CHECK_FALSE(onez.converged);
  }

  TEST_CASE("improper trace lists doubling targets") {
    TruncationPolicy p;
    p.trace = true;
    const IntegralResult z = improper_integral([](double t) { return std::exp2(-t); }, Z, 0, 1e-6, p);
    REQUIRE(z.steps.size() >= 3);
    CHECK(z.steps[0].upper == 1.0);
    CHECK(z.steps[1].upper == 2.0);
    CHECK(z.steps[2].upper == 4.0);
    CHECK(z.truncation_point == z.steps.back().upper);
  }

  TEST_CASE("property: integer scales reproduce the sum formula exactly") {
    Rng rng(404);
    for (int iter = 0; iter < 200; ++iter) {
      std::vector<long long> c;
      const int deg = rng.integer(0, 3);
      for (int i = 0; i <= deg; ++i) c.push_back(rng.integer(-9, 9));
      const long long a = rng.integer(0, 30);
      const long long b = a + rng.integer(0, 40);
      const auto f = [&c](double t) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * t + static_cast<double>(c[i]);
        return v;
      };
      const IntegralResult res = delta_integral(f, Z, static_cast<double>(a), static_cast<double>(b), 1e-10);
      CHECK(res.value == static_cast<double>(integer_sum_oracle(c, a, b)));
      CHECK(res.abs_error_estimate == 0.0);
    }
  }

  TEST_CASE("property: polynomials on random scales match the run-list oracle") {
    Rng rng(405);
    const double tol = 1e-8;
    for (int iter = 0; iter < 150; ++iter) {
      const ScaleCase c = random_scale(rng, 20.0);
      const Poly p = random_poly(rng, 3, false);
      CAPTURE(c.label);
      CAPTURE(p.str());
      double a = random_point(rng, c, c.runs.front().lo, 20.0);
      double b = random_point(rng, c, c.runs.front().lo, 20.0);
      if (a > b) std::swap(a, b);
      const IntegralResult res = delta_integral(p, c.ts, a, b, tol);
      const double want = static_cast<double>(poly_integral_oracle(p, c.runs, a, b));
      CHECK(res.converged);
      CHECK(std::fabs(res.value - want) <= tol + 1e-12 * std::fabs(want));
    }
  }

  TEST_CASE("property: linearity, additivity, monotonicity, triangle") {
    Rng rng(406);
    const double tol = 1e-8;
    for (int iter = 0; iter < 80; ++iter) {
      const ScaleCase c = random_scale(rng, 15.0);
      CAPTURE(c.label);
      const Poly f = random_poly(rng, 3, false);
      const Poly g = random_poly(rng, 2, false);
      const double alpha = rng.uniform(-3.0, 3.0);
      double a = random_point(rng, c, c.runs.front().lo, 15.0);
      double b = random_point(rng, c, c.runs.front().lo, 15.0);
      if (a > b) std::swap(a, b);
      const double mid = random_point(rng, c, a, b);

      const auto I = [&](const RealFunction& h, double lo, double hi) { return delta_integral(h, c.ts, lo, hi, tol).value; };
      const RealFunction comb = [&](double t) { return alpha * f(t) + g(t); };
      const double scale = 1.0 + std::fabs(I(f, a, b)) * std::fabs(alpha) + std::fabs(I(g, a, b));
      CHECK(std::fabs(I(comb, a, b) - (alpha * I(f, a, b) + I(g, a, b))) <= 2 * tol * scale);
      CHECK(std::fabs(I(f, a, b) - (I(f, a, mid) + I(f, mid, b))) <= 2 * tol * (1.0 + std::fabs(I(f, a, b))));

      const RealFunction absf = [&](double t) { return std::fabs(f(t)); };
      const RealFunction upper = [&](double t) { return std::fabs(f(t)) + std::fabs(g(t)); };
      CHECK(I(f, a, b) <= I(absf, a, b) + 2 * tol * (1.0 + std::fabs(I(absf, a, b))));
      CHECK(std::fabs(I(f, a, b)) <= I(absf, a, b) + 2 * tol * (1.0 + std::fabs(I(absf, a, b))));
      CHECK(I(absf, a, b) <= I(upper, a, b) + 2 * tol * (1.0 + std::fabs(I(upper, a, b))));
    }
  }

  TEST_CASE("property: riemann sums over shrinking delta partitions approach the integral") {
    Rng rng(407);
    for (int iter = 0; iter < 40; ++iter) {
      const ScaleCase c = random_scale(rng, 10.0);
      const Poly p = random_poly(rng, 2, false);
      CAPTURE(c.label);
      double a = random_point(rng, c, c.runs.front().lo, 10.0);
      double b = random_point(rng, c, c.runs.front().lo, 10.0);
      if (a == b) continue;
      if (a > b) std::swap(a, b);
      const double exact = static_cast<double>(poly_integral_oracle(p, c.runs, a, b));
      double prev_err = 1e300;
      for (double delta : {0.5, 0.05, 0.005}) {
        const double err = std::fabs(riemann_sum(p, c.ts, make_delta_partition(c.ts, a, b, delta)) - exact);
        CHECK(err <= prev_err + 1e-9);
        prev_err = err;
      }
      // Left-endpoint error is O(delta) on dense runs.
      CHECK(prev_err <= 0.005 * 20.0 * (1.0 + std::fabs(p(b)) + std::fabs(p(a))) * (b - a) + 1e-9);
    }
  }

  TEST_CASE("property: halfline integrals agree with antiderivatives") {
    Rng rng(408);
    for (int iter = 0; iter < 60; ++iter) {
      const double s = rng.uniform(-5.0, 5.0);
      const TimeScale ts = TimeScale::reals(s);
      const double a = s + rng.uniform(0.0, 5.0);
      const double b = a + rng.uniform(0.0, 5.0);
      const double k = rng.uniform(0.1, 2.0);
      const IntegralResult res = delta_integral([k](double t) { return std::cos(k * t); }, ts, a, b, 1e-9);
      CHECK(std::fabs(res.value - (std::sin(k * b) - std::sin(k * a)) / k) <= 1e-9);
    }
  }
}
