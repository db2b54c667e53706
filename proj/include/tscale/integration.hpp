#pragma once

// Riemann delta-sums, delta-integrals over bounded intervals, and improper
// integrals of the first kind on time scales.
//
// A bounded integral is split along decompose(a, b): every jump contributes
// exactly mu(t) f(t); every dense run is handled by a composite midpoint rule
// with dyadic refinement and a Richardson estimate.

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include "tscale/partition.hpp"
#include "tscale/timescale.hpp"

namespace tscale {

using RealFunction = std::function<double(double)>;

// f restricted to the points of a scale from domain_start on. A declared
// support_end means f vanishes on (support_end, inf).
struct ScaleFunction {
  RealFunction evaluator;
  TimeScale scale;
  double domain_start = 0.0;
  std::optional<double> support_end;

  ScaleFunction(RealFunction f, TimeScale ts, double start,
                std::optional<double> support = std::nullopt)
      : evaluator(std::move(f)), scale(std::move(ts)), domain_start(start), support_end(support) {}

  double operator()(double t) const { return evaluator(t); }
};

struct SegmentTrace {
  Segment segment;
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;  // 0 for jumps
};

struct TruncationStep {
  double upper;
  double partial;  // F(upper)
  double increment;
};

struct IntegralResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  bool converged = true;
  std::size_t evaluations = 0;
  // Final upper limit reached (improper integrals); b for bounded ones.
  double truncation_point = 0.0;
  std::vector<SegmentTrace> segments;  // filled when tracing
  std::vector<TruncationStep> steps;   // improper integrals, when tracing
};

struct QuadratureOptions {
  double tol = 1e-8;
  // Panels double per level; level L uses 2^L panels.
  int min_level = 3;
  int max_level = 24;
  bool trace = false;
};

// Left endpoints unless told otherwise. A custom rule receives the gap
// [lo, hi) and must return a scale point in it.
struct TagRule {
  enum class Kind { Left, Midpoint, Custom } kind = Kind::Left;
  std::function<double(double lo, double hi)> custom;

  static TagRule left() { return {}; }
  static TagRule midpoint() { return {Kind::Midpoint, {}}; }
};

double riemann_sum(const RealFunction& f, const TimeScale& ts, const Partition& p,
                   const TagRule& rule = TagRule::left());

// Exactly mu(t) f(t).
double single_step_integral(const RealFunction& f, const TimeScale& ts, double t);

IntegralResult delta_integral(const RealFunction& f, const TimeScale& ts, double a, double b,
                              const QuadratureOptions& opts = {});

inline IntegralResult delta_integral(const RealFunction& f, const TimeScale& ts, double a, double b,
                                     double tol) {
  QuadratureOptions o;
  o.tol = tol;
  return delta_integral(f, ts, a, b, o);
}

struct TruncationPolicy {
  // Targets A_k = ceil_point(a + first_step * growth^k).
  double first_step = 1.0;
  double growth = 2.0;
  int stall_count = 3;
  // Stall counting only starts once A_k >= min_upper.
  double min_upper = -std::numeric_limits<double>::infinity();
  double max_span = 1099511627776.0;  // 2^40 past a
  std::size_t max_evaluations = std::size_t{1} << 25;
  int max_level = 24;
  bool trace = false;
};

// Converged when |F(A_{k+1}) - F(A_k)| < tol/2 for stall_count consecutive
// targets; the quadrature of the pieces shares the other tol/2.
IntegralResult improper_integral(const RealFunction& f, const TimeScale& ts, double a, double tol,
                                 const TruncationPolicy& policy = {});

}  // namespace tscale
