#pragma once

// Kernel transforms (Lf)(x) = integral over [beta, inf) of K(x,t) f(t) Delta t
// between functions on a t-scale and functions on an x-scale, with sampled
// checks of the conditions that make L bounded on C0 and limit preserving:
//
//   (i)   x -> x0 implies  int |K(x,t) - K(x0,t)| -> 0
//   (ii)  M = sup_x int |K(x,t)| < inf
//   (iii) x -> inf implies int_beta^y |K(x,t)| -> 0 for every y
//   (iv)  x -> inf implies int K(x,t) -> 1

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "tscale/integration.hpp"
#include "tscale/timescale.hpp"

namespace tscale {

struct Kernel {
  std::function<double(double x, double t)> evaluator;
  TimeScale x_scale;
  double alpha;
  TimeScale t_scale;
  double beta;
  // Optional: K(x, t) == 0 for t > support_bound(x).
  std::function<double(double x)> support_bound;

  Kernel(std::function<double(double, double)> k, TimeScale xs, double a, TimeScale ts, double b)
      : evaluator(std::move(k)), x_scale(std::move(xs)), alpha(a), t_scale(std::move(ts)), beta(b) {}

  double operator()(double x, double t) const { return evaluator(x, t); }
};

IntegralResult apply_transform(const Kernel& k, const ScaleFunction& f, double x, double tol,
                               const TruncationPolicy& policy = {});

struct Witness {
  double at;     // x (or x0 for condition (i))
  double value;  // measured quantity
  std::optional<double> param;  // y for (iii), x0 for (i)
};

struct ConditionResult {
  bool passed = true;
  // False when some row integral behind the witnesses did not converge.
  bool converged = true;
  std::vector<Witness> witnesses;
  double tol = 0.0;
  std::string note;
};

// alpha, then ceil_point(alpha + 2^k) for k = 0, 1, ... up to horizon.
std::vector<double> doubling_probes(const TimeScale& ts, double start, double horizon);

struct MEstimate {
  double value = 0.0;
  bool converged = true;
  ConditionResult condition;  // condition (ii); witnesses are (x, row norm)
};

MEstimate estimate_M(const Kernel& k, const std::vector<double>& x_probes, double tol);

ConditionResult check_condition_i(const Kernel& k, const std::vector<double>& x0_samples, double tol);
ConditionResult check_condition_iii(const Kernel& k, const std::vector<double>& y_samples,
                                    const std::vector<double>& x_probes, double tol);
ConditionResult check_condition_iv(const Kernel& k, const std::vector<double>& x_probes, double tol);

inline ConditionResult check_condition_iii(const Kernel& k, const std::vector<double>& y_samples,
                                           double x_horizon, double tol) {
  return check_condition_iii(k, y_samples, doubling_probes(k.x_scale, k.alpha, x_horizon), tol);
}
inline ConditionResult check_condition_iv(const Kernel& k, double x_horizon, double tol) {
  return check_condition_iv(k, doubling_probes(k.x_scale, k.alpha, x_horizon), tol);
}

// First `count` points after beta on discrete t-scales, beta + 2^j otherwise.
std::vector<double> default_y_samples(const Kernel& k, std::size_t count = 8);

struct RegularityConfig {
  double tol = 1e-6;
  double x_horizon = 65536.0;
  std::size_t y_count = 8;
  // Empty means the defaults above.
  std::vector<double> x_probes;
  std::vector<double> x0_samples;
  std::vector<double> y_samples;
};

enum class RegularityVerdict { EvidenceRegular, EvidenceC0Preserving, EvidenceFails };

std::string to_string(RegularityVerdict v);

struct RegularityReport {
  double M_estimate = 0.0;
  ConditionResult cond_i, cond_ii, cond_iii, cond_iv;
  RegularityVerdict verdict = RegularityVerdict::EvidenceFails;
  std::vector<std::string> failed;  // "i", "ii", ...
};

RegularityReport regularity_report(const Kernel& k, const RegularityConfig& cfg = {});

// t -> sgn K(x0, t) for t <= p, 0 beyond.
ScaleFunction extremal_function(const Kernel& k, double x0, double p);

double operator_norm_lower_bound(const Kernel& k, const std::vector<double>& x0_list,
                                 const std::vector<double>& p_list, double tol = 1e-8);

}  // namespace tscale
