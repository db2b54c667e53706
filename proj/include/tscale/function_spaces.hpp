#pragma once

// Sampled diagnostics for membership in C_T[beta, inf) (functions with a
// limit at infinity) and C0_T[beta, inf) (limit zero), normed by sup |f|.
// Everything here is evidence from finitely many samples, never a proof.

#include <cstddef>
#include <string>
#include <vector>

#include "tscale/integration.hpp"

namespace tscale {

struct SamplerSpec {
  // Samples per dense run, endpoints included.
  std::size_t dense_samples = 257;
  // Hard cap on the number of scattered points visited.
  std::size_t max_points = std::size_t{1} << 24;
};

// Lower bound for sup |f| over [domain_start, horizon].
double sup_norm(const ScaleFunction& f, double horizon, const SamplerSpec& sampler = {});

enum class LimitStatus { Converged, Diverged, Unknown };

struct LimitDiagnosis {
  LimitStatus status = LimitStatus::Unknown;
  double value = 0.0;  // meaningful when Converged
  double horizon = 0.0;
  double oscillation = 0.0;  // max - min over the final window
  double drift = 0.0;        // change of the window mean between horizon/2 and horizon
  std::vector<double> window_points;
};

struct LimitOptions {
  double tol = 1e-6;
  std::size_t window = 32;
  double horizon = 1e7;
  double escape_bound = 1e12;
  // Spacing of window samples on dense stretches.
  double dense_spacing = 1.0;
  // Aitken extrapolation over window means at horizon/8 .. horizon.
  bool accelerate = false;
};

LimitDiagnosis limit_at_infinity(const ScaleFunction& f, const LimitOptions& opts = {});

inline LimitDiagnosis limit_at_infinity(const ScaleFunction& f, double tol, std::size_t window,
                                        double horizon) {
  LimitOptions o;
  o.tol = tol;
  o.window = window;
  o.horizon = horizon;
  return limit_at_infinity(f, o);
}

enum class Verdict { EvidenceFor, EvidenceAgainst, Inconclusive };

std::string to_string(Verdict v);
std::string to_string(LimitStatus s);

struct MembershipConfig {
  LimitOptions limit;
  // sup |f| is sampled over [domain_start, domain_start + sup_span].
  double sup_span = 1000.0;
  SamplerSpec sampler;
};

struct MembershipReport {
  Verdict in_C = Verdict::Inconclusive;
  Verdict in_C0 = Verdict::Inconclusive;
  LimitDiagnosis limit;
  double sup_estimate = 0.0;
};

MembershipReport membership_report(const ScaleFunction& f, const MembershipConfig& cfg = {});

// Last `count` points of the scale at or below `horizon` (ascending), using
// `dense_spacing` steps across dense stretches. Shared by the limit and
// regularity diagnostics.
std::vector<double> trailing_points(const TimeScale& ts, double lower, double horizon, std::size_t count,
                                    double dense_spacing);

}  // namespace tscale
