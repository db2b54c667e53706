#include "tscale/function_spaces.hpp"

#include <algorithm>
#include <cmath>

#include "detail/extrapolate.hpp"
#include "tscale/simd/reduce.hpp"

namespace tscale {
namespace {

using detail::aitken;

struct Window {
  std::vector<double> points;
  std::vector<double> values;
  double mean = 0.0;
  simd::MinMax range{0.0, 0.0};
};

Window sample_window(const ScaleFunction& f, double horizon, const LimitOptions& opts) {
  Window w;
  w.points = trailing_points(f.scale, f.domain_start, horizon, opts.window, opts.dense_spacing);
  w.values.reserve(w.points.size());
  for (double t : w.points) w.values.push_back(f(t));
  w.range = simd::min_max(w.values);
  w.mean = simd::sum(w.values) / static_cast<double>(w.values.size());
  return w;
}

}  // namespace

std::vector<double> trailing_points(const TimeScale& ts, double lower, double horizon, std::size_t count,
                                    double dense_spacing) {
  std::vector<double> pts;
  if (count == 0 || horizon < lower) return pts;
  double c = ts.floor_point(horizon);
  if (c < lower) return pts;
  pts.push_back(c);
  while (pts.size() < count) {
    const double r = ts.rho(c);
    double next;
    if (r < c) {
      next = r;
    } else {
      if (c <= ts.min()) break;
      next = ts.floor_point(std::max(c - dense_spacing, ts.min()));
    }
    if (next < lower || !(next < c)) break;
    pts.push_back(next);
    c = next;
  }
  std::reverse(pts.begin(), pts.end());
  return pts;
}

double sup_norm(const ScaleFunction& f, double horizon, const SamplerSpec& sampler) {
  const TimeScale& ts = f.scale;
  const double lo = ts.ceil_point(f.domain_start);
  if (horizon < lo) return 0.0;
  const double hi = ts.floor_point(horizon);
  std::vector<double> buf;
  buf.reserve(4096);
  double best = 0.0;
  std::size_t visited = 0;
  auto flush = [&] {
    best = std::max(best, simd::max_abs(buf));
    buf.clear();
  };
  auto push = [&](double t) {
    buf.push_back(f(t));
    if (buf.size() == 4096) flush();
  };
  push(lo);
  if (hi > lo) {
    ts.walk(lo, hi, [&](const Segment& s) {
      if (const auto* d = std::get_if<DenseRun>(&s)) {
        const std::size_t n = std::max<std::size_t>(sampler.dense_samples, 2);
        for (std::size_t i = 1; i < n; ++i) {
          push(d->lo + (d->hi - d->lo) * static_cast<double>(i) / static_cast<double>(n - 1));
        }
      } else {
        const auto& j = std::get<Jump>(s);
        push(j.at + j.gap);
      }
      return ++visited < sampler.max_points;
    });
  }
  flush();
  return best;
}

LimitDiagnosis limit_at_infinity(const ScaleFunction& f, const LimitOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (opts.window == 0) throw std::invalid_argument("window must be >= 1");
  LimitDiagnosis d;
  const double beta = f.domain_start;
  const double h = std::max(opts.horizon, beta);
  d.horizon = h;

  const Window last = sample_window(f, h, opts);
  d.window_points = last.points;
  d.oscillation = last.range.max - last.range.min;
  if (std::max(std::fabs(last.range.min), std::fabs(last.range.max)) > opts.escape_bound) {
    d.status = LimitStatus::Diverged;
    return d;
  }

  auto horizon_frac = [&](double frac) { return beta + (h - beta) * frac; };
  double estimate = last.mean;
  if (opts.accelerate) {
    const double m0 = sample_window(f, horizon_frac(0.125), opts).mean;
    const double m1 = sample_window(f, horizon_frac(0.25), opts).mean;
    const double m2 = sample_window(f, horizon_frac(0.5), opts).mean;
    const double prev = aitken(m0, m1, m2);
    estimate = aitken(m1, m2, last.mean);
    d.drift = std::fabs(estimate - prev);
  } else {
    d.drift = std::fabs(last.mean - sample_window(f, horizon_frac(0.5), opts).mean);
  }

  if (d.oscillation <= opts.tol && d.drift <= opts.tol) {
    d.status = LimitStatus::Converged;
    d.value = estimate;
  }
  return d;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::EvidenceFor:
      return "Evidence-For";
    case Verdict::EvidenceAgainst:
      return "Evidence-Against";
    case Verdict::Inconclusive:
      break;
  }
  return "Inconclusive";
}

std::string to_string(LimitStatus s) {
  switch (s) {
    case LimitStatus::Converged:
      return "Converged";
    case LimitStatus::Diverged:
      return "Diverged";
    case LimitStatus::Unknown:
      break;
  }
  return "Unknown";
}

MembershipReport membership_report(const ScaleFunction& f, const MembershipConfig& cfg) {
  MembershipReport r;
  r.limit = limit_at_infinity(f, cfg.limit);
  r.sup_estimate = sup_norm(f, f.domain_start + cfg.sup_span, cfg.sampler);
  for (double t : r.limit.window_points) r.sup_estimate = std::max(r.sup_estimate, std::fabs(f(t)));

  switch (r.limit.status) {
    case LimitStatus::Converged:
      r.in_C = Verdict::EvidenceFor;
      r.in_C0 = std::fabs(r.limit.value) <= cfg.limit.tol ? Verdict::EvidenceFor : Verdict::EvidenceAgainst;
      break;
    case LimitStatus::Diverged:
      r.in_C = Verdict::EvidenceAgainst;
      r.in_C0 = Verdict::EvidenceAgainst;
      break;
    case LimitStatus::Unknown:
      break;
  }
  return r;
}

}  // namespace tscale
