#include "tscale/integration.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "tscale/simd/reduce.hpp"

namespace tscale {
namespace {

constexpr std::size_t kChunk = 2048;
constexpr double kEps = std::numeric_limits<double>::epsilon();

[[noreturn]] void non_finite(double t) {
  std::ostringstream os;
  os.precision(17);
  os << "integrand is not finite at t = " << t;
  throw std::domain_error(os.str());
}

struct RunResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t panels = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

struct MidpointSum {
  double sum;
  double abs_sum;
};

MidpointSum midpoint_sum(const RealFunction& f, double lo, double h, std::size_t n) {
  std::array<double, kChunk> buf;
  double total = 0.0;
  double abs_total = 0.0;
  for (std::size_t i = 0; i < n;) {
    const std::size_t m = std::min(kChunk, n - i);
    for (std::size_t j = 0; j < m; ++j) {
      const double t = lo + (static_cast<double>(i + j) + 0.5) * h;
      buf[j] = f(t);
    }
    const std::span<const double> view(buf.data(), m);
    const double s = simd::sum(view);
    if (!std::isfinite(s)) {
      for (std::size_t j = 0; j < m; ++j) {
        if (!std::isfinite(buf[j])) non_finite(lo + (static_cast<double>(i + j) + 0.5) * h);
      }
    }
    total += s;
    abs_total += simd::abs_sum(view);
    i += m;
  }
  return {total, abs_total};
}

// Composite midpoint with dyadic refinement; the returned value is the
// Richardson combination (4 S_2n - S_n) / 3, the estimate |S_2n - S_n| / 3.
RunResult integrate_run(const RealFunction& f, double lo, double hi, double tol, int min_level,
                        int max_level) {
  RunResult r;
  const double len = hi - lo;
  double prev = 0.0;
  for (int level = min_level; level <= max_level; ++level) {
    const std::size_t n = std::size_t{1} << level;
    const double h = len / static_cast<double>(n);
    const MidpointSum s = midpoint_sum(f, lo, h, n);
    r.evaluations += n;
    const double cur = h * s.sum;
    if (level > min_level) {
      const double est = std::fabs(cur - prev) / 3.0;
      const double floor = 16.0 * kEps * h * s.abs_sum;
      r.value = cur + (cur - prev) / 3.0;
      r.error = est;
      r.panels = n;
      if (est <= std::max(tol, floor)) {
        r.converged = true;
        return r;
      }
    }
    prev = cur;
  }
  return r;
}

class JumpAccumulator {
 public:
  explicit JumpAccumulator(const RealFunction& f) : f_(f) {}

  double add(double at, double gap) {
    const double v = f_(at);
    if (!std::isfinite(v)) non_finite(at);
    gaps_[n_] = gap;
    vals_[n_] = v;
    if (++n_ == kChunk) flush();
    return v;
  }

  double total() {
    flush();
    return total_;
  }

 private:
  void flush() {
    total_ += simd::dot(std::span<const double>(gaps_.data(), n_), std::span<const double>(vals_.data(), n_));
    n_ = 0;
  }

  const RealFunction& f_;
  std::array<double, kChunk> gaps_{};
  std::array<double, kChunk> vals_{};
  std::size_t n_ = 0;
  double total_ = 0.0;
};

double require_point(const TimeScale& ts, double t) {
  auto c = ts.canonical(t);
  if (!c) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << t << " is not in the time scale";
    throw ScaleError(os.str());
  }
  return *c;
}

}  // namespace

double riemann_sum(const RealFunction& f, const TimeScale& ts, const Partition& p, const TagRule& rule) {
  const auto& pts = p.points();
  std::vector<double> gaps(pts.size() - 1);
  std::vector<double> vals(pts.size() - 1);
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double lo = pts[i - 1];
    const double hi = pts[i];
    double tag = lo;
    switch (rule.kind) {
      case TagRule::Kind::Left:
        break;
      case TagRule::Kind::Midpoint: {
        const double m = ts.ceil_point(lo + 0.5 * (hi - lo));
        tag = m < hi ? m : lo;
        break;
      }
      case TagRule::Kind::Custom: {
        tag = rule.custom(lo, hi);
        auto c = ts.canonical(tag);
        if (!c || *c < lo || *c >= hi) throw ScaleError("tag outside [t_{i-1}, t_i) of the scale");
        tag = *c;
        break;
      }
    }
    gaps[i - 1] = hi - lo;
    vals[i - 1] = f(tag);
  }
  return simd::dot(gaps, vals);
}

double single_step_integral(const RealFunction& f, const TimeScale& ts, double t) {
  const double c = require_point(ts, t);
  return ts.graininess(c) * f(c);
}

IntegralResult delta_integral(const RealFunction& f, const TimeScale& ts, double a, double b,
                              const QuadratureOptions& opts) {
  if (!(opts.tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  const double ca = require_point(ts, a);
  const double cb = require_point(ts, b);
  if (ca > cb) throw ScaleError("a must not exceed b");

  IntegralResult res;
  res.truncation_point = cb;
  if (ca == cb) return res;

  double dense_length = 0.0;
  ts.walk(ca, cb, [&](const Segment& s) {
    if (const auto* d = std::get_if<DenseRun>(&s)) dense_length += d->hi - d->lo;
    return true;
  });

  JumpAccumulator jumps(f);
  double dense_total = 0.0;
  ts.walk(ca, cb, [&](const Segment& s) {
    if (const auto* d = std::get_if<DenseRun>(&s)) {
      const double share = opts.tol * (d->hi - d->lo) / dense_length;
      const RunResult r = integrate_run(f, d->lo, d->hi, share, opts.min_level, opts.max_level);
      dense_total += r.value;
      res.abs_error_estimate += r.error;
      res.evaluations += r.evaluations;
      res.converged = res.converged && r.converged;
      if (opts.trace) res.segments.push_back({s, r.value, r.error, r.panels});
    } else {
      const auto& j = std::get<Jump>(s);
      const double v = jumps.add(j.at, j.gap);
      ++res.evaluations;
      if (opts.trace) res.segments.push_back({s, j.gap * v, 0.0, 0});
    }
    return true;
  });
  res.value = jumps.total() + dense_total;
  return res;
}

IntegralResult improper_integral(const RealFunction& f, const TimeScale& ts, double a, double tol,
                                 const TruncationPolicy& policy) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  if (!(policy.growth > 1.0) || !(policy.first_step > 0.0) || policy.stall_count < 1) {
    throw std::invalid_argument("truncation policy needs first_step > 0, growth > 1, stall_count >= 1");
  }
  const double ca = require_point(ts, a);

  IntegralResult res;
  res.converged = false;
  res.truncation_point = ca;
  double lower = ca;
  double last_increment = 0.0;
  bool quadrature_ok = true;
  int stalls = 0;
  int pieces = 0;
  double reach = policy.first_step;

  for (int k = 0; k < 4096; ++k, reach *= policy.growth) {
    if (reach > policy.max_span) break;
    const double upper = ts.ceil_point(ca + reach);
    if (!(upper > lower)) continue;

    QuadratureOptions q;
    q.tol = 0.5 * tol * std::ldexp(1.0, -(pieces + 1));
    q.max_level = policy.max_level;
    const IntegralResult piece = delta_integral(f, ts, lower, upper, q);
    ++pieces;
    res.value += piece.value;
    res.abs_error_estimate += piece.abs_error_estimate;
    res.evaluations += piece.evaluations;
    quadrature_ok = quadrature_ok && piece.converged;
    last_increment = std::fabs(piece.value);
    lower = upper;
    res.truncation_point = upper;
    if (policy.trace) res.steps.push_back({upper, res.value, piece.value});

    if (upper >= policy.min_upper && last_increment < 0.5 * tol) {
      ++stalls;
    } else {
      stalls = 0;
    }
    if (stalls >= policy.stall_count) {
      res.converged = quadrature_ok;
      break;
    }
    if (res.evaluations >= policy.max_evaluations) break;
  }
  res.abs_error_estimate += last_increment;
  return res;
}

}  // namespace tscale
