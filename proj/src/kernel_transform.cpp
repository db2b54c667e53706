#include "tscale/kernel_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail/extrapolate.hpp"

namespace tscale {
namespace {

using detail::extrapolate_tail;
using detail::trending_toward;

// Row integrals are computed this much tighter than the condition tolerance.
constexpr double kRowTolFactor = 1e-3;
constexpr std::size_t kDefaultX0Count = 4;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

double require_x(const Kernel& k, double x) {
  auto c = k.x_scale.canonical(x);
  if (!c || *c < k.alpha) throw ScaleError("x = " + fmt(x) + " is not in the x-scale from alpha");
  return *c;
}

std::optional<double> kernel_support(const Kernel& k, double x) {
  if (!k.support_bound) return std::nullopt;
  const double s = k.support_bound(x);
  if (!std::isfinite(s)) return std::nullopt;
  return s;
}

std::optional<double> tighter(std::optional<double> a, std::optional<double> b) {
  if (!a) return b;
  if (!b) return a;
  return std::min(*a, *b);
}

// Integral of g over [beta, inf); a finite `end` means g vanishes past it.
IntegralResult integrate_row(const Kernel& k, double x, const RealFunction& g, double tol,
                             std::optional<double> end, TruncationPolicy policy) {
  if (end) {
    if (*end < k.beta) return IntegralResult{};
    const double last = k.t_scale.floor_point(*end);
    const double upper = k.t_scale.sigma(last);
    QuadratureOptions q;
    q.tol = tol;
    q.max_level = policy.max_level;
    q.trace = policy.trace;
    return delta_integral(g, k.t_scale, k.beta, std::max(upper, k.t_scale.ceil_point(k.beta)), q);
  }
  policy.min_upper = std::max({policy.min_upper, k.beta, x});
  return improper_integral(g, k.t_scale, k.beta, tol, policy);
}

struct Rows {
  std::vector<double> values;
  bool converged = true;
  std::vector<double> failed_at;
};

Rows row_integrals(const Kernel& k, const std::vector<double>& xs, double tol, bool absolute) {
  Rows r;
  for (double x0 : xs) {
    const double x = require_x(k, x0);
    RealFunction g;
    if (absolute) {
      g = [&k, x](double t) { return std::fabs(k(x, t)); };
    } else {
      g = [&k, x](double t) { return k(x, t); };
    }
    const IntegralResult res = integrate_row(k, x, g, tol, kernel_support(k, x), {});
    r.values.push_back(res.value);
    if (!res.converged) {
      r.converged = false;
      r.failed_at.push_back(x);
    }
  }
  return r;
}

std::string list(const std::vector<double>& v) {
  std::string s;
  for (double x : v) s += (s.empty() ? "" : ", ") + fmt(x);
  return s;
}

}  // namespace

IntegralResult apply_transform(const Kernel& k, const ScaleFunction& f, double x, double tol,
                               const TruncationPolicy& policy) {
  const double cx = require_x(k, x);
  const RealFunction g = [&k, &f, cx](double t) { return k(cx, t) * f(t); };
  return integrate_row(k, cx, g, tol, tighter(kernel_support(k, cx), f.support_end), policy);
}

std::vector<double> doubling_probes(const TimeScale& ts, double start, double horizon) {
  std::vector<double> xs;
  const double s = ts.ceil_point(start);
  if (s > horizon) return xs;
  xs.push_back(s);
  for (int j = 0; j < 1100; ++j) {
    const double x = ts.ceil_point(s + std::ldexp(1.0, j));
    if (x > horizon) break;
    if (x > xs.back()) xs.push_back(x);
  }
  return xs;
}

std::vector<double> default_y_samples(const Kernel& k, std::size_t count) {
  std::vector<double> ys;
  const double b = k.t_scale.ceil_point(k.beta);
  if (k.t_scale.discrete_from(b)) {
    ys = k.t_scale.enumerate_points(b, count + 1);
    if (!ys.empty()) ys.erase(ys.begin());
    return ys;
  }
  for (std::size_t j = 0; j < count; ++j) {
    const double y = k.t_scale.ceil_point(b + std::ldexp(1.0, static_cast<int>(j)));
    if (ys.empty() || y > ys.back()) ys.push_back(y);
  }
  return ys;
}

MEstimate estimate_M(const Kernel& k, const std::vector<double>& x_probes, double tol) {
  MEstimate m;
  m.condition.tol = tol;
  const Rows rows = row_integrals(k, x_probes, tol * kRowTolFactor, true);
  for (std::size_t i = 0; i < rows.values.size(); ++i) {
    m.condition.witnesses.push_back({x_probes[i], rows.values[i], std::nullopt});
    m.value = std::max(m.value, rows.values[i]);
  }
  m.converged = rows.converged;
  m.condition.converged = rows.converged;
  if (!rows.converged) {
    m.condition.passed = false;
    m.condition.note = "row integral did not converge at x = " + list(rows.failed_at);
    return m;
  }
  // Row norms still growing by non-shrinking increments: M looks infinite.
  const auto& v = rows.values;
  const std::size_t n = v.size();
  if (n >= 3) {
    const double d1 = std::fabs(v[n - 2] - v[n - 3]);
    const double d2 = std::fabs(v[n - 1] - v[n - 2]);
    if (d2 > tol && d2 >= 0.9 * d1) {
      m.condition.passed = false;
      m.condition.note = "row norms keep growing";
    }
  }
  return m;
}

ConditionResult check_condition_i(const Kernel& k, const std::vector<double>& x0_samples, double tol) {
  ConditionResult c;
  c.tol = tol;
  std::vector<double> bad;
  for (double raw : x0_samples) {
    const double x0 = require_x(k, raw);
    const PointClass pc = k.x_scale.classify(x0);
    if (pc.isolated()) {
      c.witnesses.push_back({x0, 0.0, x0});
      continue;
    }
    for (int side : {1, -1}) {
      if (side > 0 && !pc.right_dense) continue;
      if (side < 0 && !pc.left_dense) continue;
      double last_gap = std::numeric_limits<double>::quiet_NaN();
      for (int e = 4; e <= 24; e += 4) {
        const double x = x0 + side * std::ldexp(1.0, -e);
        if (x < k.alpha || !k.x_scale.contains(x)) continue;
        const RealFunction g = [&k, x, x0](double t) { return std::fabs(k(x, t) - k(x0, t)); };
        std::optional<double> end;
        const auto s1 = kernel_support(k, x);
        const auto s0 = kernel_support(k, x0);
        if (s1 && s0) end = std::max(*s1, *s0);
        TruncationPolicy p;
        p.min_upper = std::max(x, x0);
        const IntegralResult r = integrate_row(k, x, g, 0.1 * tol, end, p);
        c.converged = c.converged && r.converged;
        last_gap = r.value;
        c.witnesses.push_back({x, last_gap, x0});
      }
      if (!(last_gap <= tol) && (bad.empty() || bad.back() != x0)) bad.push_back(x0);
    }
  }
  if (!bad.empty()) {
    c.passed = false;
    c.note = "L1 gap does not vanish at x0 = " + list(bad);
  }
  return c;
}

ConditionResult check_condition_iii(const Kernel& k, const std::vector<double>& y_samples,
                                    const std::vector<double>& x_probes, double tol) {
  ConditionResult c;
  c.tol = tol;
  std::vector<double> bad;
  const double b = k.t_scale.ceil_point(k.beta);
  for (double raw_y : y_samples) {
    const double y = k.t_scale.ceil_point(raw_y);
    std::vector<double> vals;
    bool ok = true;
    for (double raw_x : x_probes) {
      const double x = require_x(k, raw_x);
      double v = 0.0;
      if (y > b) {
        const RealFunction g = [&k, x](double t) { return std::fabs(k(x, t)); };
        const IntegralResult r = delta_integral(g, k.t_scale, b, y, tol * kRowTolFactor);
        ok = ok && r.converged;
        v = r.value;
      }
      vals.push_back(v);
      c.witnesses.push_back({x, v, y});
    }
    c.converged = c.converged && ok;
    const double limit = extrapolate_tail(vals);
    if (!ok || !(std::fabs(limit) <= tol) || !trending_toward(vals, 0.0, 0.01 * tol)) bad.push_back(y);
  }
  if (!bad.empty()) {
    c.passed = false;
    c.note = "partial row integrals do not vanish for y = " + list(bad);
  }
  return c;
}

ConditionResult check_condition_iv(const Kernel& k, const std::vector<double>& x_probes, double tol) {
  ConditionResult c;
  c.tol = tol;
  const Rows rows = row_integrals(k, x_probes, tol * kRowTolFactor, false);
  for (std::size_t i = 0; i < rows.values.size(); ++i) {
    c.witnesses.push_back({x_probes[i], rows.values[i], std::nullopt});
  }
  c.converged = rows.converged;
  if (!rows.converged) {
    c.passed = false;
    c.note = "row integral did not converge at x = " + list(rows.failed_at);
    return c;
  }
  const double limit = extrapolate_tail(rows.values);
  if (!(std::fabs(limit - 1.0) <= tol) || !trending_toward(rows.values, 1.0, 0.01 * tol)) {
    c.passed = false;
    c.note = "row integrals tend to " + fmt(limit) + ", not 1";
  }
  return c;
}

std::string to_string(RegularityVerdict v) {
  switch (v) {
    case RegularityVerdict::EvidenceRegular:
      return "Evidence-Regular";
    case RegularityVerdict::EvidenceC0Preserving:
      return "Evidence-C0-Preserving";
    case RegularityVerdict::EvidenceFails:
      break;
  }
  return "Evidence-Fails";
}

RegularityReport regularity_report(const Kernel& k, const RegularityConfig& cfg) {
  const std::vector<double> xs =
      cfg.x_probes.empty() ? doubling_probes(k.x_scale, k.alpha, cfg.x_horizon) : cfg.x_probes;
  std::vector<double> x0s = cfg.x0_samples;
  if (x0s.empty()) x0s.assign(xs.begin(), xs.begin() + std::min(xs.size(), kDefaultX0Count));
  const std::vector<double> ys = cfg.y_samples.empty() ? default_y_samples(k, cfg.y_count) : cfg.y_samples;

  RegularityReport r;
  r.cond_i = check_condition_i(k, x0s, cfg.tol);
  const MEstimate m = estimate_M(k, xs, cfg.tol);
  r.M_estimate = m.value;
  r.cond_ii = m.condition;
  r.cond_iii = check_condition_iii(k, ys, xs, cfg.tol);
  r.cond_iv = check_condition_iv(k, xs, cfg.tol);

  if (!r.cond_i.passed) r.failed.push_back("i");
  if (!r.cond_ii.passed) r.failed.push_back("ii");
  if (!r.cond_iii.passed) r.failed.push_back("iii");
  if (!r.cond_iv.passed) r.failed.push_back("iv");
  if (r.failed.empty()) {
    r.verdict = RegularityVerdict::EvidenceRegular;
  } else if (r.failed.size() == 1 && r.failed.front() == "iv") {
    r.verdict = RegularityVerdict::EvidenceC0Preserving;
  } else {
    r.verdict = RegularityVerdict::EvidenceFails;
  }
  return r;
}

ScaleFunction extremal_function(const Kernel& k, double x0, double p) {
  const double x = require_x(k, x0);
  const auto cp = k.t_scale.canonical(p);
  if (!cp || *cp < k.beta) throw ScaleError("p = " + fmt(p) + " is not in the t-scale from beta");
  const double b = k.t_scale.ceil_point(k.beta);

  bool nonzero = k(x, *cp) != 0.0;
  if (!nonzero && *cp > b) {
    k.t_scale.walk(b, *cp, [&](const Segment& s) {
      if (const auto* d = std::get_if<DenseRun>(&s)) {
        for (int i = 0; i <= 256 && !nonzero; ++i) nonzero = k(x, d->lo + (d->hi - d->lo) * i / 256.0) != 0.0;
      } else {
        nonzero = k(x, std::get<Jump>(s).at) != 0.0;
      }
      return !nonzero;
    });
  }
  if (!nonzero) throw std::invalid_argument("kernel slice K(" + fmt(x) + ", .) vanishes on [beta, p]");

  const double limit = *cp + k.t_scale.tolerance_at(*cp);
  auto sign = [k, x, limit](double t) {
    if (t > limit) return 0.0;
    const double v = k(x, t);
    return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
  };
  return ScaleFunction(sign, k.t_scale, k.beta, *cp);
}

double operator_norm_lower_bound(const Kernel& k, const std::vector<double>& x0_list,
                                 const std::vector<double>& p_list, double tol) {
  double best = 0.0;
  for (double x0 : x0_list) {
    for (double p : p_list) {
      std::optional<ScaleFunction> f;
      try {
        f.emplace(extremal_function(k, x0, p));
      } catch (const ScaleError&) {
        throw;
      } catch (const std::invalid_argument&) {
        continue;  // zero slice: contributes nothing
      }
      best = std::max(best, std::fabs(apply_transform(k, *f, x0, tol).value));
    }
  }
  return best;
}

}  // namespace tscale
