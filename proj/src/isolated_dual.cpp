#include "tscale/isolated_dual.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <stdexcept>

#include "tscale/simd/reduce.hpp"

namespace tscale {
namespace {

constexpr std::size_t kMaxPoints = std::size_t{1} << 26;

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

struct IsolatedScale::Cache {
  std::mutex m;
  std::vector<double> pts;
};

IsolatedScale::IsolatedScale(TimeScale ts, double beta) : ts_(std::move(ts)), cache_(std::make_shared<Cache>()) {
  const auto b = ts_.canonical(beta);
  if (!b) throw ScaleError("beta is not a point of the scale");
  beta_ = *b;
  if (!ts_.discrete_from(beta_)) throw ScaleError("the scale has non-isolated points from beta on");
  cache_->pts.push_back(beta_);
}

namespace {

// Grows pts until it holds k points or its last point exceeds v.
void extend(const TimeScale& ts, std::vector<double>& pts, std::size_t k, double v) {
  while (pts.size() < k || pts.back() <= v) {
    if (pts.size() >= kMaxPoints) throw ScaleError("isolated scale enumeration exceeds 2^26 points");
    pts.push_back(ts.sigma(pts.back()));
  }
}

}  // namespace

double IsolatedScale::point(std::size_t k) const {
  if (k == 0) throw std::invalid_argument("point indices start at 1");
  std::lock_guard lock(cache_->m);
  extend(ts_, cache_->pts, k, -std::numeric_limits<double>::infinity());
  return cache_->pts[k - 1];
}

double IsolatedScale::gap(std::size_t k) const { return point(k + 1) - point(k); }

std::optional<std::size_t> IsolatedScale::index_of(double t) const {
  const double tol = ts_.tolerance_at(t);
  if (t < beta_ - tol) return std::nullopt;
  std::lock_guard lock(cache_->m);
  auto& pts = cache_->pts;
  extend(ts_, pts, 1, t + tol);
  auto it = std::lower_bound(pts.begin(), pts.end(), t - tol);
  if (it == pts.end() || std::fabs(*it - t) > tol) return std::nullopt;
  return static_cast<std::size_t>(it - pts.begin()) + 1;
}

std::size_t IsolatedScale::count_up_to(double v) const {
  const double tol = ts_.tolerance_at(v);
  if (v < beta_ - tol) return 0;
  std::lock_guard lock(cache_->m);
  auto& pts = cache_->pts;
  extend(ts_, pts, 1, v + tol);
  return static_cast<std::size_t>(std::upper_bound(pts.begin(), pts.end(), v + tol) - pts.begin());
}

ScaleFunction basis_element(const IsolatedScale& s, std::size_t k) {
  const double tk = s.point(k);
  const double tol = s.scale().tolerance_at(tk);
  return ScaleFunction([tk, tol](double t) { return std::fabs(t - tk) <= tol ? 1.0 : 0.0; }, s.scale(), s.beta(),
                       tk);
}

ScaleFunction unit_element(const IsolatedScale& s) {
  return ScaleFunction([](double) { return 1.0; }, s.scale(), s.beta());
}

SchauderExpansion schauder_expand(const ScaleFunction& f, const IsolatedScale& s, std::size_t n, double tol,
                                  const LimitOptions& limit) {
  SchauderExpansion e;
  if (!f.support_end) {
    LimitOptions o = limit;
    o.tol = tol;
    const LimitDiagnosis d = limit_at_infinity(f, o);
    if (d.status != LimitStatus::Converged) {
      throw std::domain_error("limit at infinity not diagnosed (" + to_string(d.status) + ")");
    }
    e.limit = d.value;
  }
  e.coefficients.reserve(n);
  for (std::size_t i = 1; i <= n; ++i) e.coefficients.push_back(f(s.point(i)) - e.limit);
  return e;
}

DualRep DualRep::finite(double b, std::vector<double> coeffs) {
  DualRep r;
  r.b = b;
  r.coeffs = std::move(coeffs);
  return r;
}

DualRep DualRep::summable(double b, std::function<double(std::size_t)> gen,
                          std::function<double(std::size_t)> tail_bound) {
  if (!gen || !tail_bound) throw std::invalid_argument("summable coefficients need a generator and a tail bound");
  DualRep r;
  r.b = b;
  r.generator = std::move(gen);
  r.tail_bound = std::move(tail_bound);
  return r;
}

double DualRep::coefficient(std::size_t n) const {
  if (n == 0) throw std::invalid_argument("coefficient indices start at 1");
  if (n <= coeffs.size()) return coeffs[n - 1];
  return generator ? generator(n) : 0.0;
}

std::size_t DualRep::truncation(double tol) const {
  if (finitely_supported()) return coeffs.size();
  std::size_t n = std::max<std::size_t>(coeffs.size(), 16);
  while (tail_bound(n) > tol && n < kMaxPoints) n *= 2;
  return n;
}

bool DualRep::operator==(const DualRep& o) const {
  return finitely_supported() && o.finitely_supported() && b == o.b && coeffs == o.coeffs;
}

namespace {

std::vector<double> leading(const DualRep& rep, std::size_t n) {
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) c[i] = rep.coefficient(i + 1);
  return c;
}

double tail_of(const DualRep& rep, std::size_t n) { return rep.finitely_supported() ? 0.0 : rep.tail_bound(n); }

}  // namespace

Approx apply_functional(const DualRep& rep, const ScaleFunction& f, const IsolatedScale& s, double tol,
                        const LimitOptions& limit) {
  Approx a;
  const std::size_t n = rep.truncation(0.5 * tol);
  const std::vector<double> c = leading(rep, n);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = f(s.point(i + 1));
  a.value = simd::dot(c, v);
  double sup = simd::max_abs(v);

  if (rep.b != 0.0) {
    double l = 0.0;
    if (!f.support_end) {
      const LimitOptions& o = limit;
      const LimitDiagnosis d = limit_at_infinity(f, o);
      if (d.status != LimitStatus::Converged) {
        throw std::domain_error("limit at infinity not diagnosed (" + to_string(d.status) + ")");
      }
      l = d.value;
      a.error += std::fabs(rep.b) * o.tol;
      for (double t : d.window_points) sup = std::max(sup, std::fabs(f(t)));
    }
    a.value += rep.b * l;
  }
  a.error += tail_of(rep, n) * sup;
  return a;
}

Approx functional_norm(const DualRep& rep, double tol) {
  const std::size_t n = rep.truncation(tol);
  return {std::fabs(rep.b) + simd::abs_sum(leading(rep, n)), tail_of(rep, n)};
}

ScaleFunction norm_witness(const DualRep& rep, const IsolatedScale& s, std::size_t r) {
  if (r == 0) throw std::invalid_argument("r must be >= 1");
  std::vector<double> signs(r);
  for (std::size_t i = 0; i < r; ++i) signs[i] = sgn(rep.coefficient(i + 1));
  const double tr = s.point(r);
  const double cut = tr + s.scale().tolerance_at(tr);
  const double tail = sgn(rep.b);
  auto f = [signs = std::move(signs), cut, tail, s](double t) {
    if (t > cut) return tail;
    const auto k = s.index_of(t);
    return k ? signs[*k - 1] : 0.0;
  };
  std::optional<double> support;
  if (tail == 0.0) support = tr;
  return ScaleFunction(std::move(f), s.scale(), s.beta(), support);
}

std::vector<double> to_ell1(const DualRep& rep, double tol) {
  std::vector<double> seq{rep.b};
  const std::vector<double> c = leading(rep, rep.truncation(tol));
  seq.insert(seq.end(), c.begin(), c.end());
  return seq;
}

DualRep from_ell1(const std::vector<double>& seq) {
  if (seq.empty()) return DualRep::finite(0.0, {});
  return DualRep::finite(seq.front(), std::vector<double>(seq.begin() + 1, seq.end()));
}

AbstractOperator identity_operator(const IsolatedScale& s) {
  return {"identity", [s](const ScaleFunction& f, double x) {
            const std::size_t j = s.count_up_to(x);
            return j == 0 ? 0.0 : f(s.point(j));
          }};
}

AbstractOperator shift_operator(const IsolatedScale& s) {
  return {"shift", [s](const ScaleFunction& f, double x) { return f(s.point(s.count_up_to(x) + 1)); }};
}

AbstractOperator cesaro_operator(const IsolatedScale& s) {
  return {"cesaro", [s](const ScaleFunction& f, double x) {
            const std::size_t j = s.count_up_to(x);
            if (j == 0) return 0.0;
            double sum = 0.0;
            for (std::size_t i = 1; i <= j; ++i) sum += f(s.point(i));
            return sum / static_cast<double>(j);
          }};
}

ScaleFunction random_finite_function(const IsolatedScale& s, std::size_t support, std::uint64_t seed) {
  if (support == 0) throw std::invalid_argument("support must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> vals(support);
  for (auto& v : vals) v = u(rng);
  const double tmax = s.point(support);
  const double cut = tmax + s.scale().tolerance_at(tmax);
  auto f = [vals = std::move(vals), cut, s](double t) {
    if (t > cut) return 0.0;
    const auto k = s.index_of(t);
    return k ? vals[*k - 1] : 0.0;
  };
  return ScaleFunction(std::move(f), s.scale(), s.beta(), tmax);
}

namespace {

struct Memo {
  std::shared_mutex m;
  std::map<std::pair<double, std::size_t>, double> entries;
};

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

ExtractedKernel extract_kernel(const AbstractOperator& op, const TimeScale& x_scale, double alpha,
                               const IsolatedScale& t_scale, std::size_t width, const ExtractOptions& opts) {
  if (width == 0) throw std::invalid_argument("width must be >= 1");
  const double tw = t_scale.point(width);
  const double cut = tw + t_scale.scale().tolerance_at(tw);
  auto memo = std::make_shared<Memo>();

  auto eval = [op, t_scale, width, cut, memo](double x, double t) {
    if (t > cut) return 0.0;
    const auto k = t_scale.index_of(t);
    if (!k || *k > width) return 0.0;
    const auto key = std::make_pair(x, *k);
    {
      std::shared_lock lock(memo->m);
      auto it = memo->entries.find(key);
      if (it != memo->entries.end()) return it->second;
    }
    const double v = op.apply(basis_element(t_scale, *k), x) / t_scale.gap(*k);
    std::unique_lock lock(memo->m);
    return memo->entries.try_emplace(key, v).first->second;
  };

  ExtractedKernel out{Kernel(eval, x_scale, alpha, t_scale.scale(), t_scale.beta()), width, {}, {}};
  out.kernel.support_bound = [tw](double) { return tw; };
  out.materialized = [memo] {
    std::shared_lock lock(memo->m);
    return memo->entries.size();
  };

  if (opts.spot_check) {
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    std::uniform_real_distribution<double> reach(0.0, tw - t_scale.beta() + 1.0);
    const std::size_t max_support = std::min<std::size_t>(width, 16);
    for (std::size_t i = 0; i < opts.checks; ++i) {
      const ScaleFunction f = random_finite_function(t_scale, 1 + rng() % max_support, rng());
      const ScaleFunction g = random_finite_function(t_scale, 1 + rng() % max_support, rng());
      const double a = coef(rng);
      const double x = x_scale.ceil_point(std::max(alpha, x_scale.min()) + reach(rng));
      const ScaleFunction h([f, g, a](double t) { return a * f(t) + g(t); }, t_scale.scale(), t_scale.beta(),
                            std::max(*f.support_end, *g.support_end));
      const double lhs = op.apply(h, x);
      const double rhs = a * op.apply(f, x) + op.apply(g, x);
      if (std::fabs(lhs - rhs) > opts.check_tol * (1.0 + std::fabs(lhs) + std::fabs(rhs))) {
        out.warnings.push_back("operator '" + op.name + "' looks nonlinear at x = " + fmt(x) + ": L(af+g) = " +
                               fmt(lhs) + ", aLf + Lg = " + fmt(rhs));
      }
    }
  }
  return out;
}

ReconstructionReport verify_reconstruction(const AbstractOperator& op, const ExtractedKernel& k,
                                           const IsolatedScale& t_scale, const std::vector<ScaleFunction>& test_fns,
                                           const std::vector<double>& xs, double tol) {
  ReconstructionReport rep;
  for (std::size_t i = 0; i < test_fns.size(); ++i) {
    for (double x : xs) {
      const double ov = op.apply(test_fns[i], x);
      const double kv = apply_transform(k.kernel, test_fns[i], x, tol).value;
      const double diff = std::fabs(ov - kv);
      const bool ok = diff <= tol;
      rep.rows.push_back({i, x, ov, kv, ok});
      rep.max_abs_diff = std::max(rep.max_abs_diff, diff);
      rep.all_ok = rep.all_ok && ok;
    }
  }
  const ScaleFunction one = unit_element(t_scale);
  for (double x : xs) rep.unit_rows.emplace_back(x, apply_transform(k.kernel, one, x, tol).value);
  return rep;
}

}  // namespace tscale
