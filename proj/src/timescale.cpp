#include "tscale/timescale.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

namespace tscale {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMonotoneChecks = 10000;
constexpr std::size_t kGeneratedCap = std::size_t{1} << 26;

double tail_start(const Tail& tail) {
  return std::visit([](const auto& t) { return t.start; }, tail);
}

// Lazily materialised points of a GeneratedTail, shared by all copies of the
// owning scale.
class GeneratedPoints {
 public:
  GeneratedPoints(double start, std::function<double(double)> next) : next_(std::move(next)) {
    pts_.push_back(start);
  }

  double at(std::size_t k) {
    std::lock_guard lock(mu_);
    while (pts_.size() <= k) extend();
    return pts_[k];
  }

  // Index of the first point >= v.
  std::size_t lower_index(double v) {
    std::lock_guard lock(mu_);
    while (pts_.back() < v) extend();
    return static_cast<std::size_t>(std::lower_bound(pts_.begin(), pts_.end(), v) - pts_.begin());
  }

 private:
  void extend() {
    if (pts_.size() >= kGeneratedCap) throw ScaleError("generated tail: point cache limit exceeded");
    const double last = pts_.back();
    const double nxt = next_(last);
    if (!std::isfinite(nxt)) throw ScaleError("generated tail produced a non-finite point");
    if (pts_.size() <= kMonotoneChecks && !(nxt > last)) {
      throw ScaleError("generated tail is not strictly increasing");
    }
    pts_.push_back(nxt);
  }

  std::mutex mu_;
  std::function<double(double)> next_;
  std::vector<double> pts_;
};

}  // namespace

struct TimeScale::Impl {
  std::vector<Block> blocks;
  Tail tail;
  double snap = kDefaultSnap;
  std::shared_ptr<GeneratedPoints> generated;

  double tol(double t) const {
    return std::max(snap, 4.0 * std::numeric_limits<double>::epsilon() * std::fabs(t));
  }

  double geometric_point(const GeometricTail& g, std::int64_t k) const {
    return g.start * std::pow(g.ratio, static_cast<double>(k));
  }
};

TimeScale::TimeScale(Tail tail, std::vector<Block> blocks, double snap) {
  auto impl = std::make_shared<Impl>();
  if (!(snap >= 0.0) || !std::isfinite(snap)) throw ScaleError("snap tolerance must be finite and >= 0");
  impl->snap = snap;

  std::visit(
      [&](const auto& t) {
        using T = std::decay_t<decltype(t)>;
        if (!std::isfinite(t.start)) throw ScaleError("tail start must be finite");
        if constexpr (std::is_same_v<T, ArithmeticTail>) {
          if (!(t.step > 0.0) || !std::isfinite(t.step)) throw ScaleError("arithmetic step must be > 0");
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          if (!(t.start > 0.0)) throw ScaleError("geometric start must be > 0");
          if (!(t.ratio > 1.0) || !std::isfinite(t.ratio)) throw ScaleError("geometric ratio must be > 1");
        } else if constexpr (std::is_same_v<T, PeriodicTail>) {
          if (!(t.length >= 0.0) || !(t.period > t.length) || !std::isfinite(t.period)) {
            throw ScaleError("periodic tail needs 0 <= length < period");
          }
        } else if constexpr (std::is_same_v<T, GeneratedTail>) {
          if (!t.next) throw ScaleError("generated tail needs a generator");
        }
      },
      tail);

  for (const auto& b : blocks) {
    if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || b.lo > b.hi) {
      throw ScaleError("block must satisfy lo <= hi with finite endpoints");
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block& a, const Block& b) { return a.lo < b.lo; });
  std::vector<Block> merged;
  for (const auto& b : blocks) {
    if (!merged.empty() && b.lo <= merged.back().hi + impl->tol(b.lo)) {
      merged.back().hi = std::max(merged.back().hi, b.hi);
    } else {
      merged.push_back(b);
    }
  }

  // Blocks reaching into a half-line are absorbed by it.
  if (auto* h = std::get_if<HalfLine>(&tail)) {
    while (!merged.empty() && merged.back().hi >= h->start - impl->tol(h->start)) {
      h->start = std::min(h->start, merged.back().lo);
      merged.pop_back();
    }
  }
  const double start = tail_start(tail);
  if (!merged.empty() && !(start > merged.back().hi + impl->tol(start))) {
    throw ScaleError("tail start must exceed the last block");
  }

  impl->blocks = std::move(merged);
  impl->tail = std::move(tail);
  if (auto* g = std::get_if<GeneratedTail>(&impl->tail)) {
    impl->generated = std::make_shared<GeneratedPoints>(g->start, g->next);
  }
  impl_ = std::move(impl);
}

TimeScale TimeScale::reals(double start) { return TimeScale(HalfLine{start}); }
TimeScale TimeScale::integers(double start) { return TimeScale(ArithmeticTail{start, 1.0}); }
TimeScale TimeScale::arithmetic(double start, double step) { return TimeScale(ArithmeticTail{start, step}); }
TimeScale TimeScale::geometric(double start, double ratio) { return TimeScale(GeometricTail{start, ratio}); }
TimeScale TimeScale::periodic(double start, double length, double period) {
  return TimeScale(PeriodicTail{start, length, period});
}

const std::vector<Block>& TimeScale::blocks() const { return impl_->blocks; }
const Tail& TimeScale::tail() const { return impl_->tail; }
double TimeScale::snap() const { return impl_->snap; }
double TimeScale::tolerance_at(double t) const { return impl_->tol(t); }

TimeScale::Run TimeScale::run_at(std::int64_t index) const {
  const auto& im = *impl_;
  const auto nb = static_cast<std::int64_t>(im.blocks.size());
  if (index < nb) {
    const auto& b = im.blocks[static_cast<std::size_t>(index)];
    return {b.lo, b.hi, index};
  }
  const std::int64_t k = index - nb;
  return std::visit(
      [&](const auto& t) -> Run {
        using T = std::decay_t<decltype(t)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return {t.start, kInf, index};
        } else if constexpr (std::is_same_v<T, ArithmeticTail>) {
          const double p = t.start + static_cast<double>(k) * t.step;
          return {p, p, index};
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          const double p = im.geometric_point(t, k);
          return {p, p, index};
        } else if constexpr (std::is_same_v<T, PeriodicTail>) {
          const double s = t.start + static_cast<double>(k) * t.period;
          return {s, s + t.length, index};
        } else {
          const double p = im.generated->at(static_cast<std::size_t>(k));
          return {p, p, index};
        }
      },
      im.tail);
}

std::optional<TimeScale::Run> TimeScale::prev_run(const Run& r) const {
  if (r.index == 0) return std::nullopt;
  return run_at(r.index - 1);
}

std::optional<TimeScale::Run> TimeScale::locate(double t) const {
  const auto& im = *impl_;
  if (!std::isfinite(t)) return std::nullopt;
  const double tol = im.tol(t);
  const auto nb = static_cast<std::int64_t>(im.blocks.size());
  if (nb > 0 && t <= im.blocks.back().hi + tol) {
    auto it = std::lower_bound(im.blocks.begin(), im.blocks.end(), t,
                               [tol](const Block& b, double v) { return b.hi + tol < v; });
    if (it != im.blocks.end() && it->lo - tol <= t) {
      return Run{it->lo, it->hi, it - im.blocks.begin()};
    }
    return std::nullopt;
  }
  auto near = [&](std::int64_t k) -> std::optional<Run> {
    if (k < 0) return std::nullopt;
    Run r = run_at(nb + k);
    if (t >= r.lo - tol && t <= r.hi + tol) return r;
    return std::nullopt;
  };
  return std::visit(
      [&](const auto& tl) -> std::optional<Run> {
        using T = std::decay_t<decltype(tl)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return near(0);
        } else if constexpr (std::is_same_v<T, ArithmeticTail>) {
          const double q = (t - tl.start) / tl.step;
          if (!(std::fabs(q) < 4e18)) return std::nullopt;
          return near(std::llround(q));
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          if (!(t > 0.0)) return std::nullopt;
          const auto k = std::llround(std::log(t / tl.start) / std::log(tl.ratio));
          for (std::int64_t d : {0, -1, 1}) {
            if (auto r = near(k + d)) return r;
          }
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, PeriodicTail>) {
          const double q = std::floor((t - tl.start) / tl.period);
          if (!(std::fabs(q) < 4e18)) return std::nullopt;
          const auto k = static_cast<std::int64_t>(q);
          for (std::int64_t d : {0, 1, -1}) {
            if (auto r = near(k + d)) return r;
          }
          return std::nullopt;
        } else {
          if (t < tl.start - tol) return std::nullopt;
          const auto i = static_cast<std::int64_t>(im.generated->lower_index(t - tol));
          return near(i);
        }
      },
      im.tail);
}

TimeScale::Run TimeScale::first_run_ending_at_or_after(double v) const {
  const auto& im = *impl_;
  const double tol = im.tol(v);
  const auto nb = static_cast<std::int64_t>(im.blocks.size());
  if (nb > 0 && v <= im.blocks.back().hi + tol) {
    auto it = std::lower_bound(im.blocks.begin(), im.blocks.end(), v,
                               [tol](const Block& b, double x) { return b.hi + tol < x; });
    return Run{it->lo, it->hi, it - im.blocks.begin()};
  }
  const double start = tail_start(im.tail);
  if (v <= start) return run_at(nb);
  std::int64_t k = std::visit(
      [&](const auto& tl) -> std::int64_t {
        using T = std::decay_t<decltype(tl)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return 0;
        } else if constexpr (std::is_same_v<T, ArithmeticTail>) {
          return static_cast<std::int64_t>(std::ceil((v - tl.start) / tl.step)) - 1;
        } else if constexpr (std::is_same_v<T, GeometricTail>) {
          return static_cast<std::int64_t>(std::ceil(std::log(v / tl.start) / std::log(tl.ratio))) - 1;
        } else if constexpr (std::is_same_v<T, PeriodicTail>) {
          return static_cast<std::int64_t>(std::floor((v - tl.start) / tl.period)) - 1;
        } else {
          return static_cast<std::int64_t>(im.generated->lower_index(v - tol));
        }
      },
      im.tail);
  k = std::max<std::int64_t>(k, 0);
  Run r = run_at(nb + k);
  while (r.hi + tol < v) r = run_at(r.index + 1);
  while (r.index > nb) {
    Run p = run_at(r.index - 1);
    if (p.hi + tol < v) break;
    r = p;
  }
  return r;
}

double TimeScale::require(double t) const {
  auto c = canonical(t);
  if (!c) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << t << " is not in the time scale";
    throw ScaleError(os.str());
  }
  return *c;
}

bool TimeScale::contains(double t) const { return locate(t).has_value(); }

std::optional<double> TimeScale::canonical(double t) const {
  auto r = locate(t);
  if (!r) return std::nullopt;
  const double tol = impl_->tol(t);
  if (std::fabs(t - r->lo) <= tol) return r->lo;
  if (std::fabs(t - r->hi) <= tol) return r->hi;
  return t;
}

double TimeScale::sigma(double t) const {
  const double c = require(t);
  const Run r = *locate(c);
  if (c < r.hi) return c;
  return run_at(r.index + 1).lo;
}

double TimeScale::rho(double t) const {
  const double c = require(t);
  const Run r = *locate(c);
  if (c > r.lo) return c;
  auto p = prev_run(r);
  return p ? p->hi : c;
}

double TimeScale::graininess(double t) const {
  const double c = require(t);
  return sigma(c) - c;
}

PointClass TimeScale::classify(double t) const {
  const double c = require(t);
  const Run r = *locate(c);
  PointClass pc;
  pc.right_dense = c < r.hi;
  pc.right_scattered = !pc.right_dense;
  if (c > r.lo) {
    pc.left_dense = true;
  } else if (r.index > 0) {
    pc.left_scattered = true;
  } else {
    pc.at_minimum = true;
  }
  return pc;
}

double TimeScale::min() const { return run_at(0).lo; }

double TimeScale::ceil_point(double v) const {
  if (auto c = canonical(v)) return *c;
  if (v <= min()) return min();
  const Run r = first_run_ending_at_or_after(v);
  return std::max(v, r.lo);
}

double TimeScale::floor_point(double v) const {
  if (auto c = canonical(v)) return *c;
  if (v < min()) throw ScaleError("floor_point below the scale minimum");
  const Run r = first_run_ending_at_or_after(v);
  if (r.lo <= v) return v;
  return prev_run(r)->hi;
}

bool TimeScale::discrete_from(double a) const {
  for (const auto& b : impl_->blocks) {
    if (b.hi > a && b.lo < b.hi) return false;
  }
  return std::visit(
      [](const auto& tl) {
        using T = std::decay_t<decltype(tl)>;
        if constexpr (std::is_same_v<T, HalfLine>) {
          return false;
        } else if constexpr (std::is_same_v<T, PeriodicTail>) {
          return tl.length == 0.0;
        } else {
          return true;
        }
      },
      impl_->tail);
}

void TimeScale::walk(double a, double b, const std::function<bool(const Segment&)>& visit) const {
  const double ca = require(a);
  const double cb = require(b);
  if (ca > cb) throw ScaleError("a must not exceed b");
  Run r = *locate(ca);
  double c = ca;
  while (c < cb) {
    if (c < r.hi) {
      const double e = std::min(cb, r.hi);
      if (!visit(DenseRun{c, e})) return;
      c = e;
      continue;
    }
    const Run n = run_at(r.index + 1);
    if (!visit(Jump{c, n.lo - c})) return;
    c = n.lo;
    r = n;
  }
}

std::vector<Segment> TimeScale::decompose(double a, double b) const {
  std::vector<Segment> out;
  walk(a, b, [&](const Segment& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

std::vector<double> TimeScale::enumerate_points(double a, std::size_t limit, EnumerationMode mode) const {
  const double ca = require(a);
  std::vector<double> out;
  if (limit == 0) return out;
  Run r = *locate(ca);
  if (mode == EnumerationMode::Full) {
    if (!discrete_from(ca)) throw ScaleError("scale has a dense run after the starting point");
    out.push_back(ca);
    while (out.size() < limit) {
      r = run_at(r.index + 1);
      out.push_back(r.lo);
    }
    return out;
  }
  while (out.size() < limit) {
    if (std::isinf(r.hi)) break;
    out.push_back(r.hi);
    r = run_at(r.index + 1);
  }
  return out;
}

std::string to_string(const Segment& s) {
  std::ostringstream os;
  os.precision(17);
  if (const auto* d = std::get_if<DenseRun>(&s)) {
    os << "DenseRun(" << d->lo << ", " << d->hi << ")";
  } else {
    const auto& j = std::get<Jump>(s);
    os << "Jump(" << j.at << ", " << j.gap << ")";
  }
  return os.str();
}

}  // namespace tscale
