#include "tscale/partition.hpp"

#include <algorithm>
#include <cmath>

namespace tscale {
namespace {

// (lo, hi) contains no scale point exactly when hi is the backward jump of lo's successor.
bool is_pure_jump(const TimeScale& ts, double lo, double hi) {
  return std::fabs(ts.rho(hi) - lo) <= ts.tolerance_at(hi);
}

}  // namespace

Partition::Partition(const TimeScale& ts, std::vector<double> points) : points_(std::move(points)) {
  if (points_.size() < 2) throw ScaleError("partition needs at least two points");
  for (auto& t : points_) {
    auto c = ts.canonical(t);
    if (!c) throw ScaleError("partition point outside the time scale");
    t = *c;
  }
  for (std::size_t i = 1; i < points_.size(); ++i) {
    if (!(points_[i] > points_[i - 1])) throw ScaleError("partition points must be strictly increasing");
  }
}

Partition make_delta_partition(const TimeScale& ts, double a, double b, double delta) {
  if (!(delta > 0.0)) throw ScaleError("delta must be > 0");
  if (!(a < b)) throw ScaleError("a must be less than b");
  std::vector<double> pts;
  ts.walk(a, b, [&](const Segment& s) {
    if (const auto* d = std::get_if<DenseRun>(&s)) {
      if (pts.empty()) pts.push_back(d->lo);
      const double tol = ts.tolerance_at(d->hi);
      for (std::size_t i = 1;; ++i) {
        const double p = d->lo + static_cast<double>(i) * delta;
        if (p >= d->hi - tol) break;
        pts.push_back(p);
      }
      pts.push_back(d->hi);
    } else {
      const auto& j = std::get<Jump>(s);
      if (pts.empty()) pts.push_back(j.at);
      pts.push_back(j.at + j.gap);
    }
    return true;
  });
  return Partition(ts, std::move(pts));
}

bool verify_delta_property(const TimeScale& ts, const Partition& p, double delta) {
  const auto& pts = p.points();
  for (std::size_t i = 1; i < pts.size(); ++i) {
    // Steps of delta laid from lo accumulate roundoff; allow the matching tolerance.
    const double gap = pts[i] - pts[i - 1];
    if (gap <= delta + ts.tolerance_at(pts[i])) continue;
    if (!is_pure_jump(ts, pts[i - 1], pts[i])) return false;
  }
  return true;
}

Partition refine(const TimeScale& ts, const Partition& p) {
  const auto& pts = p.points();
  std::vector<double> out{pts.front()};
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const double lo = pts[i - 1];
    const double hi = pts[i];
    if (!is_pure_jump(ts, lo, hi)) {
      ts.walk(lo, hi, [&](const Segment& s) {
        if (const auto* d = std::get_if<DenseRun>(&s)) {
          if (d->lo > out.back()) out.push_back(d->lo);
          out.push_back(d->lo + 0.5 * (d->hi - d->lo));
          if (d->hi < hi) out.push_back(d->hi);
        } else {
          const auto& j = std::get<Jump>(s);
          if (j.at > out.back()) out.push_back(j.at);
        }
        return true;
      });
    }
    out.push_back(hi);
  }
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return Partition(ts, std::move(out));
}

double dense_mesh(const TimeScale& ts, const Partition& p) {
  const auto& pts = p.points();
  double mesh = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!is_pure_jump(ts, pts[i - 1], pts[i])) mesh = std::max(mesh, pts[i] - pts[i - 1]);
  }
  return mesh;
}

}  // namespace tscale
