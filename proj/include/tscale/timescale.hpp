#pragma once

// Time scales: closed subsets of the real line that are unbounded above.
//
// A TimeScale is a finite, canonical list of blocks (closed intervals and
// isolated points) followed by a tail that carries the set to +infinity.
// Internally the set is viewed as an ordered sequence of "runs", maximal
// connected pieces [lo, hi] (lo == hi for a scattered point), which makes
// sigma, rho and segment decomposition local lookups.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace tscale {

inline constexpr double kDefaultSnap = 1e-12;

// Raised for malformed scale descriptions and for queries at points that do
// not belong to the scale.
class ScaleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Block {
  double lo;
  double hi;

  static Block interval(double lo, double hi) { return {lo, hi}; }
  static Block point(double p) { return {p, p}; }
};

struct HalfLine {
  double start;
};

struct ArithmeticTail {
  double start;
  double step;
};

struct GeometricTail {
  double start;
  double ratio;
};

// Intervals [start + k*period, start + k*period + length], k = 0, 1, ...
struct PeriodicTail {
  double start;
  double length;
  double period;
};

// Points start, next(start), next(next(start)), ...  The generator must be
// strictly increasing and unbounded; the first 10^4 generated points are
// checked for strict growth.
struct GeneratedTail {
  double start;
  std::function<double(double)> next;
};

using Tail = std::variant<HalfLine, ArithmeticTail, GeometricTail, PeriodicTail, GeneratedTail>;

struct PointClass {
  bool right_scattered = false;
  bool right_dense = false;
  bool left_scattered = false;
  bool left_dense = false;
  // The scale minimum has no left neighbourhood; both left flags are false.
  bool at_minimum = false;

  bool isolated() const { return right_scattered && (left_scattered || at_minimum); }
  bool dense() const { return right_dense && (left_dense || at_minimum); }
};

struct DenseRun {
  double lo;
  double hi;
};

struct Jump {
  double at;
  double gap;
};

using Segment = std::variant<DenseRun, Jump>;

enum class EnumerationMode {
  // Every point from a on; the scale must be discrete there.
  Full,
  // Right-scattered points only; dense stretches are skipped.
  ScatteredAnchors,
};

class TimeScale {
 public:
  explicit TimeScale(Tail tail, std::vector<Block> blocks = {}, double snap = kDefaultSnap);

  static TimeScale reals(double start = 0.0);
  static TimeScale integers(double start = 0.0);
  static TimeScale arithmetic(double start, double step);
  static TimeScale geometric(double start, double ratio);
  static TimeScale periodic(double start, double length, double period);

  bool contains(double t) const;

  // The scale point t snaps to (run endpoints are canonical), if any.
  std::optional<double> canonical(double t) const;

  double sigma(double t) const;
  // rho(min) == min.
  double rho(double t) const;
  double graininess(double t) const;
  PointClass classify(double t) const;

  double min() const;

  // Smallest scale point >= v and largest scale point <= v (v >= min()).
  double ceil_point(double v) const;
  double floor_point(double v) const;

  // True when every point of [a, inf) in the scale is right-scattered.
  bool discrete_from(double a) const;

  std::vector<Segment> decompose(double a, double b) const;

  // Streams the decomposition of [a, b]; returning false stops the walk.
  void walk(double a, double b, const std::function<bool(const Segment&)>& visit) const;

  std::vector<double> enumerate_points(double a, std::size_t limit,
                                       EnumerationMode mode = EnumerationMode::Full) const;

  const std::vector<Block>& blocks() const;
  const Tail& tail() const;
  double snap() const;

  // Matching tolerance at t: max(snap, 4 eps |t|).
  double tolerance_at(double t) const;

 private:
  struct Run {
    double lo;
    double hi;
    std::int64_t index;
  };
  struct Impl;

  double require(double t) const;
  std::optional<Run> locate(double t) const;
  Run run_at(std::int64_t index) const;
  std::optional<Run> prev_run(const Run& r) const;
  Run first_run_ending_at_or_after(double v) const;

  std::shared_ptr<const Impl> impl_;
};

std::string to_string(const Segment& s);

}  // namespace tscale
