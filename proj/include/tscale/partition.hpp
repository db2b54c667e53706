#pragma once

#include <vector>

#include "tscale/timescale.hpp"

namespace tscale {

// Ordered points t_0 = a < t_1 < ... < t_n = b of a time-scale interval.
class Partition {
 public:
  // Validates strict ordering, membership and n >= 1.
  Partition(const TimeScale& ts, std::vector<double> points);

  const std::vector<double>& points() const { return points_; }
  double a() const { return points_.front(); }
  double b() const { return points_.back(); }
  std::size_t gaps() const { return points_.size() - 1; }

 private:
  std::vector<double> points_;
};

// Each dense run of [a, b] is cut into steps of exactly delta (the last one
// shorter), and every jump contributes both of its endpoints.
Partition make_delta_partition(const TimeScale& ts, double a, double b, double delta);

// Every gap is either <= delta, or > delta with rho(t_i) == t_{i-1}.
bool verify_delta_property(const TimeScale& ts, const Partition& p, double delta);

// Halves every gap that has scale points strictly inside it; pure jumps stay.
Partition refine(const TimeScale& ts, const Partition& p);

// Largest gap whose interior meets the scale (0 on fully scattered partitions).
double dense_mesh(const TimeScale& ts, const Partition& p);

}  // namespace tscale
