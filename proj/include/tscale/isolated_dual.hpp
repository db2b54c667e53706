#pragma once

// Scales whose part from beta on is a sequence of isolated points
// t_1 = beta < t_2 < ...: the basis {e, e_1, e_2, ...} of C, bounded linear
// functionals F(f) = b lim f + sum b_n f(t_n), and kernels recovered from
// black-box operators via K(x, t_k) mu(t_k) = (L e_k)(x).

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "tscale/function_spaces.hpp"
#include "tscale/integration.hpp"
#include "tscale/kernel_transform.hpp"

namespace tscale {

class IsolatedScale {
 public:
  // Throws ScaleError unless every point of the scale from beta on is isolated.
  IsolatedScale(TimeScale ts, double beta);

  const TimeScale& scale() const { return ts_; }
  double beta() const { return beta_; }

  // t_k, 1-based.
  double point(std::size_t k) const;
  // t_{k+1} - t_k.
  double gap(std::size_t k) const;
  std::optional<std::size_t> index_of(double t) const;
  // Number of points t_k <= v.
  std::size_t count_up_to(double v) const;

 private:
  struct Cache;
  TimeScale ts_;
  double beta_;
  std::shared_ptr<Cache> cache_;
};

ScaleFunction basis_element(const IsolatedScale& s, std::size_t k);
ScaleFunction unit_element(const IsolatedScale& s);

struct SchauderExpansion {
  double limit = 0.0;
  std::vector<double> coefficients;  // f(t_n) - limit, n = 1..N
};

// Throws std::domain_error when the limit of f is not diagnosed.
SchauderExpansion schauder_expand(const ScaleFunction& f, const IsolatedScale& s, std::size_t n, double tol,
                                  const LimitOptions& limit = {});

// Value together with a bound on the truncation/limit error folded into it.
struct Approx {
  double value = 0.0;
  double error = 0.0;
};

struct DualRep {
  double b = 0.0;
  std::vector<double> coeffs;  // b_1 .. b_m
  // Summable tail beyond coeffs: b_n for n > m, with tail_bound(N) >= sum_{n>N} |b_n|.
  std::function<double(std::size_t n)> generator;
  std::function<double(std::size_t n)> tail_bound;

  static DualRep finite(double b, std::vector<double> coeffs);
  static DualRep summable(double b, std::function<double(std::size_t)> gen,
                          std::function<double(std::size_t)> tail_bound);

  bool finitely_supported() const { return !generator; }
  double coefficient(std::size_t n) const;
  // Number of leading coefficients to use for a tail of at most tol.
  std::size_t truncation(double tol) const;

  bool operator==(const DualRep& o) const;
};

Approx apply_functional(const DualRep& rep, const ScaleFunction& f, const IsolatedScale& s, double tol,
                        const LimitOptions& limit = {});

Approx functional_norm(const DualRep& rep, double tol = 1e-15);

// f(t_n) = sgn b_n for n <= r, sgn b afterwards.
ScaleFunction norm_witness(const DualRep& rep, const IsolatedScale& s, std::size_t r);

// (b, b_1, b_2, ...); generator tails are materialized up to a tail of tol.
std::vector<double> to_ell1(const DualRep& rep, double tol = 1e-15);
DualRep from_ell1(const std::vector<double>& seq);

// A bounded linear map from functions on the t-scale to functions on an
// x-scale, known only through (Lf)(x).
struct AbstractOperator {
  std::string name;
  std::function<double(const ScaleFunction& f, double x)> apply;
};

// With t_j the last t-point <= x:  f(t_j);  f(t_{j+1});  mean of f(t_1..t_j).
AbstractOperator identity_operator(const IsolatedScale& s);
AbstractOperator shift_operator(const IsolatedScale& s);
AbstractOperator cesaro_operator(const IsolatedScale& s);

struct ExtractOptions {
  bool spot_check = true;
  std::size_t checks = 8;
  double check_tol = 1e-9;
  std::uint64_t seed = 0x5eed;
};

struct ExtractedKernel {
  Kernel kernel;
  std::size_t width;
  std::vector<std::string> warnings;
  // Entries computed so far.
  std::function<std::size_t()> materialized;
};

// K(x, t_k) = (op e_k)(x) / (t_{k+1} - t_k) for k <= width, 0 beyond;
// entries are computed on first use and memoized.
ExtractedKernel extract_kernel(const AbstractOperator& op, const TimeScale& x_scale, double alpha,
                               const IsolatedScale& t_scale, std::size_t width, const ExtractOptions& opts = {});

struct ReconstructionRow {
  std::size_t function;
  double x;
  double operator_value;
  double kernel_value;
  bool ok;
};

struct ReconstructionReport {
  std::vector<ReconstructionRow> rows;
  // Integral of K(x, .) against f == 1 at each x.
  std::vector<std::pair<double, double>> unit_rows;
  double max_abs_diff = 0.0;
  bool all_ok = true;
};

ReconstructionReport verify_reconstruction(const AbstractOperator& op, const ExtractedKernel& k,
                                           const IsolatedScale& t_scale, const std::vector<ScaleFunction>& test_fns,
                                           const std::vector<double>& xs, double tol);

// Random function supported on t_1 .. t_support with values in [-1, 1].
ScaleFunction random_finite_function(const IsolatedScale& s, std::size_t support, std::uint64_t seed);

}  // namespace tscale
