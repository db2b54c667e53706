#include "tscale/adapters.hpp"

#include <stdexcept>

namespace tscale {
namespace {

void reject_unknown(const expr::Expr& e, const std::set<std::string>& allowed, const char* what) {
  for (const auto& v : e.free_vars()) {
    if (!allowed.count(v)) {
      throw std::invalid_argument(std::string(what) + " may not use variable '" + v + "': " + e.source());
    }
  }
}

}  // namespace

ScaleFunction to_scale_function(const expr::Expr& e, TimeScale ts, double start) {
  reject_unknown(e, {"t"}, "a function of t");
  return ScaleFunction([e](double t) { return e.eval_t(t); }, std::move(ts), start);
}

Kernel to_kernel(const expr::Expr& e, TimeScale x_scale, double alpha, TimeScale t_scale, double beta) {
  reject_unknown(e, {"t", "x"}, "a kernel");
  return Kernel([e](double x, double t) { return e.eval_tx(t, x); }, std::move(x_scale), alpha, std::move(t_scale),
                beta);
}

}  // namespace tscale
