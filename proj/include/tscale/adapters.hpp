#pragma once

// Expressions as scale functions (free variables within {t}) and kernels
// (within {x, t}). Anything else is rejected before numerics run.

#include "tscale/expr.hpp"
#include "tscale/integration.hpp"
#include "tscale/kernel_transform.hpp"

namespace tscale {

ScaleFunction to_scale_function(const expr::Expr& e, TimeScale ts, double start);
Kernel to_kernel(const expr::Expr& e, TimeScale x_scale, double alpha, TimeScale t_scale, double beta);

}  // namespace tscale
