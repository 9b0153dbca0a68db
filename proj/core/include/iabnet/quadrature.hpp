#pragma once

#include <cstdint>
#include <functional>

#include "iabnet/types.hpp"

namespace iabnet {

struct QuadratureResult {
  double value = 0.0;
  double est_abs_error = 0.0;
  std::uint64_t evaluations = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_segments = 4000;
};

using Integrand = std::function<double(double)>;

// Globally adaptive bisection on [a, b]; each segment is evaluated with an
// embedded 7/15-point Gauss-Legendre pair and the worst segment is split
// first.  Throws NumericError when the error estimate stays far above the
// requested tolerance after the segment budget is spent.
QuadratureResult integrate(const Integrand& f, double a, double b,
                           const QuadratureOptions& opt = {});

// Integral over [a, inf) via u = a + scale * t / (1 - t).  `scale` sets the
// node density profile; any positive value converges, a value near the
// integrand's decay length converges fastest.
QuadratureResult integrate_semi_infinite(const Integrand& f, double a, double scale,
                                         const QuadratureOptions& opt = {},
                                         double t_clamp = 1e-12);

}  // namespace iabnet
