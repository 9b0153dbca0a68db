#include "iabnet/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <vector>

namespace iabnet {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

// Legendre nodes by Newton iteration on P_n; weights 2 / ((1-x^2) P_n'^2).
GaussRule make_rule(int n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::fabs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

const GaussRule& rule7() {
  static const GaussRule r = make_rule(7);
  return r;
}
const GaussRule& rule15() {
  static const GaussRule r = make_rule(15);
  return r;
}

struct Segment {
  double a, b;
  double value;  // 15-point estimate
  double error;  // |15-point - 7-point|
};

struct SegmentWorse {
  bool operator()(const Segment& x, const Segment& y) const { return x.error < y.error; }
};

Segment evaluate_segment(const Integrand& f, double a, double b, std::uint64_t& evals) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double i7 = 0.0, i15 = 0.0;
  for (int i = 0; i < 7; ++i) i7 += rule7().weights[i] * f(mid + half * rule7().nodes[i]);
  for (int i = 0; i < 15; ++i) i15 += rule15().weights[i] * f(mid + half * rule15().nodes[i]);
  evals += 22;
  i7 *= half;
  i15 *= half;
  if (!std::isfinite(i15) || !std::isfinite(i7))
    throw NumericError("quadrature: non-finite integrand", i15, std::fabs(i15 - i7));
  return Segment{a, b, i15, std::fabs(i15 - i7)};
}

}  // namespace

QuadratureResult integrate(const Integrand& f, double a, double b, const QuadratureOptions& opt) {
  QuadratureResult res;
  if (a == b) return res;

  std::priority_queue<Segment, std::vector<Segment>, SegmentWorse> heap;
  Segment whole = evaluate_segment(f, a, b, res.evaluations);
  double sum = whole.value;
  double err = whole.error;
  heap.push(whole);
  int segments = 1;

  auto target = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::fabs(sum)); };

  while (err > target() && segments < opt.max_segments) {
    Segment worst = heap.top();
    heap.pop();
    sum -= worst.value;
    err -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // interval at floating-point resolution; keep its estimate
      sum += worst.value;
      err += worst.error;
      break;
    }
    Segment left = evaluate_segment(f, worst.a, mid, res.evaluations);
    Segment right = evaluate_segment(f, mid, worst.b, res.evaluations);
    sum += left.value + right.value;
    err += left.error + right.error;
    heap.push(left);
    heap.push(right);
    ++segments;
  }

  res.value = sum;
  res.est_abs_error = err;
  if (err > std::max(100.0 * target(), 1e-3 * std::fabs(sum)) && segments >= opt.max_segments)
    throw NumericError("quadrature: failed to converge", sum, err);
  return res;
}

QuadratureResult integrate_semi_infinite(const Integrand& f, double a, double scale,
                                         const QuadratureOptions& opt, double t_clamp) {
  if (!(scale > 0.0)) scale = 1.0;
  const double t_max = 1.0 - std::max(t_clamp, 1e-15);
  auto mapped = [&](double t) {
    const double om = 1.0 - t;
    const double u = a + scale * t / om;
    const double jac = scale / (om * om);
    return f(u) * jac;
  };
  return integrate(mapped, 0.0, t_max, opt);
}

}  // namespace iabnet
