#pragma once

// Adaptive Gauss-Kronrod integration on a real interval.
//
// Each segment is estimated with the 7-point Gauss rule embedded in the
// 15-point Kronrod rule; |K15 - G7| serves as the local error estimate.
// Segments whose estimate exceeds their share of the tolerance are bisected.
// Work is bounded by a segment budget, so the routine always terminates;
// the returned error field reports what was actually achieved.

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"

namespace gapwave {

namespace detail {

// 15-point Kronrod abscissae on [0, 1] side (symmetric rule), Kronrod
// weights, and the embedded 7-point Gauss weights.  Exact for polynomials
// of degree 22 (Kronrod) and 13 (Gauss).
inline constexpr double kronrod_x[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.0};
inline constexpr double kronrod_w[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
// Gauss weights pair with kronrod_x[1], [3], [5], [7].
inline constexpr double gauss_w[4] = {0.129484966168870, 0.279705391489277,
                                      0.381830050505119, 0.417959183673469};

template <class R, class F>
void gauss_kronrod_segment(const F& f, double a, double b, R& k15, double& err) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  R gauss = gauss_w[3] * f(mid);
  R kron = kronrod_w[7] * f(mid);
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_x[i];
    const R pair = f(mid - dx) + f(mid + dx);
    kron += kronrod_w[i] * pair;
    if (i % 2 == 1) gauss += gauss_w[i / 2] * pair;
  }
  k15 = half * kron;
  err = std::abs(half * (kron - gauss));
}

}  // namespace detail

struct QuadratureResult {
  double error = 0.0;     // accumulated local error estimates
  bool converged = true;  // false when the segment budget ran out
};

// Integrates f over [a, b] into `value`; f returns double or complex.
// abs_tol is an absolute target for the whole interval.
template <class R, class F>
QuadratureResult integrate_adaptive_into(const F& f, double a, double b, R& value,
                                         double abs_tol = 1e-12, std::size_t max_segments = 20000) {
  if (!(b > a)) throw std::invalid_argument("integrate_adaptive: empty interval");
  struct Segment {
    double a, b, tol;
  };
  std::vector<Segment> stack{{a, b, abs_tol}};
  value = R{};
  QuadratureResult out;
  std::size_t used = 0;
  while (!stack.empty()) {
    const Segment s = stack.back();
    stack.pop_back();
    R local;
    double err;
    detail::gauss_kronrod_segment(f, s.a, s.b, local, err);
    ++used;
    // Width floor guards against splitting forever at a singular point.
    const bool accept = err <= s.tol || (s.b - s.a) < 1e-14 * (b - a) || used >= max_segments;
    if (accept) {
      value += local;
      out.error += err;
      if (err > s.tol) out.converged = false;
      continue;
    }
    const double mid = 0.5 * (s.a + s.b);
    stack.push_back({s.a, mid, 0.5 * s.tol});
    stack.push_back({mid, s.b, 0.5 * s.tol});
  }
  return out;
}

inline double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                 double abs_tol = 1e-12) {
  double value;
  integrate_adaptive_into(f, a, b, value, abs_tol);
  return value;
}

inline cplx integrate_adaptive_complex(const std::function<cplx(double)>& f, double a, double b,
                                       double abs_tol = 1e-12) {
  cplx value;
  integrate_adaptive_into(f, a, b, value, abs_tol);
  return value;
}

}  // namespace gapwave
