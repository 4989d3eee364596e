#pragma once

// Potentials of the perturbed periodic model: a lattice-periodic background
// V_per, a localized defect W, the periodized defect coefficients, and the
// cutoff/taper functions used by the supercell construction.
//
// Conventions, consumed by assembly:
//   unit-cell series:      V_per(x) = sum_m c(m) e^{i (2pi/l) m x}
//   periodized defect:     What_L(k) = |Gamma_L|^{-1/2} Int_{Gamma_L} W(x) e^{+ikx} dx
// Gamma_L is the centered supercell (-lL/2, lL/2].

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lattice.hpp"
#include "quadrature.hpp"

namespace gapwave {

struct PeriodicPotential {
  double period = two_pi;
  std::function<double(double)> value;  // V_per(x)
  std::function<cplx(int)> unit_coeff;  // c(m), Hermitian-symmetric for real V_per
};

struct DefectPotential {
  double period = two_pi;                       // lattice period the periodization refers to
  std::function<double(double)> value;          // W(x)
  std::function<cplx(int, double)> coeff_impl;  // What_L(k) on validated (L, k)
  std::function<double(int)> tail_sup;          // t(L) = sup of |W| outside Gamma_{L-1}

  // What_L(k); k must lie on the supercell frequency lattice (2pi/(lL)) Z.
  cplx periodized_coeff(int supercell, double k) const {
    if (supercell < 1) throw std::invalid_argument("periodized_coeff: supercell size must be >= 1");
    const double steps = k * period * supercell / two_pi;
    if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, std::abs(steps)))
      throw std::domain_error("periodized_coeff: wavevector off the supercell frequency lattice");
    return coeff_impl(supercell, k);
  }
};

// V_per(x) = |sin x| on the 2pi lattice.  All odd coefficients vanish;
// c(0) = 2/pi and c(m) = -2 / (pi (m^2 - 1)) for even m != 0.
inline PeriodicPotential abs_sin_potential() {
  PeriodicPotential v;
  v.period = two_pi;
  v.value = [](double x) { return std::abs(std::sin(x)); };
  v.unit_coeff = [](int m) -> cplx {
    if (m % 2 != 0) return 0.0;
    if (m == 0) return 2.0 / std::numbers::pi;
    return -2.0 / (std::numbers::pi * (double(m) * m - 1.0));
  };
  return v;
}

// W(x) = -2 e^{-|x|} on the 2pi lattice.  Closed form on Gamma_L = (-pi L, pi L]:
//   What_L(k) = -4 (2 pi L)^{-1/2} [1 + e^{-pi L}(k sin(k pi L) - cos(k pi L))] / (1 + k^2)
inline DefectPotential neg_exp_defect() {
  DefectPotential w;
  w.period = two_pi;
  w.value = [](double x) { return -2.0 * std::exp(-std::abs(x)); };
  w.coeff_impl = [](int L, double k) -> cplx {
    const double piL = std::numbers::pi * L;
    const double bracket = 1.0 + std::exp(-piL) * (k * std::sin(k * piL) - std::cos(k * piL));
    return -4.0 / std::sqrt(2.0 * piL) * bracket / (1.0 + k * k);
  };
  w.tail_sup = [](int L) { return 2.0 * std::exp(-std::numbers::pi * (L - 1)); };
  return w;
}

inline PeriodicPotential zero_periodic(double period = two_pi) {
  PeriodicPotential v;
  v.period = period;
  v.value = [](double) { return 0.0; };
  v.unit_coeff = [](int) -> cplx { return 0.0; };
  return v;
}

inline DefectPotential zero_defect(double period = two_pi) {
  DefectPotential w;
  w.period = period;
  w.value = [](double) { return 0.0; };
  w.coeff_impl = [](int, double) -> cplx { return 0.0; };
  w.tail_sup = [](int) { return 0.0; };
  return w;
}

inline PeriodicPotential scaled(const PeriodicPotential& v, double factor) {
  PeriodicPotential out;
  out.period = v.period;
  out.value = [f = v.value, factor](double x) { return factor * f(x); };
  out.unit_coeff = [c = v.unit_coeff, factor](int m) { return factor * c(m); };
  return out;
}

inline DefectPotential scaled(const DefectPotential& w, double factor) {
  DefectPotential out;
  out.period = w.period;
  out.value = [f = w.value, factor](double x) { return factor * f(x); };
  out.coeff_impl = [c = w.coeff_impl, factor](int L, double k) { return factor * c(L, k); };
  out.tail_sup = [t = w.tail_sup, factor](int L) { return std::abs(factor) * t(L); };
  return out;
}

// Wraps a user-supplied periodic potential.  Without a coefficient
// evaluator, c(m) = (1/l) Int_{-l/2}^{l/2} V(x) e^{-i (2pi/l) m x} dx is
// computed by adaptive quadrature.
inline PeriodicPotential make_periodic(double period, std::function<double(double)> value,
                                       std::function<cplx(int)> coeff = {}) {
  if (!(period > 0.0)) throw std::invalid_argument("make_periodic: period must be positive");
  if (!value) throw std::invalid_argument("make_periodic: pointwise evaluator required");
  PeriodicPotential v;
  v.period = period;
  v.value = value;
  if (coeff) {
    v.unit_coeff = std::move(coeff);
    return v;
  }
  v.unit_coeff = [period, value](int m) -> cplx {
    const double freq = two_pi / period * m;
    const cplx integral = integrate_adaptive_complex(
        [&](double x) { return value(x) * std::polar(1.0, -freq * x); }, -0.5 * period,
        0.5 * period, 1e-13);
    return integral / period;
  };
  return v;
}

// Wraps a user-supplied defect.  Without a coefficient evaluator the
// periodized coefficient is computed by adaptive quadrature over Gamma_L.
// Without a tail evaluator, t(L) is estimated by dense sampling over the
// sixteen periods beyond Gamma_{L-1}; the estimate assumes |W| attains its
// outer sup within that window.
inline DefectPotential make_defect(std::function<double(double)> value,
                                   std::function<cplx(int, double)> coeff = {},
                                   std::function<double(int)> tail = {}, double period = two_pi) {
  if (!(period > 0.0)) throw std::invalid_argument("make_defect: period must be positive");
  if (!value) throw std::invalid_argument("make_defect: pointwise evaluator required");
  DefectPotential w;
  w.period = period;
  w.value = value;
  if (coeff) {
    w.coeff_impl = std::move(coeff);
  } else {
    w.coeff_impl = [period, value](int L, double k) -> cplx {
      const double half = 0.5 * period * L;
      const cplx integral = integrate_adaptive_complex(
          [&](double x) { return value(x) * std::polar(1.0, k * x); }, -half, half, 1e-13);
      return integral / std::sqrt(period * L);
    };
  }
  if (tail) {
    w.tail_sup = std::move(tail);
  } else {
    w.tail_sup = [period, value](int L) {
      const double a = 0.5 * period * (L - 1);
      double sup = 0.0;
      const int samples = 8192;
      for (int j = 0; j <= samples; ++j) {
        const double x = a + 16.0 * period * j / samples;
        sup = std::max(sup, std::max(std::abs(value(x)), std::abs(value(-x))));
      }
      return sup;
    };
  }
  return w;
}

// Smooth cutoff for extending a supercell eigenvector to the whole line:
// 1 on [-a, a] with a = lL/2, 0 outside [-b, b] with b = l(L + sqrt(L))/2.
// The transition uses the quintic blend s(t) = 1 - (10 t^3 - 15 t^4 + 6 t^5),
// whose value and first two derivatives match both junctions.
class CutoffChi {
 public:
  CutoffChi(const LatticeSpec& lattice, int supercell)
      : a_(0.5 * lattice.period() * supercell),
        b_(0.5 * lattice.period() * (supercell + std::sqrt(double(supercell)))) {
    if (supercell < 1) throw std::invalid_argument("CutoffChi: supercell size must be >= 1");
  }

  double plateau_edge() const { return a_; }
  double support_edge() const { return b_; }

  double value(double x) const {
    const double r = std::abs(x);
    if (r <= a_) return 1.0;
    if (r >= b_) return 0.0;
    const double t = (r - a_) / (b_ - a_);
    return 1.0 - t * t * t * (10.0 - 15.0 * t + 6.0 * t * t);
  }

  double deriv(double x) const {
    const double r = std::abs(x);
    if (r <= a_ || r >= b_) return 0.0;
    const double t = (r - a_) / (b_ - a_);
    const double ds = -30.0 * t * t * (1.0 - t) * (1.0 - t);
    return (x < 0.0 ? -ds : ds) / (b_ - a_);
  }

 private:
  double a_, b_;
};

// Taper applied to the defect before periodization: 1 on Gamma_{L-1},
// 0 outside the centered interval of length l(L - 1/2).  The transition
// uses the C^3 blend s(t) = 1 - (35 t^4 - 84 t^5 + 70 t^6 - 20 t^7).
// At L = 1 the plateau collapses to the origin and the whole of (0, l/4]
// is transition band.
class TaperXi {
 public:
  TaperXi(const LatticeSpec& lattice, int supercell)
      : inner_(0.5 * lattice.period() * (supercell - 1)),
        outer_(0.25 * lattice.period() * (2 * supercell - 1)) {
    if (supercell < 1) throw std::invalid_argument("TaperXi: supercell size must be >= 1");
  }

  double inner_edge() const { return inner_; }
  double outer_edge() const { return outer_; }

  double value(double x) const {
    const double r = std::abs(x);
    if (r <= inner_) return 1.0;
    if (r >= outer_) return 0.0;
    const double t = (r - inner_) / (outer_ - inner_);
    const double t4 = t * t * t * t;
    return 1.0 - t4 * (35.0 - 84.0 * t + 70.0 * t * t - 20.0 * t * t * t);
  }

 private:
  double inner_, outer_;
};

// Samples of the tapered defect xi_L * W on the supercell grid; the
// interpolated assembly route analyzes these together with V_per.
inline RealGridField tilde_w_samples(const DefectPotential& w, const SamplingGrid& grid) {
  const TaperXi xi(grid.lattice(), grid.supercell_size());
  std::vector<double> vals(grid.count());
  for (int j = 0; j < grid.count(); ++j) {
    const double x = grid.node(j);
    vals[j] = xi.value(x) * w.value(x);
  }
  return {grid, std::move(vals)};
}

}  // namespace gapwave
