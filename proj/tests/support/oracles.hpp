#pragma once

// Test-only oracles, written independently of the library paths they check:
// adaptive Simpson quadrature, a plain least-squares line fit, a naive DFT
// reference, and seeded random data helpers.

#include <cmath>
#include <complex>
#include <random>
#include <stdexcept>
#include <tuple>
#include <vector>

#include <gapwave/lattice.hpp>

namespace oracle {

using cplx = std::complex<double>;

namespace detail {

template <class F, class R>
R simpson_step(const F& f, double a, double m, double b, R fa, R fm, R fb, R whole,
               double tol, int depth) {
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const R flm = f(lm), frm = f(rm);
  const R left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const R right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const R sum = left + right;
  if (depth <= 0 || std::abs(sum - whole) <= 15.0 * tol) return sum + (sum - whole) / 15.0;
  return simpson_step(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

// Adaptive Simpson with Richardson correction. R is double or complex.
template <class F>
auto integrate(const F& f, double a, double b, double tol = 1e-11, int depth = 30) {
  using R = decltype(f(a));
  const double m = 0.5 * (a + b);
  const R fa = f(a), fm = f(m), fb = f(b);
  const R whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_step(f, a, m, b, fa, fm, fb, whole, tol, depth);
}

struct LineFit {
  double slope, intercept, r2;
};

inline LineFit lsq_line(const std::vector<double>& xs, const std::vector<double>& ys) {
  const size_t n = xs.size();
  if (n < 2 || ys.size() != n) throw std::invalid_argument("lsq_line: bad input");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("lsq_line: degenerate xs");
  const double slope = (n * sxy - sx * sy) / det;
  const double intercept = (sy - slope * sx) / n;
  double ss_res = 0, ss_tot = 0;
  const double ybar = sy / n;
  for (size_t i = 0; i < n; ++i) {
    const double fit = slope * xs[i] + intercept;
    ss_res += (ys[i] - fit) * (ys[i] - fit);
    ss_tot += (ys[i] - ybar) * (ys[i] - ybar);
  }
  return LineFit{slope, intercept, ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot};
}

// Reference transform straight from the definition, evaluated with one polar
// call per term: b(r) = (1/M) sum_j u_j e^{-i k(r) x_j}.
inline std::vector<cplx> naive_grid_transform(const gapwave::SamplingGrid& grid,
                                              const std::vector<cplx>& u) {
  const int M = grid.count();
  std::vector<cplx> out(M);
  for (int r = 0; r < M; ++r) {
    const double k =
        gapwave::two_pi / grid.lattice().period() * (double(r) / grid.supercell_size());
    cplx acc{0.0, 0.0};
    for (int j = 0; j < M; ++j) acc += u[j] * std::polar(1.0, -k * grid.node(j));
    out[r] = acc / double(M);
  }
  return out;
}

inline std::mt19937 seeded_rng(unsigned seed) { return std::mt19937{seed}; }

inline std::vector<cplx> random_complex(int n, std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  std::vector<cplx> v(n);
  for (auto& c : v) c = cplx{d(rng), d(rng)};
  return v;
}

// Coefficients of a random real-valued field: c(-m) = conj(c(m)), c(0) real.
inline gapwave::FourierVector random_real_field(const gapwave::PlanewaveBasis& basis,
                                                std::mt19937& rng) {
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  gapwave::FourierVector v{basis};
  v.coeff(0) = cplx{d(rng), 0.0};
  for (int m = 1; m <= basis.mode_bound(); ++m) {
    const cplx c{d(rng), d(rng)};
    v.coeff(m) = c;
    v.coeff(-m) = std::conj(c);
  }
  return v;
}

}  // namespace oracle
