#pragma once

// Independent eigenvalue oracle: Householder reduction to tridiagonal form
// followed by Sturm-sequence bisection.  No shared code with the library's
// solver; used to cross-check eigh.

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace oracle {

// In-place Householder tridiagonalization of a dense symmetric matrix given
// row-major; returns the diagonal and subdiagonal.
inline void tridiagonalize(std::vector<double>& a, int n, std::vector<double>& diag,
                           std::vector<double>& sub) {
  auto at = [&](int i, int j) -> double& { return a[std::size_t(i) * n + j]; };
  std::vector<double> v(n), p(n), q(n);

  for (int k = 0; k < n - 2; ++k) {
    double norm2 = 0.0;
    for (int i = k + 1; i < n; ++i) norm2 += at(i, k) * at(i, k);
    if (norm2 == 0.0) continue;
    const double x0 = at(k + 1, k);
    const double alpha = (x0 >= 0.0 ? -1.0 : 1.0) * std::sqrt(norm2);

    double vtv = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = at(i, k);
      if (i == k + 1) v[i] -= alpha;
      vtv += v[i] * v[i];
    }
    if (vtv == 0.0) continue;
    const double beta = 2.0 / vtv;

    // Symmetric rank-two update A <- A - v q^T - q v^T on the trailing block,
    // with p = beta A v and q = p - (beta/2)(v^T p) v.
    double vtp = 0.0;
    for (int i = k + 1; i < n; ++i) {
      double s = 0.0;
      for (int j = k + 1; j < n; ++j) s += at(i, j) * v[j];
      p[i] = beta * s;
      vtp += v[i] * p[i];
    }
    for (int i = k + 1; i < n; ++i) q[i] = p[i] - 0.5 * beta * vtp * v[i];
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j) at(i, j) -= v[i] * q[j] + q[i] * v[j];

    at(k + 1, k) = alpha;
    at(k, k + 1) = alpha;
    for (int i = k + 2; i < n; ++i) {
      at(i, k) = 0.0;
      at(k, i) = 0.0;
    }
  }
  diag.resize(n);
  sub.assign(n > 1 ? n - 1 : 0, 0.0);
  for (int i = 0; i < n; ++i) diag[i] = at(i, i);
  for (int i = 0; i + 1 < n; ++i) sub[i] = at(i + 1, i);
}

// Number of eigenvalues of the tridiagonal matrix strictly below x, by the
// classic Sturm sign-agreement count.
inline int sturm_count(const std::vector<double>& diag, const std::vector<double>& sub, double x) {
  int count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    const double off = (i == 0) ? 0.0 : sub[i - 1];
    d = diag[i] - x - off * off / (d == 0.0 ? 1e-300 : d);
    if (d < 0.0) ++count;
  }
  return count;
}

// All eigenvalues, ascending, of a dense symmetric matrix (row-major), each
// found by bisection on the Sturm count.
inline std::vector<double> symmetric_eigenvalues_bisect(std::vector<double> a, int n,
                                                        double tol = 1e-13) {
  std::vector<double> diag, sub;
  tridiagonalize(a, n, diag, sub);

  double lo = diag[0], hi = diag[0];
  for (int i = 0; i < n; ++i) {
    const double r = (i > 0 ? std::abs(sub[i - 1]) : 0.0) + (i + 1 < n ? std::abs(sub[i]) : 0.0);
    lo = std::min(lo, diag[i] - r);
    hi = std::max(hi, diag[i] + r);
  }
  const double span = std::max(hi - lo, 1.0);

  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) {
    double a0 = lo, b0 = hi;
    while (b0 - a0 > tol * span) {
      const double mid = 0.5 * (a0 + b0);
      if (sturm_count(diag, sub, mid) <= j)
        a0 = mid;
      else
        b0 = mid;
    }
    out[j] = 0.5 * (a0 + b0);
  }
  return out;
}

// Complex Hermitian case via the real embedding [[Re, -Im], [Im, Re]]:
// every eigenvalue appears twice, so the odd-indexed copies are dropped.
inline std::vector<double> hermitian_eigenvalues_bisect(
    const std::vector<std::complex<double>>& h, int n, double tol = 1e-13) {
  const int m = 2 * n;
  std::vector<double> a(std::size_t(m) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::complex<double> z = h[std::size_t(i) * n + j];
      a[std::size_t(i) * m + j] = z.real();
      a[std::size_t(i) * m + (n + j)] = -z.imag();
      a[std::size_t(n + i) * m + j] = z.imag();
      a[std::size_t(n + i) * m + (n + j)] = z.real();
    }
  }
  const auto doubled = symmetric_eigenvalues_bisect(std::move(a), m, tol);
  std::vector<double> out(n);
  for (int j = 0; j < n; ++j) out[j] = 0.5 * (doubled[2 * j] + doubled[2 * j + 1]);
  return out;
}

}  // namespace oracle
