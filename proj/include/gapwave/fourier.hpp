#pragma once

// Discrete Fourier analysis on the centered supercell grid, synthesis,
// spectral projection, trigonometric interpolation, and Sobolev norms.
//
// Conventions, fixed once here and consumed by assembly:
//   coefficient of a supercell function:  c(k) = |Gamma_L|^{-1/2} Int u e^{-ikx}
//   grid transform:  b(m) = (1/M) sum_j u(x_j) e^{-i k(m) x_j}
// On the centered grid x_j = -len/2 + j*len/M the index shift obeys
// b(m + M) = (-1)^M b(m), so the sequence is M-periodic for even M and
// M-antiperiodic for odd M; at() applies that rule exactly.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "lattice.hpp"

namespace gapwave {

namespace detail {

// S_r = sum_j u_j w^{r j} with w = e^{-2 pi i / M}, all r. Plain O(M^2).
inline std::vector<cplx> dft_direct(const std::vector<cplx>& u) {
  const int M = int(u.size());
  std::vector<cplx> table(M), out(M);
  for (int t = 0; t < M; ++t) table[t] = std::polar(1.0, -two_pi * t / M);
  for (int r = 0; r < M; ++r) {
    cplx acc{0.0, 0.0};
    long idx = 0;
    for (int j = 0; j < M; ++j) {
      acc += u[j] * table[idx];
      idx += r;
      if (idx >= M) idx -= M;
    }
    out[r] = acc;
  }
  return out;
}

// Iterative radix-2 Cooley-Tukey, same sign convention as dft_direct.
inline std::vector<cplx> dft_radix2(std::vector<cplx> a) {
  const int M = int(a.size());
  for (int i = 1, j = 0; i < M; ++i) {
    int bit = M >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= M; len <<= 1) {
    const cplx wl = std::polar(1.0, -two_pi / len);
    for (int i = 0; i < M; i += len) {
      cplx w{1.0, 0.0};
      for (int j = 0; j < len / 2; ++j) {
        cplx even = a[i + j], odd = a[i + j + len / 2] * w;
        a[i + j] = even + odd;
        a[i + j + len / 2] = even - odd;
        w *= wl;
      }
    }
  }
  return a;
}

inline bool power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

}  // namespace detail

class DftCoefficients {
public:
  DftCoefficients(SamplingGrid grid, std::vector<cplx> bins)
      : grid_(grid), bins_(std::move(bins)) {
    if (int(bins_.size()) != grid_.count())
      throw std::invalid_argument("dft: bin count does not match grid");
  }

  const SamplingGrid& grid() const { return grid_; }
  int count() const { return grid_.count(); }

  // b(m) for any integer mode index, via the (-1)^M wrap rule.
  cplx at(long m) const {
    const long M = count();
    long r = ((m % M) + M) % M;
    long q = (m - r) / M;
    cplx value = bins_[size_t(r)];
    if ((M & 1) && (q & 1)) value = -value;
    return value;
  }

private:
  SamplingGrid grid_;
  std::vector<cplx> bins_;
};

// b(m) = (1/M) sum_j u(x_j) e^{-i k(m) x_j} for m = 0..M-1. On the centered
// grid this equals (-1)^m/M times the standard DFT, which is what both the
// direct and the radix-2 path compute.
template <class T>
DftCoefficients analyze(const BasicGridField<T>& field) {
  const int M = field.grid.count();
  std::vector<cplx> u(field.values.begin(), field.values.end());
  std::vector<cplx> s =
      detail::power_of_two(M) ? detail::dft_radix2(std::move(u)) : detail::dft_direct(u);
  std::vector<cplx> bins(M);
  for (int r = 0; r < M; ++r) bins[r] = (r & 1 ? -s[r] : s[r]) / double(M);
  return DftCoefficients{field.grid, std::move(bins)};
}

// u(x_j) = sum_m c(m) |Gamma_L|^{-1/2} e^{i k(m) x_j}. Hermitian-symmetric
// coefficient vectors synthesize real fields; their residual imaginary parts
// are dropped.
inline GridField synthesize_on_grid(const FourierVector& vec, const SamplingGrid& grid) {
  if (grid.supercell_size() != vec.basis().supercell_size() ||
      !(grid.lattice() == vec.basis().lattice()))
    throw std::invalid_argument("synthesize: grid and basis disagree on the supercell");
  const int M = grid.count();
  const int N = vec.mode_bound();
  const double nf = vec.basis().norm_factor();
  std::vector<cplx> values(M, cplx{0.0, 0.0});
  for (int m = -N; m <= N; ++m) {
    const cplx c = vec.coeff(m);
    if (c == cplx{0.0, 0.0}) continue;
    const double k = vec.basis().wavevector(m);
    for (int j = 0; j < M; ++j) values[j] += c * std::polar(nf, k * grid.node(j));
  }
  if (vec.hermitian_symmetric(1e-10)) {
    for (auto& v : values) v = cplx{v.real(), 0.0};
  }
  return GridField{grid, std::move(values)};
}

// Orthogonal projection onto modes |m| <= target: coefficients outside the
// window are zeroed, the basis is unchanged.
inline FourierVector project(const FourierVector& vec, int target_mode_bound) {
  if (target_mode_bound < 0) throw std::invalid_argument("project: negative mode bound");
  FourierVector out = vec;
  for (int m = -vec.mode_bound(); m <= vec.mode_bound(); ++m)
    if (std::abs(m) > target_mode_bound) out.coeff(m) = cplx{0.0, 0.0};
  return out;
}

// Trigonometric interpolant through the grid samples. Window: |m| <= (M-1)/2
// for odd M; for even M the Nyquist bin is split evenly between m = -M/2 and
// m = +M/2, which keeps the node-interpolation property and yields a real
// interpolant for real input.
template <class T>
FourierVector interpolate(const BasicGridField<T>& field) {
  const int M = field.grid.count();
  const DftCoefficients dft = analyze(field);
  const int bound = M / 2;
  PlanewaveBasis basis{field.grid.lattice(), field.grid.supercell_size(), bound};
  FourierVector out{basis};
  const double scale = std::sqrt(basis.cell_length());
  if (M % 2 == 1) {
    for (int m = -bound; m <= bound; ++m) out.coeff(m) = scale * dft.at(m);
  } else {
    for (int m = -(bound - 1); m <= bound - 1; ++m) out.coeff(m) = scale * dft.at(m);
    out.coeff(bound) = 0.5 * scale * dft.at(bound);
    out.coeff(-bound) = 0.5 * scale * dft.at(-bound);
  }
  return out;
}

// Pointwise synthesis at arbitrary x; the Fourier sum is supercell-periodic,
// so this also evaluates the periodic extension beyond Gamma_L.
inline cplx eval_at(const FourierVector& vec, double x) {
  const double nf = vec.basis().norm_factor();
  cplx acc{0.0, 0.0};
  for (int m = -vec.mode_bound(); m <= vec.mode_bound(); ++m)
    acc += vec.coeff(m) * std::polar(nf, vec.basis().wavevector(m) * x);
  return acc;
}

inline cplx eval_deriv_at(const FourierVector& vec, double x) {
  const double nf = vec.basis().norm_factor();
  cplx acc{0.0, 0.0};
  for (int m = -vec.mode_bound(); m <= vec.mode_bound(); ++m) {
    const double k = vec.basis().wavevector(m);
    acc += vec.coeff(m) * cplx{0.0, k} * std::polar(nf, k * x);
  }
  return acc;
}

// ( sum_m (1 + k(m)^2)^r |c(m)|^2 )^{1/2}; r = 0 is the L2_per norm.
inline double sobolev_norm(const FourierVector& vec, double r) {
  if (r < 0.0) throw std::invalid_argument("sobolev_norm: order must be >= 0");
  double acc = 0.0;
  for (int m = -vec.mode_bound(); m <= vec.mode_bound(); ++m) {
    const double k = vec.basis().wavevector(m);
    acc += std::pow(1.0 + k * k, r) * std::norm(vec.coeff(m));
  }
  return std::sqrt(acc);
}

inline FourierVector differentiate(const FourierVector& vec) {
  FourierVector out = vec;
  for (int m = -vec.mode_bound(); m <= vec.mode_bound(); ++m)
    out.coeff(m) *= cplx{0.0, vec.basis().wavevector(m)};
  return out;
}

}
