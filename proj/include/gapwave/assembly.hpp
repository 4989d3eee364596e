#pragma once

// Dense assembly of the supercell operator in the planewave basis, by exact
// integration or by trigonometric interpolation of the potential samples,
// and of the Bloch fibers of the unperturbed periodic operator.
//
// With e_{L,k} = |Gamma_L|^{-1/2} e^{ikx} and row m, column m' meaning
// <e_{L,k(m)}, A e_{L,k(m')}>:
//   exact:        entry(m,m') = k(m)^2 d_{mm'} + P(m-m')
//                               + |Gamma_L|^{-1/2} What_L(k(m')-k(m))
//                 with P(n) = c(n/L) when L | n, else 0
//   interpolated: entry(m,m') = k(m)^2 d_{mm'} + b(m-m')
//                 with b the folded grid transform of the samples of
//                 V_per + xi_L W on the M-point supercell grid
// The mass matrix is the identity in this basis.

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "fourier.hpp"
#include "lattice.hpp"
#include "potentials.hpp"

namespace gapwave {

enum class IntegrationMode { exact, interpolated };

struct SupercellOperator {
  PlanewaveBasis basis;
  Eigen::MatrixXcd matrix;
  IntegrationMode mode = IntegrationMode::exact;
  int sample_count = 0;  // M, interpolated mode only
  bool real_symmetric = false;
  std::vector<std::string> warnings;
};

namespace detail {

// Mirrors the strict upper triangle onto the lower and keeps the diagonal
// real, so Hermiticity holds exactly even when coefficient evaluators carry
// quadrature rounding.
inline void hermitize(Eigen::MatrixXcd& h) {
  const Eigen::Index n = h.rows();
  for (Eigen::Index i = 0; i < n; ++i) {
    h(i, i) = cplx(h(i, i).real(), 0.0);
    for (Eigen::Index j = i + 1; j < n; ++j) h(j, i) = std::conj(h(i, j));
  }
}

inline bool entries_real(const Eigen::MatrixXcd& h) {
  const double scale = h.cwiseAbs().maxCoeff();
  double imag = 0.0;
  for (Eigen::Index i = 0; i < h.rows(); ++i)
    for (Eigen::Index j = 0; j < h.cols(); ++j) imag = std::max(imag, std::abs(h(i, j).imag()));
  return imag <= 1e-12 * std::max(scale, 1.0);
}

}  // namespace detail

inline SupercellOperator assemble_exact(int supercell, int mode_bound,
                                        const PeriodicPotential& vper,
                                        const DefectPotential& defect) {
  if (mode_bound < 1) throw std::invalid_argument("assemble_exact: mode bound must be >= 1");
  if (vper.period != defect.period)
    throw std::invalid_argument("assemble_exact: potential periods disagree");
  const PlanewaveBasis basis(LatticeSpec(vper.period), supercell, mode_bound);
  const int n = basis.dim();
  const double nf = basis.norm_factor();

  SupercellOperator op{basis, Eigen::MatrixXcd::Zero(n, n), IntegrationMode::exact, 0, false, {}};
  for (int m = -mode_bound; m <= mode_bound; ++m) {
    const int i = basis.index_of(m);
    for (int mp = m; mp <= mode_bound; ++mp) {
      const int j = basis.index_of(mp);
      cplx entry = 0.0;
      if (m == mp) entry += basis.wavevector(m) * basis.wavevector(m);
      const int diff = m - mp;
      if (diff % supercell == 0) entry += vper.unit_coeff(diff / supercell);
      entry += nf * defect.periodized_coeff(supercell, basis.wavevector(mp) - basis.wavevector(m));
      op.matrix(i, j) = entry;
    }
  }
  detail::hermitize(op.matrix);
  op.real_symmetric = detail::entries_real(op.matrix);
  return op;
}

inline SupercellOperator assemble_interpolated(int supercell, int mode_bound, int samples,
                                               const PeriodicPotential& vper,
                                               const DefectPotential& defect) {
  if (mode_bound < 1) throw std::invalid_argument("assemble_interpolated: mode bound must be >= 1");
  if (samples <= 0) throw std::invalid_argument("assemble_interpolated: sample count must be >= 1");
  if (vper.period != defect.period)
    throw std::invalid_argument("assemble_interpolated: potential periods disagree");
  const PlanewaveBasis basis(LatticeSpec(vper.period), supercell, mode_bound);
  const SamplingGrid grid(basis.lattice(), supercell, samples);

  RealGridField field = tilde_w_samples(defect, grid);
  for (int j = 0; j < grid.count(); ++j) field.values[j] += vper.value(grid.node(j));
  const DftCoefficients b = analyze(field);

  const int n = basis.dim();
  SupercellOperator op{basis,
                       Eigen::MatrixXcd::Zero(n, n),
                       IntegrationMode::interpolated,
                       samples,
                       false,
                       {}};
  if (samples < 4 * mode_bound + 1)
    op.warnings.push_back("sample count " + std::to_string(samples) +
                          " is below the product-rule threshold 4*modes+1 = " +
                          std::to_string(4 * mode_bound + 1));

  for (int m = -mode_bound; m <= mode_bound; ++m) {
    const int i = basis.index_of(m);
    for (int mp = m; mp <= mode_bound; ++mp) {
      const int j = basis.index_of(mp);
      cplx entry = b.at(m - mp);
      if (m == mp) entry += basis.wavevector(m) * basis.wavevector(m);
      op.matrix(i, j) = entry;
    }
  }
  detail::hermitize(op.matrix);
  op.real_symmetric = detail::entries_real(op.matrix);
  return op;
}

struct BlochFiber {
  double q = 0.0;  // reduced wavevector, |q| <= pi / period
  int mode_bound = 0;
  double period = two_pi;
  Eigen::MatrixXcd matrix;
  bool real_symmetric = false;
};

// Fiber of the unperturbed operator at reduced wavevector q:
// entry(m,m') = (k(m)+q)^2 d_{mm'} + c(m-m') on unit-cell modes k(m) = (2pi/l)m.
inline BlochFiber assemble_bloch(double q, int mode_bound, const PeriodicPotential& vper) {
  if (mode_bound < 1) throw std::invalid_argument("assemble_bloch: mode bound must be >= 1");
  const double edge = std::numbers::pi / vper.period;
  if (std::abs(q) > edge * (1.0 + 1e-12))
    throw std::domain_error("assemble_bloch: wavevector outside the reduced zone");

  const int n = 2 * mode_bound + 1;
  BlochFiber fiber{q, mode_bound, vper.period, Eigen::MatrixXcd::Zero(n, n), false};
  for (int m = -mode_bound; m <= mode_bound; ++m) {
    const int i = m + mode_bound;
    for (int mp = m; mp <= mode_bound; ++mp) {
      const int j = mp + mode_bound;
      cplx entry = vper.unit_coeff(m - mp);
      if (m == mp) {
        const double shifted = two_pi / vper.period * m + q;
        entry += shifted * shifted;
      }
      fiber.matrix(i, j) = entry;
    }
  }
  detail::hermitize(fiber.matrix);
  fiber.real_symmetric = detail::entries_real(fiber.matrix);
  return fiber;
}

}  // namespace gapwave
