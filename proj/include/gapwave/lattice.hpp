#pragma once

// Supercell planewave bookkeeping: the 1D lattice, the mode set
// m = -Nmodes..Nmodes with wavevectors k(m) = (2*pi/period)*(m/L), the
// coefficient vector over that mode set, and the uniform sampling grid on the
// centered supercell [-period*L/2, period*L/2).

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace gapwave {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

class LatticeSpec {
public:
  explicit LatticeSpec(double period = two_pi, int dimension = 1)
      : period_(period) {
    if (dimension != 1) throw std::invalid_argument("lattice: only dimension 1 is supported");
    if (!(period > 0.0)) throw std::invalid_argument("lattice: period must be positive");
  }

  int dimension() const { return 1; }
  double period() const { return period_; }

  bool operator==(const LatticeSpec& o) const { return period_ == o.period_; }

private:
  double period_;
};

class PlanewaveBasis {
public:
  PlanewaveBasis(LatticeSpec lattice, int supercell_size, int mode_bound)
      : lattice_(lattice), size_(supercell_size), bound_(mode_bound) {
    if (supercell_size < 1) throw std::invalid_argument("basis: supercell size must be >= 1");
    if (mode_bound < 0) throw std::invalid_argument("basis: mode bound must be >= 0");
  }

  const LatticeSpec& lattice() const { return lattice_; }
  int supercell_size() const { return size_; }
  int mode_bound() const { return bound_; }
  int dim() const { return 2 * bound_ + 1; }

  // |Gamma_L| and the basis normalization |Gamma_L|^{-1/2}.
  double cell_length() const { return lattice_.period() * size_; }
  double norm_factor() const { return 1.0 / std::sqrt(cell_length()); }

  double wavevector(int m) const { return two_pi / lattice_.period() * (double(m) / size_); }

  // Storage index of mode m.
  int index_of(int m) const { return m + bound_; }
  int mode_at(int index) const { return index - bound_; }

  bool operator==(const PlanewaveBasis& o) const {
    return lattice_ == o.lattice_ && size_ == o.size_ && bound_ == o.bound_;
  }

private:
  LatticeSpec lattice_;
  int size_;
  int bound_;
};

inline std::vector<double> basis_kvalues(const PlanewaveBasis& basis) {
  std::vector<double> k(basis.dim());
  for (int m = -basis.mode_bound(); m <= basis.mode_bound(); ++m)
    k[basis.index_of(m)] = basis.wavevector(m);
  return k;
}

class FourierVector {
public:
  explicit FourierVector(PlanewaveBasis basis)
      : basis_(basis), coeffs_(basis.dim(), cplx{0.0, 0.0}) {}

  FourierVector(PlanewaveBasis basis, std::vector<cplx> coeffs)
      : basis_(basis), coeffs_(std::move(coeffs)) {
    if (int(coeffs_.size()) != basis_.dim())
      throw std::invalid_argument("fourier vector: coefficient count does not match basis dim");
  }

  const PlanewaveBasis& basis() const { return basis_; }
  int mode_bound() const { return basis_.mode_bound(); }

  cplx coeff(int m) const { return coeffs_[basis_.index_of(m)]; }
  cplx& coeff(int m) { return coeffs_[basis_.index_of(m)]; }

  const std::vector<cplx>& data() const { return coeffs_; }
  std::vector<cplx>& data() { return coeffs_; }

  // Real-valued fields satisfy coeff(-m) = conj(coeff(m)).
  bool hermitian_symmetric(double rel_tol = 1e-12) const {
    double scale = 0.0, worst = 0.0;
    for (const auto& c : coeffs_) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return true;
    for (int m = 0; m <= basis_.mode_bound(); ++m)
      worst = std::max(worst, std::abs(coeff(-m) - std::conj(coeff(m))));
    return worst <= rel_tol * scale;
  }

private:
  PlanewaveBasis basis_;
  std::vector<cplx> coeffs_;
};

// Coefficient inner product; equals the L2_per inner product because the
// basis {e_{L,k}} is orthonormal.
inline cplx l2_inner(const FourierVector& u, const FourierVector& v) {
  if (!(u.basis() == v.basis()))
    throw std::invalid_argument("l2_inner: mismatched bases");
  cplx acc{0.0, 0.0};
  for (int i = 0; i < u.basis().dim(); ++i) acc += std::conj(u.data()[i]) * v.data()[i];
  return acc;
}

class SamplingGrid {
public:
  SamplingGrid(LatticeSpec lattice, int supercell_size, int point_count)
      : lattice_(lattice), size_(supercell_size), count_(point_count) {
    if (supercell_size < 1) throw std::invalid_argument("grid: supercell size must be >= 1");
    if (point_count < 1) throw std::invalid_argument("grid: point count must be >= 1");
  }

  const LatticeSpec& lattice() const { return lattice_; }
  int supercell_size() const { return size_; }
  int count() const { return count_; }

  double length() const { return lattice_.period() * size_; }
  double spacing() const { return length() / count_; }
  double node(int j) const { return -0.5 * length() + j * spacing(); }

  bool operator==(const SamplingGrid& o) const {
    return lattice_ == o.lattice_ && size_ == o.size_ && count_ == o.count_;
  }

private:
  LatticeSpec lattice_;
  int size_;
  int count_;
};

template <class T>
struct BasicGridField {
  SamplingGrid grid;
  std::vector<T> values;

  BasicGridField(SamplingGrid g, std::vector<T> v) : grid(g), values(std::move(v)) {
    if (int(values.size()) != grid.count())
      throw std::invalid_argument("grid field: value count does not match grid");
  }
};

using GridField = BasicGridField<cplx>;
using RealGridField = BasicGridField<double>;

}
