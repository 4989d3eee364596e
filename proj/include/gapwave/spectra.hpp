#pragma once

// Dense Hermitian eigendecomposition with determinism and residual
// guarantees, band-structure sweeps of the periodic background with gap
// detection, spectral-window extraction, and pollution diagnostics.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "assembly.hpp"
#include "lattice.hpp"
#include "potentials.hpp"

namespace gapwave {

// Thrown when the fiber mode count cannot resolve the tracked bands.
class resolution_error : public std::runtime_error {
 public:
  explicit resolution_error(const std::string& what) : std::runtime_error(what) {}
};

struct EigenSolution {
  std::vector<double> eigenvalues;  // ascending
  Eigen::MatrixXcd eigenvectors;    // orthonormal columns, phase-fixed
  std::vector<double> residuals;    // per pair, ||Hv - lambda v||_2
};

namespace detail {

// Phase convention: the largest-magnitude component of each column is made
// real and positive (first such index on ties), so repeated runs and the
// real/complex paths produce identical output.
inline void fix_phases(Eigen::MatrixXcd& vecs) {
  for (Eigen::Index j = 0; j < vecs.cols(); ++j) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < vecs.rows(); ++i) {
      const double a = std::abs(vecs(i, j));
      if (a > best) {
        best = a;
        imax = i;
      }
    }
    const cplx z = vecs(imax, j);
    if (std::abs(z) > 0.0) vecs.col(j) *= std::conj(z) / std::abs(z);
  }
}

}  // namespace detail

// Full decomposition of a dense Hermitian matrix.  Input is rejected unless
// Hermitian to 1e-10 relative; output is deterministic for fixed input.
inline EigenSolution eigh(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols() || h.rows() == 0)
    throw std::invalid_argument("eigh: matrix must be square and non-empty");
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("eigh: input is not Hermitian");

  const Eigen::Index n = h.rows();
  EigenSolution sol;
  sol.eigenvectors.resize(n, n);

  double max_imag = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) max_imag = std::max(max_imag, std::abs(h(i, j).imag()));

  Eigen::VectorXd vals;
  if (max_imag <= 1e-12 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h.real());
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh: iteration did not converge");
    vals = es.eigenvalues();
    sol.eigenvectors = es.eigenvectors().cast<cplx>();
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigh: iteration did not converge");
    vals = es.eigenvalues();
    sol.eigenvectors = es.eigenvectors();
  }
  detail::fix_phases(sol.eigenvectors);

  sol.eigenvalues.assign(vals.data(), vals.data() + n);
  const double norm_est =
      std::max({std::abs(sol.eigenvalues.front()), std::abs(sol.eigenvalues.back()), 1.0});
  sol.residuals.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sol.residuals[j] = (h * sol.eigenvectors.col(j) - vals(j) * sol.eigenvectors.col(j)).norm();
    if (sol.residuals[j] > 1e-8 * norm_est)
      throw std::runtime_error("eigh: residual check failed at eigenpair " + std::to_string(j) +
                               " (" + std::to_string(sol.residuals[j]) + ")");
  }
  return sol;
}

inline EigenSolution eigh(const SupercellOperator& op) { return eigh(op.matrix); }
inline EigenSolution eigh(const BlochFiber& fiber) { return eigh(fiber.matrix); }

struct BandInterval {
  double lo = 0.0, hi = 0.0;
};

struct GapInterval {
  double alpha = 0.0, beta = 0.0;  // open interval (alpha, beta)
  double width() const { return beta - alpha; }
};

struct BandStructure {
  std::vector<double> qs;
  std::vector<std::vector<double>> energies;  // per q, lowest tracked bands
  std::vector<BandInterval> bands;
  std::vector<GapInterval> gaps;
  int mode_bound = 0;
  int tracked = 0;
};

namespace detail {

// Minimum of f over [a, b] by golden-section search on q, boundary minima
// included; returns the minimal sampled value.
template <class F>
double golden_min_value(const F& f, double a, double b, double qtol) {
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double best = std::min(f(a), f(b));
  double c = b - gr * (b - a), d = a + gr * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > qtol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - gr * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + gr * (b - a);
      fd = f(d);
    }
  }
  return std::min({best, fc, fd});
}

}  // namespace detail

// Sweeps the fibers of the periodic background over a uniform grid of the
// reduced zone, refines each tracked band's extrema by golden-section
// search, and lists the gaps between consecutive bands.  Gaps narrower than
// min_gap_width (band touchings up to rounding) are dropped.
inline BandStructure band_structure(const PeriodicPotential& vper, int unit_cell_modes,
                                    int q_count, int tracked = 8, double min_gap_width = 1e-6) {
  if (q_count < 16) throw std::invalid_argument("band_structure: need at least 16 q points");
  if (unit_cell_modes < 1) throw std::invalid_argument("band_structure: modes must be >= 1");
  if (tracked < 2) throw std::invalid_argument("band_structure: need at least 2 tracked bands");
  if (2 * unit_cell_modes + 1 < tracked)
    throw resolution_error("band_structure: fewer basis modes than tracked bands");

  const double edge = std::numbers::pi / vper.period;

  const auto band_at = [&](double q, int modes, int band) {
    return eigh(assemble_bloch(q, modes, vper)).eigenvalues[band];
  };

  // Resolution auto-check: every tracked band must be converged in the mode
  // count, probed by comparing against a basis enlarged by 8 modes.
  double drift = 0.0;
  for (double q : {-edge, -0.4 * edge, 0.0, 0.7 * edge, edge}) {
    const auto small = eigh(assemble_bloch(q, unit_cell_modes, vper));
    const auto big = eigh(assemble_bloch(q, unit_cell_modes + 8, vper));
    for (int b = 0; b < tracked; ++b)
      drift = std::max(drift, std::abs(small.eigenvalues[b] - big.eigenvalues[b]));
  }
  if (drift > 1e-8)
    throw resolution_error("band_structure: tracked bands drift " + std::to_string(drift) +
                           " under basis enlargement; increase the mode count");

  BandStructure out;
  out.mode_bound = unit_cell_modes;
  out.tracked = tracked;
  out.qs.resize(q_count);
  out.energies.resize(q_count);
  for (int i = 0; i < q_count; ++i) {
    const double q = -edge + 2.0 * edge * i / (q_count - 1);
    out.qs[i] = q;
    const auto sol = eigh(assemble_bloch(q, unit_cell_modes, vper));
    out.energies[i].assign(sol.eigenvalues.begin(), sol.eigenvalues.begin() + tracked);
  }

  const double qtol = 1e-6;
  out.bands.resize(tracked);
  for (int b = 0; b < tracked; ++b) {
    int imin = 0, imax = 0;
    for (int i = 1; i < q_count; ++i) {
      if (out.energies[i][b] < out.energies[imin][b]) imin = i;
      if (out.energies[i][b] > out.energies[imax][b]) imax = i;
    }
    const auto bracket = [&](int i) {
      const double a = out.qs[std::max(0, i - 1)];
      const double c = out.qs[std::min(q_count - 1, i + 1)];
      return std::pair<double, double>(a, c);
    };
    // The refinement is seeded with the grid extremizer's value so it can
    // only improve on the sweep; golden probes never hit the bracket centre
    // exactly, and an extremum attained on the grid must not be lost.
    const auto [alo, ahi] = bracket(imin);
    out.bands[b].lo = std::min(
        out.energies[imin][b],
        detail::golden_min_value([&](double q) { return band_at(q, unit_cell_modes, b); }, alo,
                                 ahi, qtol));
    const auto [blo, bhi] = bracket(imax);
    out.bands[b].hi = std::max(
        out.energies[imax][b],
        -detail::golden_min_value([&](double q) { return -band_at(q, unit_cell_modes, b); }, blo,
                                  bhi, qtol));
  }

  // Bands may overlap; a gap opens where the running upper envelope stays
  // below the next band's minimum.
  double envelope = out.bands[0].hi;
  for (int b = 1; b < tracked; ++b) {
    if (out.bands[b].lo - envelope > min_gap_width)
      out.gaps.push_back({envelope, out.bands[b].lo});
    envelope = std::max(envelope, out.bands[b].hi);
  }
  return out;
}

// Indices of all eigenvalues inside the open interval (lo, hi).
inline std::vector<int> window(const EigenSolution& sol, double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("window: need lo < hi");
  std::vector<int> idx;
  for (std::size_t i = 0; i < sol.eigenvalues.size(); ++i)
    if (sol.eigenvalues[i] > lo && sol.eigenvalues[i] < hi) idx.push_back(int(i));
  return idx;
}

struct Eigenpair {
  int index = -1;
  double value = 0.0;
  Eigen::VectorXcd vector;
};

// Pair with eigenvalue closest to target; ties break toward the smaller
// eigenvalue.  With a reference, the vector sign is chosen so the real part
// of the inner product with the reference is >= 0.
inline Eigenpair nearest_eigenpair(const EigenSolution& sol, double target,
                                   const Eigen::VectorXcd* reference = nullptr) {
  if (sol.eigenvalues.empty()) throw std::invalid_argument("nearest_eigenpair: empty spectrum");
  int best = 0;
  for (std::size_t i = 1; i < sol.eigenvalues.size(); ++i)
    if (std::abs(sol.eigenvalues[i] - target) < std::abs(sol.eigenvalues[best] - target))
      best = int(i);
  Eigenpair pair{best, sol.eigenvalues[best], sol.eigenvectors.col(best)};
  if (reference != nullptr) {
    if (reference->size() != pair.vector.size())
      throw std::invalid_argument("nearest_eigenpair: reference vector size mismatch");
    if ((reference->adjoint() * pair.vector).value().real() < 0.0) pair.vector = -pair.vector;
  }
  return pair;
}

// min over computed eigenvalues of |nu - mu| / (1 + |nu|).
inline double infsup_indicator(const EigenSolution& sol, double mu) {
  double best = std::numeric_limits<double>::infinity();
  for (double nu : sol.eigenvalues) best = std::min(best, std::abs(nu - mu) / (1.0 + std::abs(nu)));
  return best;
}

struct GapReport {
  GapInterval gap;
  double margin = 0.0;
  double defect_center = 0.0;
  double defect_tol = 0.0;
  std::vector<std::pair<int, double>> candidates;  // (index, eigenvalue), near the center
  std::vector<std::pair<int, double>> suspects;    // in the shrunk gap but far from it
};

// Classifies the eigenvalues inside the margin-shrunk gap around
// defect_center.  The gap containing the center is used; otherwise the
// nearest one.
inline GapReport pollution_report(const BandStructure& band, const EigenSolution& sol,
                                  double defect_center, double margin, double defect_tol = 0.1) {
  if (!(margin > 0.0)) throw std::invalid_argument("pollution_report: margin must be positive");
  if (band.gaps.empty()) throw std::domain_error("pollution_report: the band structure has no gap");
  const GapInterval* chosen = nullptr;
  double best_dist = std::numeric_limits<double>::infinity();
  for (const auto& g : band.gaps) {
    const double dist = (defect_center < g.alpha)  ? g.alpha - defect_center
                        : (defect_center > g.beta) ? defect_center - g.beta
                                                   : 0.0;
    if (dist < best_dist) {
      best_dist = dist;
      chosen = &g;
    }
  }

  if (!(chosen->alpha + margin < chosen->beta - margin))
    throw std::domain_error("pollution_report: margin leaves no gap interior");
  GapReport report{*chosen, margin, defect_center, defect_tol, {}, {}};
  for (int i : window(sol, chosen->alpha + margin, chosen->beta - margin)) {
    const double lam = sol.eigenvalues[i];
    if (std::abs(lam - defect_center) <= defect_tol)
      report.candidates.emplace_back(i, lam);
    else
      report.suspects.emplace_back(i, lam);
  }
  return report;
}

}  // namespace gapwave
