#include <catch2/catch_amalgamated.hpp>

#include <gapwave/assembly.hpp>
#include <gapwave/potentials.hpp>
#include <gapwave/spectra.hpp>

#include "support/eigen_oracle.hpp"
#include "support/oracles.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

using namespace gapwave;
using Catch::Approx;

namespace {

Eigen::MatrixXcd random_hermitian(int n, unsigned seed, bool complex_entries) {
  auto rng = oracle::seeded_rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Eigen::MatrixXcd h(n, n);
  for (int i = 0; i < n; ++i) {
    h(i, i) = u(rng);
    for (int j = i + 1; j < n; ++j) {
      const cplx z(u(rng), complex_entries ? u(rng) : 0.0);
      h(i, j) = z;
      h(j, i) = std::conj(z);
    }
  }
  return h;
}

Eigen::MatrixXcd diag_matrix(std::initializer_list<double> values) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(values.size(), values.size());
  int i = 0;
  for (double v : values) h(i, i) = v, ++i;
  return h;
}

const BandStructure& sin_bands() {
  static const BandStructure bands = band_structure(abs_sin_potential(), 32, 65);
  return bands;
}

}  // namespace

TEST_CASE("bisection oracle solves a known diagonal problem") {
  std::vector<double> a = {3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0};
  const auto evs = oracle::symmetric_eigenvalues_bisect(a, 3);
  REQUIRE(evs[0] == Approx(1.0).epsilon(0).margin(1e-10));
  REQUIRE(evs[1] == Approx(2.0).epsilon(0).margin(1e-10));
  REQUIRE(evs[2] == Approx(3.0).epsilon(0).margin(1e-10));
}

TEST_CASE("eigh on a diagonal matrix returns sorted values and unit vectors") {
  const auto sol = eigh(diag_matrix({3.0, 1.0, 2.0}));
  REQUIRE(sol.eigenvalues == std::vector<double>{1.0, 2.0, 3.0});
  // Coordinate vectors with the phase convention: entry exactly 1 at the
  // source row.
  REQUIRE(std::abs(sol.eigenvectors(1, 0) - cplx(1.0, 0.0)) < 1e-14);
  REQUIRE(std::abs(sol.eigenvectors(2, 1) - cplx(1.0, 0.0)) < 1e-14);
  REQUIRE(std::abs(sol.eigenvectors(0, 2) - cplx(1.0, 0.0)) < 1e-14);
}

TEST_CASE("eigh on the 2x2 exchange matrix") {
  Eigen::MatrixXcd h(2, 2);
  h << 0.0, 1.0, 1.0, 0.0;
  const auto sol = eigh(h);
  REQUIRE(sol.eigenvalues[0] == Approx(-1.0).epsilon(0).margin(1e-14));
  REQUIRE(sol.eigenvalues[1] == Approx(1.0).epsilon(0).margin(1e-14));
  const double r = 1.0 / std::sqrt(2.0);
  REQUIRE(std::abs(sol.eigenvectors(0, 0) - cplx(r, 0.0)) < 1e-14);
  REQUIRE(std::abs(sol.eigenvectors(1, 0) - cplx(-r, 0.0)) < 1e-14);
  REQUIRE(std::abs(sol.eigenvectors(0, 1) - cplx(r, 0.0)) < 1e-14);
  REQUIRE(std::abs(sol.eigenvectors(1, 1) - cplx(r, 0.0)) < 1e-14);
}

TEST_CASE("eigh matches Sturm bisection on random 50x50 matrices") {
  const int n = 50;

  const auto real_h = random_hermitian(n, 71, false);
  const auto sol_r = eigh(real_h);
  std::vector<double> flat(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) flat[std::size_t(i) * n + j] = real_h(i, j).real();
  const auto oracle_r = oracle::symmetric_eigenvalues_bisect(flat, n);
  for (int i = 0; i < n; ++i) REQUIRE(sol_r.eigenvalues[i] == Approx(oracle_r[i]).epsilon(0).margin(1e-9));

  const auto cplx_h = random_hermitian(n, 72, true);
  const auto sol_c = eigh(cplx_h);
  std::vector<cplx> hflat(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) hflat[std::size_t(i) * n + j] = cplx_h(i, j);
  const auto oracle_c = oracle::hermitian_eigenvalues_bisect(hflat, n);
  for (int i = 0; i < n; ++i) REQUIRE(sol_c.eigenvalues[i] == Approx(oracle_c[i]).epsilon(0).margin(1e-9));
}

TEST_CASE("eigh output satisfies orthonormality, residual, and order invariants") {
  const auto h = random_hermitian(40, 1234, true);
  const auto sol = eigh(h);

  REQUIRE(std::is_sorted(sol.eigenvalues.begin(), sol.eigenvalues.end()));
  const Eigen::MatrixXcd gram = sol.eigenvectors.adjoint() * sol.eigenvectors;
  REQUIRE((gram - Eigen::MatrixXcd::Identity(40, 40)).cwiseAbs().maxCoeff() < 1e-8);
  const double scale = std::max(
      {std::abs(sol.eigenvalues.front()), std::abs(sol.eigenvalues.back()), 1.0});
  for (double r : sol.residuals) REQUIRE(r <= 1e-8 * scale);
}

TEST_CASE("eigh rejects non-Hermitian and degenerate input") {
  Eigen::MatrixXcd h(2, 2);
  h << 1.0, 0.5, cplx(0.5 + 1e-3, 0.0), 2.0;
  REQUIRE_THROWS_AS(eigh(h), std::invalid_argument);

  // Asymmetry below the tolerance is accepted.
  h(1, 0) = 0.5 + 1e-13;
  REQUIRE_NOTHROW(eigh(h));

  REQUIRE_THROWS_AS(eigh(Eigen::MatrixXcd(0, 0)), std::invalid_argument);
}

TEST_CASE("eigh is deterministic for a fixed input") {
  const auto h = random_hermitian(30, 99, true);
  const auto a = eigh(h);
  const auto b = eigh(h);
  REQUIRE(a.eigenvalues == b.eigenvalues);
  REQUIRE((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("eigenvalues move by at most the perturbation norm") {
  const auto h = random_hermitian(25, 7, true);
  const Eigen::MatrixXcd e = 1e-3 * random_hermitian(25, 8, true);
  const auto base = eigh(h);
  const auto moved = eigh(h + e);
  const auto esol = eigh(e);
  const double enorm =
      std::max(std::abs(esol.eigenvalues.front()), std::abs(esol.eigenvalues.back()));
  for (int i = 0; i < 25; ++i)
    REQUIRE(std::abs(moved.eigenvalues[i] - base.eigenvalues[i]) <= enorm * (1.0 + 1e-10) + 1e-15);
}

TEST_CASE("window counts are invariant under permutation conjugation") {
  const int n = 20;
  const auto h = random_hermitian(n, 2024, true);

  auto rng = oracle::seeded_rng(55);
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) p(perm[i], i) = 1.0;
  const Eigen::MatrixXcd conj = p.adjoint() * h * p;

  const auto a = eigh(h);
  const auto b = eigh(conj);
  for (auto [lo, hi] : {std::pair{-2.0, 0.0}, {-0.5, 0.5}, {0.0, 3.0}, {-10.0, 10.0}})
    REQUIRE(window(a, lo, hi).size() == window(b, lo, hi).size());
}

TEST_CASE("window returns all and only the eigenvalues strictly inside") {
  const auto sol = eigh(diag_matrix({0.0, 1.0, 2.0, 3.0}));
  REQUIRE(window(sol, 5.0, 6.0).empty());
  REQUIRE(window(sol, -1.0, 4.0).size() == 4);
  // Open interval: boundary values excluded.
  REQUIRE(window(sol, 1.0, 3.0) == std::vector<int>{2});
  REQUIRE_THROWS_AS(window(sol, 2.0, 2.0), std::invalid_argument);
}

TEST_CASE("background band structure locates the first gap") {
  const auto& bands = sin_bands();
  REQUIRE(bands.gaps.size() >= 1);
  // The two lowest folded bands touch, so the first reported gap is the one
  // between bands 2 and 3.
  REQUIRE(bands.gaps[0].alpha == Approx(1.416294).epsilon(0).margin(1e-4));
  REQUIRE(bands.gaps[0].beta == Approx(1.845100).epsilon(0).margin(1e-4));
  REQUIRE(bands.bands[0].hi == Approx(bands.bands[1].lo).epsilon(0).margin(1e-6));
  for (const auto& g : bands.gaps) REQUIRE(g.width() > 0.0);
}

TEST_CASE("free background has no gaps") {
  const auto bands = band_structure(zero_periodic(), 16, 17);
  REQUIRE(bands.gaps.empty());
  for (int b = 0; b + 1 < bands.tracked; ++b)
    REQUIRE(bands.bands[b + 1].lo <= bands.bands[b].hi + 1e-6);
}

TEST_CASE("gap edges are stable under q-grid doubling") {
  const auto coarse = band_structure(abs_sin_potential(), 32, 33);
  const auto fine = sin_bands();
  REQUIRE(std::abs(coarse.gaps[0].alpha - fine.gaps[0].alpha) < 1e-4);
  REQUIRE(std::abs(coarse.gaps[0].beta - fine.gaps[0].beta) < 1e-4);
}

TEST_CASE("scaling the background to near zero closes every gap") {
  const auto bands = band_structure(scaled(abs_sin_potential(), 1e-3), 16, 33);
  for (const auto& g : bands.gaps) REQUIRE(g.width() < 1e-3);
}

TEST_CASE("band structure validates input and flags poor resolution") {
  REQUIRE_THROWS_AS(band_structure(abs_sin_potential(), 32, 8), std::invalid_argument);
  REQUIRE_THROWS_AS(band_structure(abs_sin_potential(), 0, 33), std::invalid_argument);
  // 4 modes cannot resolve 8 bands.
  REQUIRE_THROWS_AS(band_structure(abs_sin_potential(), 4, 33), resolution_error);
}

TEST_CASE("supercell window around the defect level holds exactly one eigenvalue") {
  const auto op = assemble_exact(10, 100, abs_sin_potential(), neg_exp_defect());
  const auto sol = eigh(op);
  const auto idx = window(sol, 1.59, 1.79);
  REQUIRE(idx.size() == 1);
  REQUIRE(sol.eigenvalues[idx[0]] == Approx(1.68597907).epsilon(0).margin(1e-4));
}

TEST_CASE("nearest eigenpair: proximity, tie-break, and sign alignment") {
  const auto sol = eigh(diag_matrix({1.0, 2.0, 3.0}));
  REQUIRE(nearest_eigenpair(sol, 2.4).value == 2.0);
  REQUIRE(nearest_eigenpair(sol, 100.0).value == 3.0);
  // Equidistant: the smaller eigenvalue wins.
  REQUIRE(nearest_eigenpair(sol, 1.5).value == 1.0);

  Eigen::MatrixXcd h(2, 2);
  h << 0.0, 1.0, 1.0, 0.0;
  const auto xsol = eigh(h);
  const Eigen::VectorXcd ref = -xsol.eigenvectors.col(0);
  const auto aligned = nearest_eigenpair(xsol, -1.0, &ref);
  REQUIRE((ref.adjoint() * aligned.vector).value().real() > 0.0);

  // Flipping the stored column does not change the aligned output.
  EigenSolution flipped = xsol;
  flipped.eigenvectors.col(0) *= -1.0;
  const auto aligned2 = nearest_eigenpair(flipped, -1.0, &ref);
  REQUIRE((aligned.vector - aligned2.vector).cwiseAbs().maxCoeff() == 0.0);

  Eigen::VectorXcd bad = Eigen::VectorXcd::Zero(5);
  REQUIRE_THROWS_AS(nearest_eigenpair(xsol, 0.0, &bad), std::invalid_argument);
}

TEST_CASE("inf-sup indicator follows the scaled-distance formula") {
  REQUIRE(infsup_indicator(eigh(diag_matrix({0.0})), 1.0) == Approx(1.0));
  REQUIRE(infsup_indicator(eigh(diag_matrix({1.0, 3.0})), 2.0) == Approx(0.25));
  REQUIRE(infsup_indicator(eigh(diag_matrix({1.0, 3.0})), 3.0) == 0.0);
}

TEST_CASE("pollution report: clean defect-free gap, defect candidate, planted suspect") {
  const auto& bands = sin_bands();

  // Without a defect the folded bands leave the gap interior empty.
  const auto clean = eigh(assemble_exact(6, 60, abs_sin_potential(), zero_defect()));
  const auto clean_report = pollution_report(bands, clean, 1.69, 0.05);
  REQUIRE(clean_report.candidates.empty());
  REQUIRE(clean_report.suspects.empty());

  // With the defect the single mid-gap eigenvalue classifies as a candidate.
  const auto defect = eigh(assemble_exact(6, 60, abs_sin_potential(), neg_exp_defect()));
  const auto defect_report = pollution_report(bands, defect, 1.69, 0.05);
  REQUIRE(defect_report.candidates.size() == 1);
  REQUIRE(defect_report.suspects.empty());
  REQUIRE(defect_report.candidates[0].second == Approx(1.6774856).epsilon(0).margin(1e-4));
  REQUIRE(defect_report.gap.alpha == Approx(1.416294).epsilon(0).margin(1e-4));

  // A planted mid-gap value far from the defect level is flagged.
  const auto planted = eigh(diag_matrix({0.5, 1.63, 3.0}));
  const auto planted_report = pollution_report(bands, planted, 1.69, 0.04, 0.01);
  REQUIRE(planted_report.candidates.empty());
  REQUIRE(planted_report.suspects.size() == 1);
  REQUIRE(planted_report.suspects[0].second == 1.63);

  REQUIRE_THROWS_AS(pollution_report(bands, planted, 1.69, -1.0), std::invalid_argument);
  const auto gapless = band_structure(zero_periodic(), 16, 17);
  REQUIRE_THROWS_AS(pollution_report(gapless, planted, 1.69, 0.05), std::domain_error);
}
