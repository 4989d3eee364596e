#pragma once
// Convergence-study orchestration.  Gap eigenvectors from supercells of
// increasing size are cut off and extended to the real line, compared against
// a large reference supercell in discrete L2/H1 norms, and the decay of the
// errors is fitted on a log scale.  A second study compares interpolated
// against exact assembly at fixed supercell size.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "assembly.hpp"
#include "fourier.hpp"
#include "lattice.hpp"
#include "potentials.hpp"
#include "spectra.hpp"

namespace gapwave {

struct StudyConfig {
  PeriodicPotential background = abs_sin_potential();
  DefectPotential defect = neg_exp_defect();
  std::vector<int> sizes = {6, 8, 10, 12, 14, 16, 18};  // supercell sizes L
  std::vector<int> mode_multipliers = {2, 4, 6, 8, 10, 12, 14};   // N_L = N * L
  std::vector<int> sample_multipliers = {56, 112, 224, 448};      // M_L = M * L
  int reference_size = 20;   // L_ref, must be >= every entry of sizes
  int reference_modes = 400; // total modes per side of the reference run
  // Optional gap override; used when gap_lo < gap_hi, otherwise the first
  // gap of the background band structure is taken.
  double gap_lo = 0.0;
  double gap_hi = 0.0;
  double grid_h = two_pi / 128.0;  // error-grid spacing target
  std::string output_dir = ".";
};

// One eigenvector extended to the real line: samples of phi = chi * u and of
// phi' = chi' u + chi u' on a uniform grid covering the reference support.
// samples == 0 marks exact-integration provenance.
struct ExtendedEigenfunction {
  int size = 0;     // supercell size L of the source
  int modes = 0;    // total modes per side N_L of the source
  int samples = 0;  // M_L of the source assembly, 0 for exact integration
  double left = 0.0;
  double h = 0.0;
  std::vector<cplx> phi;
  std::vector<cplx> dphi;

  bool same_grid(const ExtendedEigenfunction& o) const {
    return phi.size() == o.phi.size() && left == o.left && h == o.h;
  }
};

// One study point.  samples == 0 marks exact integration ("Exact" in the
// serialized form).  A record with gap_state_found == false kept its slot but
// carries no eigenvalue or errors: the solve produced nothing inside the gap
// window.
struct ConvergenceRecord {
  int size = 0;     // L
  int modes = 0;    // N_L
  int samples = 0;  // M_L, 0 for exact integration
  double lambda = 0.0;
  double abs_err_lambda = 0.0;
  double rel_err_lambda = 0.0;
  double err_l2 = 0.0;
  double err_h1 = 0.0;
  double wall_seconds = 0.0;
  bool gap_state_found = true;
};

struct LineError {
  double l2 = 0.0;
  double h1 = 0.0;
};

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

namespace detail {

// Runs body(0..count-1) on a bounded worker pool.  Each job writes only its
// own output slot, so the result is schedule-independent.  The first thrown
// exception is rethrown after all workers have drained.
template <class F>
inline void run_jobs(std::size_t count, F&& body) {
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t workers = std::min<std::size_t>(hw, count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(err_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

inline void validate_config(const StudyConfig& cfg, bool need_samples) {
  if (cfg.sizes.empty()) throw std::invalid_argument("study: size list is empty");
  for (int L : cfg.sizes)
    if (L < 1) throw std::invalid_argument("study: supercell sizes must be positive");
  for (int n : cfg.mode_multipliers)
    if (n < 1) throw std::invalid_argument("study: mode multipliers must be positive");
  for (int m : cfg.sample_multipliers)
    if (m < 1) throw std::invalid_argument("study: sample multipliers must be positive");
  if (need_samples && cfg.sample_multipliers.empty())
    throw std::invalid_argument("study: sample multiplier list is empty");
  if (need_samples && cfg.mode_multipliers.empty())
    throw std::invalid_argument("study: mode multiplier list is empty");
  if (cfg.reference_size < *std::max_element(cfg.sizes.begin(), cfg.sizes.end()))
    throw std::invalid_argument("study: reference size must be >= every study size");
  if (cfg.reference_modes < cfg.reference_size)
    throw std::invalid_argument("study: reference mode count must be >= the reference size");
  if (!(cfg.grid_h > 0.0)) throw std::invalid_argument("study: grid spacing must be positive");
  if (cfg.background.period != cfg.defect.period)
    throw std::invalid_argument("study: background and defect periods differ");
}

// Eigenvalues inside the margin-shrunk gap, as (index, value) of the one
// nearest to target.  Returns false when the window is empty.
inline bool pick_gap_state(const EigenSolution& sol, const GapInterval& gap, double margin,
                           double target, int& index_out) {
  const auto idx = window(sol, gap.alpha + margin, gap.beta - margin);
  if (idx.empty()) return false;
  int best = idx.front();
  for (int i : idx)
    if (std::abs(sol.eigenvalues[i] - target) < std::abs(sol.eigenvalues[best] - target)) best = i;
  index_out = best;
  return true;
}

}  // namespace detail

// The gap the study works in: the configured window when set, otherwise the
// first gap of the background band structure.
inline GapInterval resolve_gap(const StudyConfig& cfg) {
  if (cfg.gap_lo < cfg.gap_hi) return {cfg.gap_lo, cfg.gap_hi};
  const auto bands = band_structure(cfg.background, 32, 65);
  if (bands.gaps.empty()) throw std::domain_error("study: background has no spectral gap");
  return bands.gaps.front();
}

// Extends a supercell eigenvector to the real line: phi = chi * u with the
// product rule for phi', sampled on the uniform grid covering the reference
// support.  The Fourier sum itself is the periodic extension of u, so no
// wrapping is needed; outside the cutoff support the samples are exact zeros.
inline ExtendedEigenfunction extend(const FourierVector& u, int reference_size, double grid_h,
                                    int sample_count = 0) {
  const auto& basis = u.basis();
  if (reference_size < basis.supercell_size())
    throw std::invalid_argument("extend: reference support does not cover the source support");
  if (!(grid_h > 0.0)) throw std::invalid_argument("extend: grid spacing must be positive");

  const CutoffChi chi(basis.lattice(), basis.supercell_size());
  const double reach = CutoffChi(basis.lattice(), reference_size).support_edge();
  const auto n = static_cast<std::size_t>(std::llround(2.0 * reach / grid_h)) + 1;
  if (n < 2) throw std::invalid_argument("extend: grid spacing exceeds the reference support");

  ExtendedEigenfunction out;
  out.size = basis.supercell_size();
  out.modes = basis.mode_bound();
  out.samples = sample_count;
  out.left = -reach;
  out.h = 2.0 * reach / static_cast<double>(n - 1);
  out.phi.assign(n, cplx(0.0, 0.0));
  out.dphi.assign(n, cplx(0.0, 0.0));
  const double support = chi.support_edge();
  for (std::size_t j = 0; j < n; ++j) {
    const double x = out.left + out.h * static_cast<double>(j);
    if (std::abs(x) >= support) continue;
    const cplx ux = eval_at(u, x);
    out.phi[j] = chi.value(x) * ux;
    out.dphi[j] = chi.deriv(x) * ux + chi.value(x) * eval_deriv_at(u, x);
  }
  return out;
}

// Composite-trapezoid L2 and H1 distances between two extensions on the same
// grid.  h1 >= l2 by construction.
inline LineError line_error(const ExtendedEigenfunction& a, const ExtendedEigenfunction& b) {
  if (!a.same_grid(b)) throw std::invalid_argument("line_error: extensions live on different grids");
  double s0 = 0.0;
  double s1 = 0.0;
  const std::size_t n = a.phi.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    s0 += w * std::norm(a.phi[j] - b.phi[j]);
    s1 += w * std::norm(a.dphi[j] - b.dphi[j]);
  }
  s0 *= a.h;
  s1 *= a.h;
  return {std::sqrt(s0), std::sqrt(s0 + s1)};
}

// Rotates f by the unit phase that makes <ref, f> real positive, so that
// "f - ref" measures the eigenfunction distance rather than a phase gauge.
// No-op when the overlap vanishes.
inline void align_phase(const ExtendedEigenfunction& ref, ExtendedEigenfunction& f) {
  if (!ref.same_grid(f)) throw std::invalid_argument("align_phase: extensions live on different grids");
  cplx overlap(0.0, 0.0);
  for (std::size_t j = 0; j < ref.phi.size(); ++j) overlap += std::conj(ref.phi[j]) * f.phi[j];
  const double mag = std::abs(overlap);
  if (mag == 0.0) return;
  const cplx rot = std::conj(overlap) / mag;
  for (auto& v : f.phi) v *= rot;
  for (auto& v : f.dphi) v *= rot;
}

// Least-squares line through (xs, ys_log10).  r2 is 1 for constant data.
inline RateFit fit_rate(const std::vector<double>& xs, const std::vector<double>& ys_log10) {
  if (xs.size() != ys_log10.size()) throw std::invalid_argument("fit_rate: length mismatch");
  if (xs.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw std::invalid_argument("fit_rate: abscissae must be strictly increasing");
  const double n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys_log10[i];
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys_log10[i] - my);
    syy += (ys_log10[i] - my) * (ys_log10[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r2 = 1.0;
  } else {
    const double ss_res = syy - sxy * sxy / sxx;
    fit.r2 = 1.0 - ss_res / syy;
  }
  return fit;
}

struct SizeStudyResult {
  GapInterval gap{};
  double lambda_ref = 0.0;
  ConvergenceRecord reference{};
  std::vector<ConvergenceRecord> records;  // sorted by L
  // Per record, the eigenvalues within half a gap width of the gap, for the
  // spectrum-versus-size picture.
  std::vector<std::vector<double>> near_gap_spectra;
};

struct QuadratureStudyResult {
  GapInterval gap{};
  std::vector<ConvergenceRecord> records;  // sorted by (L, N_L, M_L), exact first
};

namespace detail {

// Fraction of the gap width clipped from each edge before selecting
// eigenvalues, keeping band states that creep marginally past the computed
// edges out of the defect window.
inline constexpr double gap_margin_fraction = 0.05;

// One trapezoid-consistency check per study: halving the grid spacing must
// move the reported errors by less than 1e-6 relative.  rebuild(h) returns
// the (candidate, reference) pair extended at spacing h.
template <class Rebuild>
inline void verify_halving(const Rebuild& rebuild, const LineError& at_h, double h) {
  const auto [cand, ref] = rebuild(0.5 * h);
  const LineError fine = line_error(cand, ref);
  const double dl2 = std::abs(fine.l2 - at_h.l2) / std::max(at_h.l2, 1e-12);
  const double dh1 = std::abs(fine.h1 - at_h.h1) / std::max(at_h.h1, 1e-12);
  if (dl2 >= 1e-6 || dh1 >= 1e-6)
    throw resolution_error("line_error: halving the grid spacing moved the result by " +
                           std::to_string(std::max(dl2, dh1)) + " relative; refine grid_h");
}

}  // namespace detail

// Supercell-size study: solves the reference problem at (L_ref, N_ref), then
// for each L the gap eigenpair nearest the reference eigenvalue at the
// reference per-cell resolution, and records eigenvalue and extension errors.
// A size with no eigenvalue in the shrunk gap keeps a flagged record.
inline SizeStudyResult run_size_study(const StudyConfig& cfg) {
  detail::validate_config(cfg, false);
  SizeStudyResult out;
  out.gap = resolve_gap(cfg);
  const double margin = detail::gap_margin_fraction * out.gap.width();
  const int per_cell =
      static_cast<int>(std::llround(static_cast<double>(cfg.reference_modes) / cfg.reference_size));

  const auto t_ref0 = std::chrono::steady_clock::now();
  const auto op_ref = assemble_exact(cfg.reference_size, cfg.reference_modes, cfg.background,
                                     cfg.defect);
  const auto sol_ref = eigh(op_ref);
  int ref_index = 0;
  if (!detail::pick_gap_state(sol_ref, out.gap, margin,
                              0.5 * (out.gap.alpha + out.gap.beta), ref_index))
    throw resolution_error("size study: the reference run has no eigenvalue in the gap window");
  out.lambda_ref = sol_ref.eigenvalues[ref_index];
  std::vector<cplx> ref_coeffs(sol_ref.eigenvectors.col(ref_index).data(),
                               sol_ref.eigenvectors.col(ref_index).data() + op_ref.basis.dim());
  const FourierVector u_ref(op_ref.basis, ref_coeffs);
  const auto phi_ref = extend(u_ref, cfg.reference_size, cfg.grid_h);
  const auto t_ref1 = std::chrono::steady_clock::now();
  out.reference = {cfg.reference_size, cfg.reference_modes, 0, out.lambda_ref, 0.0, 0.0,
                   0.0,                0.0,                 std::chrono::duration<double>(t_ref1 - t_ref0).count(),
                   true};

  std::vector<int> sizes = cfg.sizes;
  std::sort(sizes.begin(), sizes.end());
  out.records.resize(sizes.size());
  out.near_gap_spectra.resize(sizes.size());

  // Retained for the trapezoid consistency check below.
  std::vector<FourierVector> gap_states(sizes.size(), u_ref);
  std::vector<char> have_state(sizes.size(), 0);

  detail::run_jobs(sizes.size(), [&](std::size_t job) {
    const int L = sizes[job];
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceRecord rec;
    rec.size = L;
    rec.modes = per_cell * L;
    rec.samples = 0;
    const auto op = assemble_exact(L, rec.modes, cfg.background, cfg.defect);
    const auto sol = eigh(op);
    const double reach = 0.5 * out.gap.width();
    for (double v : sol.eigenvalues)
      if (v > out.gap.alpha - reach && v < out.gap.beta + reach)
        out.near_gap_spectra[job].push_back(v);
    int index = 0;
    if (!detail::pick_gap_state(sol, out.gap, margin, out.lambda_ref, index)) {
      rec.gap_state_found = false;
    } else {
      rec.lambda = sol.eigenvalues[index];
      rec.abs_err_lambda = std::abs(rec.lambda - out.lambda_ref);
      rec.rel_err_lambda = rec.abs_err_lambda / std::abs(out.lambda_ref);
      std::vector<cplx> coeffs(sol.eigenvectors.col(index).data(),
                               sol.eigenvectors.col(index).data() + op.basis.dim());
      FourierVector u(op.basis, coeffs);
      auto phi = extend(u, cfg.reference_size, cfg.grid_h);
      align_phase(phi_ref, phi);
      const auto err = line_error(phi, phi_ref);
      rec.err_l2 = err.l2;
      rec.err_h1 = err.h1;
      gap_states[job] = std::move(u);
      have_state[job] = 1;
    }
    const auto t1 = std::chrono::steady_clock::now();
    rec.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    out.records[job] = rec;
  });

  for (std::size_t job = 0; job < out.records.size(); ++job) {
    if (!have_state[job] || out.records[job].err_l2 <= 1e-7) continue;
    detail::verify_halving(
        [&](double h) {
          auto phi = extend(gap_states[job], cfg.reference_size, h);
          auto ref = extend(u_ref, cfg.reference_size, h);
          align_phase(ref, phi);
          return std::pair(phi, ref);
        },
        {out.records[job].err_l2, out.records[job].err_h1}, cfg.grid_h);
    break;
  }
  return out;
}

// Quadrature study: for each (L, N) the interpolated-assembly eigenpairs at
// every sample multiplier are compared against the exact-assembly eigenpair
// of the same (L, N).  The exact baseline keeps a record with samples == 0
// and zero self-errors.
inline QuadratureStudyResult run_quadrature_study(const StudyConfig& cfg) {
  detail::validate_config(cfg, true);
  QuadratureStudyResult out;
  out.gap = resolve_gap(cfg);
  const double margin = detail::gap_margin_fraction * out.gap.width();
  const double mid = 0.5 * (out.gap.alpha + out.gap.beta);

  std::vector<int> sizes = cfg.sizes;
  std::sort(sizes.begin(), sizes.end());
  std::vector<int> mults = cfg.mode_multipliers;
  std::sort(mults.begin(), mults.end());
  std::vector<int> samples = cfg.sample_multipliers;
  std::sort(samples.begin(), samples.end());

  struct Job {
    int L;
    int n_mult;
  };
  std::vector<Job> jobs;
  for (int L : sizes)
    for (int n : mults) jobs.push_back({L, n});
  const std::size_t per_job = samples.size() + 1;
  out.records.resize(jobs.size() * per_job);

  std::mutex halving_mutex;
  bool halving_done = false;

  detail::run_jobs(jobs.size(), [&](std::size_t job) {
    const int L = jobs[job].L;
    const int n_modes = jobs[job].n_mult * L;
    ConvergenceRecord* slot = out.records.data() + job * per_job;

    const auto t0 = std::chrono::steady_clock::now();
    const auto op = assemble_exact(L, n_modes, cfg.background, cfg.defect);
    const auto sol = eigh(op);
    ConvergenceRecord base;
    base.size = L;
    base.modes = n_modes;
    base.samples = 0;
    int base_index = 0;
    const bool have_base = detail::pick_gap_state(sol, out.gap, margin, mid, base_index);
    ExtendedEigenfunction phi_base;
    FourierVector u_base(op.basis);
    if (have_base) {
      base.lambda = sol.eigenvalues[base_index];
      std::vector<cplx> coeffs(sol.eigenvectors.col(base_index).data(),
                               sol.eigenvectors.col(base_index).data() + op.basis.dim());
      u_base = FourierVector(op.basis, coeffs);
      phi_base = extend(u_base, cfg.reference_size, cfg.grid_h);
    } else {
      base.gap_state_found = false;
    }
    const auto t1 = std::chrono::steady_clock::now();
    base.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
    slot[0] = base;

    for (std::size_t s = 0; s < samples.size(); ++s) {
      const auto ts0 = std::chrono::steady_clock::now();
      ConvergenceRecord rec;
      rec.size = L;
      rec.modes = n_modes;
      rec.samples = samples[s] * L;
      const auto opm = assemble_interpolated(L, n_modes, rec.samples, cfg.background, cfg.defect);
      const auto solm = eigh(opm);
      int index = 0;
      if (!have_base || !detail::pick_gap_state(solm, out.gap, margin, base.lambda, index)) {
        rec.gap_state_found = false;
      } else {
        rec.lambda = solm.eigenvalues[index];
        rec.abs_err_lambda = std::abs(rec.lambda - base.lambda);
        rec.rel_err_lambda = rec.abs_err_lambda / std::abs(base.lambda);
        std::vector<cplx> coeffs(solm.eigenvectors.col(index).data(),
                                 solm.eigenvectors.col(index).data() + opm.basis.dim());
        FourierVector u(opm.basis, coeffs);
        auto phi = extend(u, cfg.reference_size, cfg.grid_h, rec.samples);
        align_phase(phi_base, phi);
        const auto err = line_error(phi, phi_base);
        rec.err_l2 = err.l2;
        rec.err_h1 = err.h1;

        bool do_check = false;
        {
          std::lock_guard<std::mutex> lock(halving_mutex);
          if (!halving_done && rec.err_l2 > 1e-7) {
            halving_done = true;
            do_check = true;
          }
        }
        if (do_check)
          detail::verify_halving(
              [&](double h) {
                auto cand = extend(u, cfg.reference_size, h, rec.samples);
                auto ref = extend(u_base, cfg.reference_size, h);
                align_phase(ref, cand);
                return std::pair(cand, ref);
              },
              err, cfg.grid_h);
      }
      const auto ts1 = std::chrono::steady_clock::now();
      rec.wall_seconds = std::chrono::duration<double>(ts1 - ts0).count();
      slot[1 + s] = rec;
    }
  });
  return out;
}

}  // namespace gapwave
