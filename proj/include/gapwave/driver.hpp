#pragma once
// Subcommand drivers behind the command-line tool.  Each takes resolved
// options, writes its artifacts into the output directory, prints a summary,
// and returns the process exit code: 0 success, 2 configuration or usage
// error, 3 resolution-check failure, 4 no gap-interior eigenvalue.

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "config.hpp"
#include "csv.hpp"
#include "harness.hpp"
#include "manifest.hpp"
#include "spectra.hpp"
#include "svg.hpp"

namespace gapwave {

struct DriverOptions {
  std::string config_path;    // empty: built-in defaults
  std::string out_dir;        // empty: the config's [output] dir
  int L = 0;                  // solve: supercell size
  int N = 0;                  // solve: per-cell mode multiplier
  int M = 0;                  // solve: per-cell sample multiplier, 0 = exact
  int reference_size = 0;     // 0 = keep config
  int reference_modes = 0;
  double grid_h = 0.0;
  bool paper_scale = false;   // reference (40, 1400)
  int band_modes = 0;
  int band_qpoints = 0;
};

namespace detail {

inline ToolConfig load_tool_config(const DriverOptions& opt) {
  ToolConfig cfg;
  if (!opt.config_path.empty())
    cfg = tool_config_from(parse_config(read_text_file(opt.config_path)));
  if (opt.paper_scale) {
    cfg.study.reference_size = 40;
    cfg.study.reference_modes = 1400;
  }
  if (opt.reference_size > 0) cfg.study.reference_size = opt.reference_size;
  if (opt.reference_modes > 0) cfg.study.reference_modes = opt.reference_modes;
  if (opt.grid_h > 0.0) cfg.study.grid_h = opt.grid_h;
  if (opt.band_modes > 0) cfg.band_modes = opt.band_modes;
  if (opt.band_qpoints > 0) cfg.band_qpoints = opt.band_qpoints;
  if (!opt.out_dir.empty()) cfg.study.output_dir = opt.out_dir;
  return cfg;
}

class ArtifactSink {
 public:
  ArtifactSink(std::string subcommand, const ToolConfig& cfg) : dir_(cfg.study.output_dir) {
    std::filesystem::create_directories(dir_);
    manifest_.subcommand = std::move(subcommand);
    manifest_.created = utc_timestamp();
    manifest_.config = config_snapshot(cfg);
  }

  void emit(const std::string& name, const std::string& content) {
    write_text_file(dir_ + "/" + name, content);
    manifest_.outputs.push_back(name);
  }

  void finish() {
    manifest_.outputs.push_back("manifest.txt");
    write_text_file(dir_ + "/" + "manifest.txt", write_manifest(manifest_));
  }

  const std::string& dir() const { return dir_; }

 private:
  std::string dir_;
  RunManifest manifest_;
};

// Margin used by solve and the pollution window: absolute shrink of the gap
// before counting interior eigenvalues.
inline constexpr double solve_gap_margin = 0.05;

template <class Body>
inline int guarded(std::ostream& err, const Body& body) {
  try {
    return body();
  } catch (const config_error& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const resolution_error& e) {
    err << "resolution error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

inline PlotSeries two_point_line(const std::string& label, double x0, double x1, double y) {
  PlotSeries s;
  s.label = label;
  s.points = {{x0, y}, {x1, y}};
  s.markers = false;
  return s;
}

inline std::string size_error_figure(const std::vector<ConvergenceRecord>& records) {
  PlotSeries lam{"Eigenvalue", {}, true, true};
  PlotSeries l2{"Error L2", {}, true, true};
  PlotSeries h1{"Error H1", {}, true, true};
  for (const auto& r : records) {
    if (!r.gap_state_found) continue;
    lam.points.push_back({double(r.size), r.rel_err_lambda});
    // Squared norms, matching the eigenvalue error's second-order decay.
    l2.points.push_back({double(r.size), r.err_l2 * r.err_l2});
    h1.points.push_back({double(r.size), r.err_h1 * r.err_h1});
  }
  PlotSpec spec;
  spec.title = "Convergence with supercell size";
  spec.xlabel = "supercell size L";
  spec.ylabel = "relative eigenvalue error / squared eigenvector error";
  spec.logy = true;
  return render_plot(spec, {lam, l2, h1});
}

inline std::string spectrum_figure(const SizeStudyResult& res) {
  PlotSeries bands{"Band states", {}, false, true};
  PlotSeries gap_states{"Gap eigenvalue", {}, false, true};
  double lmin = 1e300, lmax = -1e300;
  for (std::size_t j = 0; j < res.records.size(); ++j) {
    const auto& rec = res.records[j];
    lmin = std::min(lmin, double(rec.size));
    lmax = std::max(lmax, double(rec.size));
    for (double v : res.near_gap_spectra[j]) {
      if (rec.gap_state_found && v == rec.lambda)
        gap_states.points.push_back({double(rec.size), v});
      else
        bands.points.push_back({double(rec.size), v});
    }
  }
  if (lmin > lmax) lmin = lmax = 0.0;
  PlotSpec spec;
  spec.title = "Spectrum near the gap vs supercell size";
  spec.xlabel = "supercell size L";
  spec.ylabel = "eigenvalue";
  return render_plot(spec, {bands, gap_states,
                            two_point_line("alpha", lmin - 0.5, lmax + 0.5, res.gap.alpha),
                            two_point_line("beta", lmin - 0.5, lmax + 0.5, res.gap.beta)});
}

enum class ErrorColumn { lambda, l2, h1 };

inline double error_of(const ConvergenceRecord& r, ErrorColumn c) {
  switch (c) {
    case ErrorColumn::lambda: return r.abs_err_lambda;
    case ErrorColumn::l2: return r.err_l2;
    default: return r.err_h1;
  }
}

// One figure of the quadrature study: per (L, sample multiplier) the error
// against the exact-assembly baseline as a function of N_L, plus, for the
// eigenvalue figure, the exact-assembly drift against its largest-N value.
inline std::string quadrature_figure(const std::vector<ConvergenceRecord>& records,
                                     ErrorColumn column, const std::string& title,
                                     const std::string& ylabel) {
  std::map<std::pair<int, int>, PlotSeries> curves;  // (L, multiplier) -> series
  std::map<int, std::vector<const ConvergenceRecord*>> exact_by_size;
  for (const auto& r : records) {
    if (!r.gap_state_found) continue;
    if (r.samples == 0) {
      exact_by_size[r.size].push_back(&r);
      continue;
    }
    const int mult = r.samples / r.size;
    auto& s = curves[{r.size, mult}];
    if (s.points.empty())
      s.label = "L=" + std::to_string(r.size) + " M=" + std::to_string(mult) + "L";
    s.points.push_back({double(r.modes), error_of(r, column)});
  }
  std::vector<PlotSeries> series;
  for (auto& [key, s] : curves) {
    std::sort(s.points.begin(), s.points.end());
    series.push_back(std::move(s));
  }
  if (column == ErrorColumn::lambda) {
    for (auto& [size, recs] : exact_by_size) {
      if (recs.size() < 2) continue;
      const ConvergenceRecord* best = recs.back();
      for (const auto* r : recs)
        if (r->modes > best->modes) best = r;
      PlotSeries s;
      s.label = "L=" + std::to_string(size) + " exact";
      for (const auto* r : recs)
        if (r != best) s.points.push_back({double(r->modes), std::abs(r->lambda - best->lambda)});
      std::sort(s.points.begin(), s.points.end());
      series.push_back(std::move(s));
    }
  }
  PlotSpec spec;
  spec.title = title;
  spec.xlabel = "modes per side N_L";
  spec.ylabel = ylabel;
  spec.logx = true;
  spec.logy = true;
  return render_plot(spec, series);
}

}  // namespace detail

inline int cli_bands(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() {
    const ToolConfig cfg = detail::load_tool_config(opt);
    const auto bands = band_structure(cfg.study.background, cfg.band_modes, cfg.band_qpoints);
    detail::ArtifactSink sink("bands", cfg);
    sink.emit("bands.csv", bands_csv(bands));
    sink.emit("gaps.csv", gaps_csv(bands));
    sink.finish();
    if (bands.gaps.empty()) {
      out << "no gaps found\n";
    } else {
      const auto& g = bands.gaps.front();
      out << "first gap: alpha = " << format_double(g.alpha) << ", beta = "
          << format_double(g.beta) << ", width = " << format_double(g.width()) << "\n";
    }
    out << "wrote " << sink.dir() << "/bands.csv, gaps.csv, manifest.txt\n";
    return 0;
  });
}

inline int cli_solve(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() {
    if (opt.L < 1 || opt.N < 1)
      throw std::invalid_argument("solve needs --L and --N (per-cell mode multiplier)");
    const ToolConfig cfg = detail::load_tool_config(opt);
    const auto bands = band_structure(cfg.study.background, cfg.band_modes, cfg.band_qpoints);
    if (bands.gaps.empty()) {
      err << "no spectral gap, so no gap eigenvalue exists\n";
      return 4;
    }
    const GapInterval gap = bands.gaps.front();

    const int n_modes = opt.N * opt.L;
    const auto op = opt.M > 0 ? assemble_interpolated(opt.L, n_modes, opt.M * opt.L,
                                                      cfg.study.background, cfg.study.defect)
                              : assemble_exact(opt.L, n_modes, cfg.study.background,
                                               cfg.study.defect);
    for (const auto& w : op.warnings) err << "warning: " << w << "\n";
    const auto sol = eigh(op);

    const auto idx = window(sol, gap.alpha + detail::solve_gap_margin,
                            gap.beta - detail::solve_gap_margin);
    if (idx.empty()) {
      err << "no eigenvalue inside the gap window (" << format_double(gap.alpha) << ", "
          << format_double(gap.beta) << ") shrunk by " << format_double(detail::solve_gap_margin)
          << "\n";
      return 4;
    }
    const double center = 0.5 * (gap.alpha + gap.beta);
    int pick = idx.front();
    for (int i : idx)
      if (std::abs(sol.eigenvalues[i] - center) < std::abs(sol.eigenvalues[pick] - center))
        pick = i;

    detail::ArtifactSink sink("solve", cfg);
    sink.emit("spectrum.csv", spectrum_csv(sol, gap));
    sink.emit("defect.csv", defect_csv(sol.eigenvalues[pick], sol.residuals[pick],
                                       static_cast<int>(idx.size())));
    sink.finish();
    out << "lambda = " << format_double(sol.eigenvalues[pick]) << " (gap "
        << format_double(gap.alpha) << " .. " << format_double(gap.beta) << ", "
        << idx.size() << " in window)\n";
    out << "wrote " << sink.dir() << "/spectrum.csv, defect.csv, manifest.txt\n";
    return 0;
  });
}

inline int cli_study_size(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() {
    const ToolConfig cfg = detail::load_tool_config(opt);
    const auto res = run_size_study(cfg.study);
    detail::ArtifactSink sink("study-size", cfg);
    sink.emit("records.csv", records_csv(res.records));
    sink.emit("figure_spectrum.svg", detail::spectrum_figure(res));
    sink.emit("figure_size_error.svg", detail::size_error_figure(res.records));
    sink.finish();

    std::size_t found = 0;
    std::vector<double> xs, ylam, yh1;
    for (const auto& r : res.records) {
      if (!r.gap_state_found) {
        err << "warning: no gap eigenvalue at L = " << r.size << "\n";
        continue;
      }
      ++found;
      if (r.abs_err_lambda > 0.0 && r.err_h1 > 0.0 &&
          (xs.empty() || double(r.size) > xs.back())) {
        xs.push_back(double(r.size));
        ylam.push_back(std::log10(r.abs_err_lambda));
        yh1.push_back(std::log10(r.err_h1));
      }
    }
    if (found == 0) throw resolution_error("size study: every study point failed");

    out << "gap: (" << format_double(res.gap.alpha) << ", " << format_double(res.gap.beta)
        << "), reference lambda = " << format_double(res.lambda_ref) << " at (L="
        << res.reference.size << ", N_L=" << res.reference.modes << ")\n";
    if (xs.size() >= 3) {
      const auto flam = fit_rate(xs, ylam);
      const auto fh1 = fit_rate(xs, yh1);
      out << "fitted slopes: eigenvalue " << format_double(flam.slope) << " (r2 "
          << format_double(flam.r2) << "), H1 " << format_double(fh1.slope) << " (r2 "
          << format_double(fh1.r2) << "), ratio " << format_double(flam.slope / fh1.slope)
          << "\n";
    }
    out << "wrote " << sink.dir() << "/records.csv, figure_spectrum.svg, figure_size_error.svg, "
        << "manifest.txt\n";
    return 0;
  });
}

inline int cli_study_quadrature(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() {
    const ToolConfig cfg = detail::load_tool_config(opt);
    const auto res = run_quadrature_study(cfg.study);
    detail::ArtifactSink sink("study-quadrature", cfg);
    sink.emit("records.csv", records_csv(res.records));
    sink.emit("figure_quadrature_lambda.svg",
              detail::quadrature_figure(res.records, detail::ErrorColumn::lambda,
                                        "Eigenvalue error vs modes", "|lambda - lambda_exact|"));
    sink.emit("figure_quadrature_l2.svg",
              detail::quadrature_figure(res.records, detail::ErrorColumn::l2,
                                        "L2 eigenvector error vs modes", "L2 error"));
    sink.emit("figure_quadrature_h1.svg",
              detail::quadrature_figure(res.records, detail::ErrorColumn::h1,
                                        "H1 eigenvector error vs modes", "H1 error"));
    sink.finish();

    std::size_t found = 0, failed = 0;
    for (const auto& r : res.records) {
      if (r.gap_state_found)
        ++found;
      else
        ++failed;
    }
    if (failed > 0) err << "warning: " << failed << " study points found no gap eigenvalue\n";
    if (found == 0) throw resolution_error("quadrature study: every study point failed");
    out << "gap: (" << format_double(res.gap.alpha) << ", " << format_double(res.gap.beta)
        << "), " << res.records.size() << " records\n";
    out << "wrote " << sink.dir() << "/records.csv, figure_quadrature_{lambda,l2,h1}.svg, "
        << "manifest.txt\n";
    return 0;
  });
}

// Rebuilds the figures (and manifest) from an existing records.csv, without
// recomputing anything.
inline int cli_report(const DriverOptions& opt, std::ostream& out, std::ostream& err) {
  return detail::guarded(err, [&]() {
    const ToolConfig cfg = detail::load_tool_config(opt);
    const std::string dir = cfg.study.output_dir;
    const auto records = parse_records_csv(read_text_file(dir + "/records.csv"));
    if (records.empty()) throw std::invalid_argument("report: records.csv holds no records");

    const bool quadrature =
        std::any_of(records.begin(), records.end(),
                    [](const ConvergenceRecord& r) { return r.samples != 0; });
    detail::ArtifactSink sink("report", cfg);
    if (quadrature) {
      sink.emit("figure_quadrature_lambda.svg",
                detail::quadrature_figure(records, detail::ErrorColumn::lambda,
                                          "Eigenvalue error vs modes", "|lambda - lambda_exact|"));
      sink.emit("figure_quadrature_l2.svg",
                detail::quadrature_figure(records, detail::ErrorColumn::l2,
                                          "L2 eigenvector error vs modes", "L2 error"));
      sink.emit("figure_quadrature_h1.svg",
                detail::quadrature_figure(records, detail::ErrorColumn::h1,
                                          "H1 eigenvector error vs modes", "H1 error"));
    } else {
      sink.emit("figure_size_error.svg", detail::size_error_figure(records));

      struct Column {
        const char* name;
        double ConvergenceRecord::*field;
      };
      const Column columns[] = {{"eigenvalue", &ConvergenceRecord::abs_err_lambda},
                                {"l2", &ConvergenceRecord::err_l2},
                                {"h1", &ConvergenceRecord::err_h1}};
      for (const auto& col : columns) {
        std::vector<double> xs, ys;
        for (const auto& r : records) {
          const double e = r.*(col.field);
          if (r.gap_state_found && e > 0.0 && (xs.empty() || double(r.size) > xs.back())) {
            xs.push_back(double(r.size));
            ys.push_back(std::log10(e));
          }
        }
        if (xs.size() < 3) continue;
        const RateFit fit = fit_rate(xs, ys);
        out << "rate " << col.name << ": slope = " << format_double(fit.slope)
            << ", intercept = " << format_double(fit.intercept) << ", r2 = "
            << format_double(fit.r2) << "\n";
      }
    }
    sink.finish();
    out << "rebuilt figures from " << dir << "/records.csv (" << records.size() << " records)\n";
    return 0;
  });
}

}  // namespace gapwave
