// Command-line front end: band structure, single supercell solves, and the
// two convergence studies, writing CSV + SVG artifacts and a run manifest.

#include <gapwave/driver.hpp>
#include <gapwave/manifest.hpp>

#include <CLI11.hpp>

#include <iostream>
#include <string>

namespace {

// "--reference L,N" -> the two integers.
bool parse_reference(const std::string& text, int& size, int& modes) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) return false;
  try {
    size = std::stoi(text.substr(0, comma));
    modes = std::stoi(text.substr(comma + 1));
  } catch (...) {
    return false;
  }
  return size > 0 && modes > 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planewave supercell solver for gap eigenvalues of perturbed "
               "periodic operators on the line"};
  app.set_version_flag("--version", std::string(gapwave::tool_name) + " " +
                                        gapwave::tool_version);
  app.require_subcommand(1);

  gapwave::DriverOptions opt;
  std::string reference_text;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", opt.config_path, "configuration file (sectioned key=value)");
    cmd->add_option("--out", opt.out_dir, "output directory");
  };
  const auto add_study_flags = [&](CLI::App* cmd) {
    cmd->add_option("--reference", reference_text, "reference run as L,N (total modes per side)");
    cmd->add_option("--grid-h", opt.grid_h, "error-grid spacing");
    cmd->add_flag("--paper-scale", opt.paper_scale,
                  "use the full-scale reference (L=40, N=1400)");
  };

  auto* bands = app.add_subcommand("bands", "sweep the background band structure, report gaps");
  add_common(bands);
  bands->add_option("--modes", opt.band_modes, "unit-cell modes per side");
  bands->add_option("--q", opt.band_qpoints, "q points across the Brillouin zone");

  auto* solve = app.add_subcommand("solve", "solve one supercell and report the gap eigenvalue");
  add_common(solve);
  solve->add_option("--L", opt.L, "supercell size")->required();
  solve->add_option("--N", opt.N, "mode multiplier (N_L = N*L)")->required();
  solve->add_option("--M", opt.M, "sample multiplier (M_L = M*L); omit for exact integration");

  auto* ssize = app.add_subcommand("study-size", "supercell-size convergence study");
  add_common(ssize);
  add_study_flags(ssize);

  auto* squad = app.add_subcommand("study-quadrature", "interpolated-assembly convergence study");
  add_common(squad);
  add_study_flags(squad);

  auto* report = app.add_subcommand("report", "rebuild figures from an existing records.csv");
  add_common(report);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (!reference_text.empty() &&
      !parse_reference(reference_text, opt.reference_size, opt.reference_modes)) {
    std::cerr << "usage error: --reference expects L,N with positive integers\n";
    return 2;
  }

  if (bands->parsed()) return gapwave::cli_bands(opt, std::cout, std::cerr);
  if (solve->parsed()) return gapwave::cli_solve(opt, std::cout, std::cerr);
  if (ssize->parsed()) return gapwave::cli_study_size(opt, std::cout, std::cerr);
  if (squad->parsed()) return gapwave::cli_study_quadrature(opt, std::cout, std::cerr);
  return gapwave::cli_report(opt, std::cout, std::cerr);
}
