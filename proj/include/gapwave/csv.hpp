#pragma once
// CSV emission for the study artifacts.  All numeric formatting goes through
// std::to_chars: fixed schemas, '.' decimal separator, no locale influence,
// byte-identical output for identical inputs.

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "harness.hpp"
#include "spectra.hpp"

namespace gapwave {

// Scientific with 9 fractional digits: "1.234567890e+00".
inline std::string csv_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific, 9);
  return std::string(buf, res.ptr);
}

inline std::string records_csv(const std::vector<ConvergenceRecord>& records) {
  std::string out = "L,N_L,M_L,lambda,abs_err_lambda,rel_err_lambda,err_l2,err_h1,flag\n";
  for (const auto& r : records) {
    out += std::to_string(r.size);
    out += ',';
    out += std::to_string(r.modes);
    out += ',';
    out += r.samples == 0 ? std::string("Exact") : std::to_string(r.samples);
    out += ',';
    out += csv_double(r.lambda);
    out += ',';
    out += csv_double(r.abs_err_lambda);
    out += ',';
    out += csv_double(r.rel_err_lambda);
    out += ',';
    out += csv_double(r.err_l2);
    out += ',';
    out += csv_double(r.err_h1);
    out += ',';
    out += r.gap_state_found ? "ok" : "no_gap_state";
    out += '\n';
  }
  return out;
}

inline std::string bands_csv(const BandStructure& bands) {
  std::string out = "q,band_index,energy\n";
  for (std::size_t i = 0; i < bands.qs.size(); ++i)
    for (std::size_t b = 0; b < bands.energies[i].size(); ++b) {
      out += csv_double(bands.qs[i]);
      out += ',';
      out += std::to_string(b);
      out += ',';
      out += csv_double(bands.energies[i][b]);
      out += '\n';
    }
  return out;
}

inline std::string gaps_csv(const BandStructure& bands) {
  std::string out = "gap_index,alpha,beta\n";
  for (std::size_t g = 0; g < bands.gaps.size(); ++g) {
    out += std::to_string(g);
    out += ',';
    out += csv_double(bands.gaps[g].alpha);
    out += ',';
    out += csv_double(bands.gaps[g].beta);
    out += '\n';
  }
  return out;
}

inline std::string spectrum_csv(const EigenSolution& sol, const GapInterval& gap) {
  std::string out = "index,eigenvalue,in_gap\n";
  for (std::size_t i = 0; i < sol.eigenvalues.size(); ++i) {
    const double v = sol.eigenvalues[i];
    out += std::to_string(i);
    out += ',';
    out += csv_double(v);
    out += ',';
    out += (v > gap.alpha && v < gap.beta) ? '1' : '0';
    out += '\n';
  }
  return out;
}

inline std::string defect_csv(double lambda, double residual, int window_count) {
  std::string out = "lambda,residual,window_count\n";
  out += csv_double(lambda);
  out += ',';
  out += csv_double(residual);
  out += ',';
  out += std::to_string(window_count);
  out += '\n';
  return out;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  for (;;) {
    const std::size_t comma = line.find(',', pos);
    if (comma == std::string::npos) {
      cells.push_back(line.substr(pos));
      return cells;
    }
    cells.push_back(line.substr(pos, comma - pos));
    pos = comma + 1;
  }
}

inline double cell_double(const std::string& cell, std::size_t line_no) {
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (cell.empty() || end != cell.c_str() + cell.size())
    throw std::runtime_error("records csv line " + std::to_string(line_no) + ": bad number '" +
                             cell + "'");
  return v;
}

}  // namespace detail

// Reads back a records.csv produced by records_csv (for report regeneration).
inline std::vector<ConvergenceRecord> parse_records_csv(const std::string& text) {
  std::vector<ConvergenceRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    const std::size_t eol = text.find('\n', pos);
    const std::string line =
        text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = (eol == std::string::npos) ? text.size() : eol + 1;
    ++line_no;
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "L,N_L,M_L,lambda,abs_err_lambda,rel_err_lambda,err_l2,err_h1,flag")
        throw std::runtime_error("records csv: unrecognized header '" + line + "'");
      continue;
    }
    const auto cells = detail::split_csv_line(line);
    if (cells.size() != 9)
      throw std::runtime_error("records csv line " + std::to_string(line_no) + ": expected 9 cells");
    ConvergenceRecord r;
    r.size = static_cast<int>(detail::cell_double(cells[0], line_no));
    r.modes = static_cast<int>(detail::cell_double(cells[1], line_no));
    r.samples = cells[2] == "Exact" ? 0 : static_cast<int>(detail::cell_double(cells[2], line_no));
    r.lambda = detail::cell_double(cells[3], line_no);
    r.abs_err_lambda = detail::cell_double(cells[4], line_no);
    r.rel_err_lambda = detail::cell_double(cells[5], line_no);
    r.err_l2 = detail::cell_double(cells[6], line_no);
    r.err_h1 = detail::cell_double(cells[7], line_no);
    if (cells[8] == "ok")
      r.gap_state_found = true;
    else if (cells[8] == "no_gap_state")
      r.gap_state_found = false;
    else
      throw std::runtime_error("records csv line " + std::to_string(line_no) + ": bad flag '" +
                               cells[8] + "'");
    out.push_back(r);
  }
  return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!f) throw std::runtime_error("write to '" + path + "' failed");
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::string content((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return content;
}

}  // namespace gapwave
