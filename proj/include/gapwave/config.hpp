#pragma once
// Flat sectioned key=value configuration: "[section]" headers followed by
// "key = value" lines, '#' comments.  The writer emits a canonical form, and
// re-serializing a parsed canonical document reproduces its bytes.

#include <charconv>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "harness.hpp"
#include "lattice.hpp"
#include "potentials.hpp"

namespace gapwave {

class config_error : public std::runtime_error {
 public:
  config_error(int line, const std::string& what)
      : std::runtime_error("config line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ConfigDoc {
  struct Entry {
    std::string key;
    std::string value;
    int line = 0;
  };
  struct Section {
    std::string name;
    std::vector<Entry> entries;
    int line = 0;
  };
  std::vector<Section> sections;

  const Entry* find(const std::string& section, const std::string& key) const {
    for (const auto& s : sections)
      if (s.name == section)
        for (const auto& e : s.entries)
          if (e.key == key) return &e;
    return nullptr;
  }

  Section& section(const std::string& name) {
    for (auto& s : sections)
      if (s.name == name) return s;
    sections.push_back({name, {}, 0});
    return sections.back();
  }

  void set(const std::string& sec, const std::string& key, std::string value) {
    auto& s = section(sec);
    for (auto& e : s.entries)
      if (e.key == key) {
        e.value = std::move(value);
        return;
      }
    s.entries.push_back({key, std::move(value), 0});
  }

  // Equality of content; source line numbers do not participate.
  friend bool operator==(const ConfigDoc& a, const ConfigDoc& b) {
    if (a.sections.size() != b.sections.size()) return false;
    for (std::size_t i = 0; i < a.sections.size(); ++i) {
      const auto& sa = a.sections[i];
      const auto& sb = b.sections[i];
      if (sa.name != sb.name || sa.entries.size() != sb.entries.size()) return false;
      for (std::size_t j = 0; j < sa.entries.size(); ++j)
        if (sa.entries[j].key != sb.entries[j].key || sa.entries[j].value != sb.entries[j].value)
          return false;
    }
    return true;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return {};
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

}  // namespace detail

inline ConfigDoc parse_config(const std::string& text) {
  ConfigDoc doc;
  ConfigDoc::Section* current = nullptr;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t eol = text.find('\n', pos);
    std::string line = text.substr(pos, eol == std::string::npos ? std::string::npos : eol - pos);
    pos = (eol == std::string::npos) ? text.size() + 1 : eol + 1;
    ++line_no;

    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw config_error(line_no, "malformed section header '" + line + "'");
      const std::string name = detail::trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw config_error(line_no, "empty section name");
      doc.sections.push_back({name, {}, line_no});
      current = &doc.sections.back();
      continue;
    }

    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(line_no, "expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty()) throw config_error(line_no, "empty key");
    if (current == nullptr)
      throw config_error(line_no, "entry '" + key + "' appears before any [section]");
    current->entries.push_back({key, value, line_no});
  }
  return doc;
}

inline std::string write_config(const ConfigDoc& doc) {
  std::string out;
  for (std::size_t i = 0; i < doc.sections.size(); ++i) {
    if (i > 0) out += '\n';
    out += '[';
    out += doc.sections[i].name;
    out += "]\n";
    for (const auto& e : doc.sections[i].entries) {
      out += e.key;
      out += " = ";
      out += e.value;
      out += '\n';
    }
  }
  return out;
}

// Shortest round-trip decimal form, parse_double-compatible.
inline std::string format_double(double v) {
  char buf[48];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace detail {

inline long long entry_int(const ConfigDoc::Entry& e) {
  long long out = 0;
  const char* first = e.value.data();
  const char* last = first + e.value.size();
  const auto res = std::from_chars(first, last, out);
  if (res.ec != std::errc{} || res.ptr != last)
    throw config_error(e.line, "key '" + e.key + "': '" + e.value + "' is not an integer");
  return out;
}

inline double entry_double(const ConfigDoc::Entry& e) {
  // strtod instead of from_chars<double>: identical grammar, available on
  // every libstdc++ shipped here.
  const std::string& s = e.value;
  char* end = nullptr;
  const double out = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw config_error(e.line, "key '" + e.key + "': '" + e.value + "' is not a number");
  return out;
}

inline std::vector<int> entry_int_list(const ConfigDoc::Entry& e) {
  std::vector<int> out;
  std::size_t pos = 0;
  while (pos < e.value.size()) {
    while (pos < e.value.size() && (e.value[pos] == ' ' || e.value[pos] == '\t')) ++pos;
    if (pos >= e.value.size()) break;
    std::size_t end = pos;
    while (end < e.value.size() && e.value[end] != ' ' && e.value[end] != '\t') ++end;
    int v = 0;
    const auto res = std::from_chars(e.value.data() + pos, e.value.data() + end, v);
    if (res.ec != std::errc{} || res.ptr != e.value.data() + end)
      throw config_error(e.line, "key '" + e.key + "': '" + e.value.substr(pos, end - pos) +
                                     "' is not an integer");
    out.push_back(v);
    pos = end;
  }
  if (out.empty()) throw config_error(e.line, "key '" + e.key + "': empty list");
  return out;
}

}  // namespace detail

// Everything a tool run needs: the study parameters plus the potential
// selection by name (StudyConfig itself holds opaque callables) and the band
// sweep resolution.
struct ToolConfig {
  StudyConfig study;
  std::string background_name = "abs_sin";
  double background_scale = 1.0;
  std::string defect_name = "neg_exp";
  double defect_scale = 1.0;
  int band_modes = 64;
  int band_qpoints = 129;
};

namespace detail {

inline PeriodicPotential background_by_name(const std::string& name, double scale, int line) {
  PeriodicPotential p;
  if (name == "abs_sin")
    p = abs_sin_potential();
  else if (name == "zero")
    p = zero_periodic();
  else
    throw config_error(line, "unknown background '" + name + "' (expected abs_sin or zero)");
  return scale == 1.0 ? p : scaled(p, scale);
}

inline DefectPotential defect_by_name(const std::string& name, double scale, int line) {
  DefectPotential w;
  if (name == "neg_exp")
    w = neg_exp_defect();
  else if (name == "zero")
    w = zero_defect();
  else
    throw config_error(line, "unknown defect '" + name + "' (expected neg_exp or zero)");
  return scale == 1.0 ? w : scaled(w, scale);
}

}  // namespace detail

// Applies a parsed document on top of the defaults.  Unknown sections or
// keys are rejected with their source line.
inline ToolConfig tool_config_from(const ConfigDoc& doc) {
  ToolConfig cfg;
  int bg_line = 0, defect_line = 0;
  for (const auto& s : doc.sections) {
    if (s.name == "potential") {
      for (const auto& e : s.entries) {
        if (e.key == "background") {
          cfg.background_name = e.value;
          bg_line = e.line;
        } else if (e.key == "background_scale") {
          cfg.background_scale = detail::entry_double(e);
        } else if (e.key == "defect") {
          cfg.defect_name = e.value;
          defect_line = e.line;
        } else if (e.key == "defect_scale") {
          cfg.defect_scale = detail::entry_double(e);
        } else {
          throw config_error(e.line, "unknown key '" + e.key + "' in [potential]");
        }
      }
    } else if (s.name == "study") {
      for (const auto& e : s.entries) {
        if (e.key == "sizes")
          cfg.study.sizes = detail::entry_int_list(e);
        else if (e.key == "mode_multipliers")
          cfg.study.mode_multipliers = detail::entry_int_list(e);
        else if (e.key == "sample_multipliers")
          cfg.study.sample_multipliers = detail::entry_int_list(e);
        else if (e.key == "reference_size")
          cfg.study.reference_size = static_cast<int>(detail::entry_int(e));
        else if (e.key == "reference_modes")
          cfg.study.reference_modes = static_cast<int>(detail::entry_int(e));
        else if (e.key == "gap_lo")
          cfg.study.gap_lo = detail::entry_double(e);
        else if (e.key == "gap_hi")
          cfg.study.gap_hi = detail::entry_double(e);
        else if (e.key == "grid_h")
          cfg.study.grid_h = detail::entry_double(e);
        else if (e.key == "band_modes")
          cfg.band_modes = static_cast<int>(detail::entry_int(e));
        else if (e.key == "band_qpoints")
          cfg.band_qpoints = static_cast<int>(detail::entry_int(e));
        else
          throw config_error(e.line, "unknown key '" + e.key + "' in [study]");
      }
    } else if (s.name == "output") {
      for (const auto& e : s.entries) {
        if (e.key == "dir")
          cfg.study.output_dir = e.value;
        else
          throw config_error(e.line, "unknown key '" + e.key + "' in [output]");
      }
    } else {
      throw config_error(s.line, "unknown section [" + s.name + "]");
    }
  }
  cfg.study.background =
      detail::background_by_name(cfg.background_name, cfg.background_scale, bg_line);
  cfg.study.defect = detail::defect_by_name(cfg.defect_name, cfg.defect_scale, defect_line);
  return cfg;
}

// Canonical snapshot of a tool configuration.  Parsing the result and
// snapshotting again reproduces the bytes.
inline ConfigDoc config_snapshot(const ToolConfig& cfg) {
  ConfigDoc doc;
  auto& pot = doc.section("potential");
  pot.entries.push_back({"background", cfg.background_name, 0});
  pot.entries.push_back({"background_scale", format_double(cfg.background_scale), 0});
  pot.entries.push_back({"defect", cfg.defect_name, 0});
  pot.entries.push_back({"defect_scale", format_double(cfg.defect_scale), 0});

  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i > 0) s += ' ';
      s += std::to_string(v[i]);
    }
    return s;
  };
  auto& st = doc.section("study");
  st.entries.push_back({"sizes", join(cfg.study.sizes), 0});
  st.entries.push_back({"mode_multipliers", join(cfg.study.mode_multipliers), 0});
  st.entries.push_back({"sample_multipliers", join(cfg.study.sample_multipliers), 0});
  st.entries.push_back({"reference_size", std::to_string(cfg.study.reference_size), 0});
  st.entries.push_back({"reference_modes", std::to_string(cfg.study.reference_modes), 0});
  st.entries.push_back({"gap_lo", format_double(cfg.study.gap_lo), 0});
  st.entries.push_back({"gap_hi", format_double(cfg.study.gap_hi), 0});
  st.entries.push_back({"grid_h", format_double(cfg.study.grid_h), 0});
  st.entries.push_back({"band_modes", std::to_string(cfg.band_modes), 0});
  st.entries.push_back({"band_qpoints", std::to_string(cfg.band_qpoints), 0});

  auto& out = doc.section("output");
  out.entries.push_back({"dir", cfg.study.output_dir, 0});
  return doc;
}

}  // namespace gapwave
