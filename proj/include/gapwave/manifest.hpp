#pragma once
// Run manifest: which tool version ran which subcommand when, the exact
// configuration snapshot, and the inventory of files written.  Serialized in
// the same sectioned key=value format as the configuration itself.

#include <ctime>
#include <stdexcept>
#include <string>
#include <vector>

#include "config.hpp"

namespace gapwave {

inline constexpr const char* tool_name = "gapwave";
inline constexpr const char* tool_version = "0.1.0";

struct RunManifest {
  std::string tool = tool_name;
  std::string version = tool_version;
  std::string subcommand;
  std::string created;  // UTC, ISO 8601
  ConfigDoc config;     // snapshot, sections [potential]/[study]/[output]
  std::vector<std::string> outputs;
};

inline std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

inline std::string write_manifest(const RunManifest& m) {
  ConfigDoc doc;
  auto& head = doc.section("manifest");
  head.entries.push_back({"tool", m.tool, 0});
  head.entries.push_back({"version", m.version, 0});
  head.entries.push_back({"subcommand", m.subcommand, 0});
  head.entries.push_back({"created", m.created, 0});
  for (const auto& s : m.config.sections) doc.sections.push_back(s);
  auto& files = doc.section("outputs");
  for (std::size_t i = 0; i < m.outputs.size(); ++i)
    files.entries.push_back({"file." + std::to_string(i), m.outputs[i], 0});
  return write_config(doc);
}

inline RunManifest parse_manifest(const std::string& text) {
  const ConfigDoc doc = parse_config(text);
  RunManifest m;
  bool saw_head = false;
  for (const auto& s : doc.sections) {
    if (s.name == "manifest") {
      saw_head = true;
      for (const auto& e : s.entries) {
        if (e.key == "tool")
          m.tool = e.value;
        else if (e.key == "version")
          m.version = e.value;
        else if (e.key == "subcommand")
          m.subcommand = e.value;
        else if (e.key == "created")
          m.created = e.value;
        else
          throw config_error(e.line, "unknown manifest key '" + e.key + "'");
      }
    } else if (s.name == "outputs") {
      for (const auto& e : s.entries) m.outputs.push_back(e.value);
    } else {
      m.config.sections.push_back(s);
    }
  }
  if (!saw_head) throw std::runtime_error("manifest: missing [manifest] section");
  return m;
}

}  // namespace gapwave
