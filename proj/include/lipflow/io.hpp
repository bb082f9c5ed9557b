#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "lipflow/error.hpp"

namespace lipflow {

// All numeric output carries 17 significant digits so that tables round-trip
// exactly through text.
inline std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_table(const std::filesystem::path& path, const std::string& header,
                        const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path);
  if (!out) throw Error("write_table: cannot open " + path.string());
  if (!header.empty()) out << "# " << header << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << " ";
      out << format_number(row[i]);
    }
    out << "\n";
  }
}

// Collects every artifact a run produces, with the parameters echoed, so a
// re-run into a clean directory reproduces the same listing.
struct Manifest {
  std::map<std::string, std::string> params;
  std::vector<std::pair<std::string, std::string>> files;  // name, description

  void add_file(const std::string& name, const std::string& description) {
    files.emplace_back(name, description);
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw Error("Manifest: cannot open " + path.string());
    out << "# run manifest\n";
    for (const auto& [k, v] : params) out << "param " << k << " = " << v << "\n";
    for (const auto& [name, desc] : files) out << "file " << name << " : " << desc << "\n";
  }
};

}  // namespace lipflow
