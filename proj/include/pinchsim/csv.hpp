#pragma once

// CSV emission: UTF-8, comma separators, LF line endings, '#'-prefixed
// provenance comments followed by a header row. Numeric cells carry 17
// significant digits so re-parsing reproduces the doubles exactly.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "pinchsim/errors.hpp"

namespace pinchsim {

inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct CsvDocument {
  std::vector<std::string> comments;  // emitted as "# <line>"
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void add_row(std::vector<std::string> cells) {
    if (cells.size() != header.size())
      throw ConfigError("csv row width does not match the header");
    rows.push_back(std::move(cells));
  }

  // Header plus data rows; the part required to be byte-identical across
  // reruns and worker counts.
  std::string body() const {
    std::string out;
    append_joined(out, header);
    for (const auto& row : rows) append_joined(out, row);
    return out;
  }

  std::string full_text() const {
    std::string out;
    for (const auto& c : comments) {
      out += "# ";
      out += c;
      out += '\n';
    }
    out += body();
    return out;
  }

  void write(const std::filesystem::path& path) const {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file: " + path.string());
    f << full_text();
  }

 private:
  static void append_joined(std::string& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  }
};

}  // namespace pinchsim
