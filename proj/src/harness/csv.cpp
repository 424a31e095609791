#include <cstdio>
#include <fstream>
#include <sstream>

#include "nlfem/harness.hpp"

namespace nlfem::harness {

namespace {

std::string field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// RFC 4180: CRLF records, quoted fields where needed. The last column
// repeats the config hash so every row can be traced to its inputs.
std::string csv_text(const Table& table, const std::string& hash) {
  std::ostringstream os;
  for (const auto& c : table.columns) os << field(c) << ',';
  os << field("config_hash=" + hash) << "\r\n";
  for (const auto& row : table.rows) {
    if (row.size() != table.columns.size())
      throw std::logic_error("table '" + table.name + "' has a row of the wrong width");
    for (const auto& v : row) os << field(v) << ',';
    os << hash << "\r\n";
  }
  return os.str();
}

void write_csv(const std::string& path, const Table& table, const std::string& hash) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << csv_text(table, hash);
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace nlfem::harness
