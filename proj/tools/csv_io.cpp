#include "csv_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace stcov_cli {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  size_t start = 0;
  while (true) {
    const size_t comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(trim(line.substr(start)));
      break;
    }
    fields.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return fields;
}

double parse_double(const std::string& field, const std::string& context) {
  if (field.empty()) throw csv_error(context + ": empty numeric field");
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (end != field.c_str() + field.size())
    throw csv_error(context + ": cannot parse '" + field + "' as a number");
  return v;
}

long long parse_int(const std::string& field, const std::string& context) {
  if (field.empty()) throw csv_error(context + ": empty integer field");
  char* end = nullptr;
  const long long v = std::strtoll(field.c_str(), &end, 10);
  if (end != field.c_str() + field.size())
    throw csv_error(context + ": cannot parse '" + field + "' as an integer");
  return v;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

/* All non-comment, non-blank lines split into fields; first entry is the
 * header row. */
std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw csv_error("cannot open '" + path + "'");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    rows.push_back(split_csv_line(t));
  }
  if (rows.empty()) throw csv_error("'" + path + "' has no header row");
  return rows;
}

void check_header(const std::vector<std::string>& header,
                  const std::vector<std::string>& expected, const std::string& path) {
  bool ok = header.size() == expected.size();
  for (size_t i = 0; ok && i < expected.size(); ++i) ok = header[i] == expected[i];
  if (!ok) {
    std::string want;
    for (size_t i = 0; i < expected.size(); ++i) want += (i ? "," : "") + expected[i];
    throw csv_error("'" + path + "': expected header '" + want + "'");
  }
}

}  // namespace

PointsCsv read_points_csv(const std::string& path, bool require_station) {
  const auto rows = read_rows(path);
  const bool with_station = rows[0].size() == 5;
  if (with_station)
    check_header(rows[0], {"x", "y", "t", "value", "station"}, path);
  else
    check_header(rows[0], {"x", "y", "t", "value"}, path);
  if (require_station && !with_station)
    throw csv_error("'" + path + "': a 'station' column is required");

  const int n = static_cast<int>(rows.size()) - 1;
  if (n == 0) throw csv_error("'" + path + "' has no data rows");
  PointsCsv out;
  out.coords.resize(n, 2);
  out.times.resize(n);
  out.values.resize(n);
  if (with_station) out.stations.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& r = rows[i + 1];
    const std::string ctx = path + " row " + std::to_string(i + 1);
    if (r.size() != rows[0].size()) throw csv_error(ctx + ": wrong number of fields");
    out.coords(i, 0) = parse_double(r[0], ctx);
    out.coords(i, 1) = parse_double(r[1], ctx);
    out.times[i] = parse_double(r[2], ctx);
    out.values[i] = parse_double(r[3], ctx);
    if (with_station) {
      if (r[4].empty()) throw csv_error(ctx + ": empty station label");
      out.stations[i] = r[4];
    }
  }
  return out;
}

DesignCsv read_design_csv(const std::string& path) {
  const auto rows = read_rows(path);
  check_header(rows[0], {"x", "y", "t"}, path);
  const int n = static_cast<int>(rows.size()) - 1;
  if (n == 0) throw csv_error("'" + path + "' has no data rows");
  DesignCsv out;
  out.coords.resize(n, 2);
  out.times.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& r = rows[i + 1];
    const std::string ctx = path + " row " + std::to_string(i + 1);
    if (r.size() != 3) throw csv_error(ctx + ": wrong number of fields");
    out.coords(i, 0) = parse_double(r[0], ctx);
    out.coords(i, 1) = parse_double(r[1], ctx);
    out.times[i] = parse_double(r[2], ctx);
  }
  return out;
}

}  // namespace stcov_cli
