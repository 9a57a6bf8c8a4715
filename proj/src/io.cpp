#include "linf/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace linf {

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string field_csv(const GridDomain& domain, const std::vector<double>& values) {
  if (values.size() != domain.size()) throw ContractError("field_csv: value count does not match domain");
  std::string out;
  for (int k = 0; k < domain.dim(); ++k) out += "x" + std::to_string(k + 1) + ",";
  out += "value\n";
  for (std::size_t v = 0; v < domain.size(); ++v) {
    const Vec x = domain.coord(static_cast<VertexId>(v));
    for (Eigen::Index k = 0; k < x.size(); ++k) out += format_double(x(k)) + ",";
    out += format_double(values[v]) + "\n";
  }
  return out;
}

std::string field_gnuplot(const GridDomain& domain, const std::vector<double>& values) {
  if (values.size() != domain.size()) throw ContractError("field_gnuplot: value count does not match domain");
  if (domain.dim() > 2) throw ContractError("field_gnuplot: only 1-D and 2-D fields");
  std::string out;
  int last_row = -1;
  for (std::size_t v = 0; v < domain.size(); ++v) {
    const auto id = static_cast<VertexId>(v);
    const Vec x = domain.coord(id);
    if (domain.dim() == 2) {
      const int row = domain.lattice_index(id)[1];
      if (last_row >= 0 && row != last_row) out += "\n";
      last_row = row;
      out += format_double(x(0)) + " " + format_double(x(1)) + " " + format_double(values[v]) + "\n";
    } else {
      out += format_double(x(0)) + " " + format_double(values[v]) + "\n";
    }
  }
  return out;
}

std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool seen_content = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const bool first = !seen_content;
    seen_content = true;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      const char* begin = cell.c_str();
      char* end = nullptr;
      errno = 0;
      const double v = std::strtod(begin, &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == begin || (end && *end != '\0')) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (!numeric) {
      if (first) continue;  // header
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": non-numeric entry");
    }
    if (row.size() != columns) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected " + std::to_string(columns) +
                        " columns, got " + std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<std::filesystem::path> OutputBundle::commit() const {
  std::filesystem::create_directories(dir_);
  std::vector<std::filesystem::path> written;
  for (const auto& [name, content] : files_) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << content;
    if (!out) throw Error("write failed for " + path.string());
    written.push_back(path);
  }
  return written;
}

}  // namespace linf
