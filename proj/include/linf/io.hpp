#pragma once

#include "linf/domain.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace linf {

/// %.17g, with +-infinity as "inf"/"-inf".
std::string format_double(double v);

/// Header x1,...,xn,value and one row per vertex.
std::string field_csv(const GridDomain& domain, const std::vector<double>& values);

/// gnuplot data: "x value" (1-D) or "x y value" with a blank line between
/// scan lines (2-D). Throws ContractError for other dimensions.
std::string field_gnuplot(const GridDomain& domain, const std::vector<double>& values);

/// Rows of numbers; '#' comments and a non-numeric header line are skipped.
/// Throws ConfigError on malformed rows or a wrong column count.
std::vector<std::vector<double>> read_numeric_csv(const std::filesystem::path& path, std::size_t columns);

/// Collects output files and writes them together, so a failed run leaves
/// nothing behind.
class OutputBundle {
 public:
  explicit OutputBundle(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }
  /// Creates the directory and writes every file. Returns the written paths.
  std::vector<std::filesystem::path> commit() const;

 private:
  std::filesystem::path dir_;
  std::map<std::string, std::string> files_;
};

}  // namespace linf
