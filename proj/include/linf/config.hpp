#pragma once

#include "linf/amle.hpp"
#include "linf/domain.hpp"
#include "linf/expression.hpp"
#include "linf/frame.hpp"
#include "linf/hamiltonian.hpp"
#include "linf/metric.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace linf {

/// Boundary datum: an expression over coordinates, or explicit
/// (coordinates, value) rows from a CSV file.
struct BoundarySpec {
  std::optional<Expression> expression;
  std::vector<Vec> points;
  std::vector<double> values;
  std::string source;  // expression text or file path
};

/// Validated run configuration (JSON). Relative paths inside the file are
/// resolved against the file's directory.
struct RunConfig {
  DomainSpec domain;
  double h = 0.0;
  std::string frame = "euclidean";
  HamiltonianPtr hamiltonian;
  /// Canonical description of the Hamiltonian entry, for metadata.
  std::string hamiltonian_desc;
  StencilSpec stencil;
  Quadrature quadrature = Quadrature::Midpoint;
  std::optional<BoundarySpec> boundary;
  double lambda = 1.0;
  std::optional<Vec> source;
  Direction direction = Direction::From;
  /// "boundary" or "all" for the all-pairs subcommand.
  std::string subset = "boundary";
  SolverParams solver;
  std::filesystem::path output_dir = "out";
  std::uint64_t seed = 1;
};

/// Throws ConfigError with the offending key for malformed input.
RunConfig parse_config(const std::filesystem::path& path);
RunConfig parse_config_text(const std::string& text, const std::filesystem::path& base_dir);

/// Builds the domain, frame and graph described by a configuration.
struct Problem {
  std::shared_ptr<const GridDomain> domain;
  FramePtr frame;
  std::shared_ptr<const DirectedGraph> graph;
};
Problem build_problem(const RunConfig& config);

/// Boundary function of the configured datum on the problem domain.
/// Throws ConfigError if the configuration has no boundary entry.
BoundaryFunction boundary_function(const RunConfig& config, const GridDomain& domain);

}  // namespace linf
