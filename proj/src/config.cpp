#include "linf/config.hpp"

#include "linf/io.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace linf {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where + ": expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(where + ": not finite");
  return x;
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj.at(key), where + "." + key) : fallback;
}

int integer(const json& v, const std::string& where) {
  if (!v.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return v.get<int>();
}

std::string text(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + ": expected a string");
  return v.get<std::string>();
}

Vec vector_of(const json& v, const std::string& where, int dim = -1) {
  if (!v.is_array() || v.empty() || v.size() > static_cast<std::size_t>(kMaxDim))
    throw ConfigError(where + ": expected an array of 1 to " + std::to_string(kMaxDim) + " numbers");
  if (dim >= 0 && v.size() != static_cast<std::size_t>(dim))
    throw ConfigError(where + ": expected " + std::to_string(dim) + " entries");
  Vec out(static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) out(static_cast<Eigen::Index>(i)) = number(v[i], where);
  return out;
}

HamiltonianPtr parse_hamiltonian(const json& j, int m, const std::filesystem::path& base, const std::string& where,
                                 int ambient_dim);

HamiltonianPtr parse_tabulated(const json& j, int m, const std::filesystem::path& base, const std::string& where,
                               int ambient_dim) {
  check_keys(j, {"type", "csv", "cells", "sample", "radius_bound", "angular", "radial"}, where);
  CellGrid cells;
  if (j.contains("cells")) {
    const auto& c = j.at("cells");
    check_keys(c, {"min", "max", "counts"}, where + ".cells");
    cells.lo = vector_of(c.at("min"), where + ".cells.min", ambient_dim);
    cells.hi = vector_of(c.at("max"), where + ".cells.max", ambient_dim);
    if (!c.at("counts").is_array() || c.at("counts").size() != static_cast<std::size_t>(ambient_dim))
      throw ConfigError(where + ".cells.counts: expected " + std::to_string(ambient_dim) + " integers");
    for (const auto& n : c.at("counts")) {
      const int count = integer(n, where + ".cells.counts");
      if (count < 1) throw ConfigError(where + ".cells.counts: counts must be positive");
      cells.counts.push_back(count);
    }
  }
  if (j.contains("csv") == j.contains("sample"))
    throw ConfigError(where + ": tabulated needs exactly one of 'csv' or 'sample'");
  if (j.contains("csv")) {
    for (const char* k : {"radius_bound", "angular", "radial"})
      if (j.contains(k)) throw ConfigError(where + ": '" + k + "' only applies to 'sample'");
    const auto path = base / text(j.at("csv"), where + ".csv");
    try {
      return std::make_shared<TabulatedHamiltonian>(TabulatedHamiltonian::from_csv(path.string(), m, cells));
    } catch (const ContractError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  const auto source = parse_hamiltonian(j.at("sample"), m, base, where + ".sample", ambient_dim);
  if (!j.contains("radius_bound")) throw ConfigError(where + ": 'sample' needs 'radius_bound'");
  const double radius = number(j.at("radius_bound"), where + ".radius_bound");
  const int angular = j.contains("angular") ? integer(j.at("angular"), where + ".angular") : 721;
  const int radial = j.contains("radial") ? integer(j.at("radial"), where + ".radial") : 200;
  if (!(radius > 0.0) || angular < 8 || radial < 2) throw ConfigError(where + ": invalid sampling parameters");
  try {
    return std::make_shared<TabulatedHamiltonian>(
        TabulatedHamiltonian::sample_polar(*source, radius, angular, radial, cells));
  } catch (const ContractError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

HamiltonianPtr parse_hamiltonian(const json& j, int m, const std::filesystem::path& base, const std::string& where,
                                 int ambient_dim) {
  if (!j.is_object() || !j.contains("type")) throw ConfigError(where + ": needs a 'type'");
  const std::string type = text(j.at("type"), where + ".type");
  if (type == "pnorm") {
    check_keys(j, {"type", "exponent", "scale"}, where);
    double exponent = 2.0;
    if (j.contains("exponent")) {
      const auto& e = j.at("exponent");
      exponent = e.is_string() && e.get<std::string>() == "inf" ? kInf : number(e, where + ".exponent");
    }
    const double scale = number_or(j, "scale", 1.0, where);
    if (!(exponent >= 1.0) || !(scale > 0.0)) throw ConfigError(where + ": need exponent >= 1 and scale > 0");
    return std::make_shared<PNormHamiltonian>(m, exponent, scale);
  }
  if (type == "anisotropic") {
    check_keys(j, {"type", "matrix", "min_eig", "max_eig"}, where);
    const auto& rows = j.at("matrix");
    if (!rows.is_array() || rows.size() != static_cast<std::size_t>(m))
      throw ConfigError(where + ".matrix: expected " + std::to_string(m) + " rows");
    bool symbolic = false;
    std::vector<std::vector<Expression>> entries(static_cast<std::size_t>(m));
    Mat constant(m, m);
    for (int r = 0; r < m; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(m))
        throw ConfigError(where + ".matrix: expected " + std::to_string(m) + " columns");
      for (int c = 0; c < m; ++c) {
        const auto& cell = row[static_cast<std::size_t>(c)];
        if (cell.is_string()) {
          symbolic = true;
          entries[static_cast<std::size_t>(r)].push_back(Expression::parse(cell.get<std::string>(), ambient_dim));
          constant(r, c) = 0.0;
        } else {
          const double v = number(cell, where + ".matrix");
          std::ostringstream os;
          os.precision(17);
          os << v;
          entries[static_cast<std::size_t>(r)].push_back(Expression::parse(os.str(), ambient_dim));
          constant(r, c) = v;
        }
      }
    }
    try {
      if (!symbolic) {
        if (j.contains("min_eig") || j.contains("max_eig"))
          throw ConfigError(where + ": eigenvalue bounds only apply to coordinate-dependent matrices");
        return std::make_shared<AnisotropicQuadratic>(constant);
      }
      if (!j.contains("min_eig") || !j.contains("max_eig"))
        throw ConfigError(where + ": coordinate-dependent matrices need 'min_eig' and 'max_eig'");
      auto field = [entries, m](const Vec& x) {
        Mat a(m, m);
        for (int r = 0; r < m; ++r)
          for (int c = 0; c < m; ++c) a(r, c) = entries[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)](x);
        return a;
      };
      return std::make_shared<AnisotropicQuadratic>(m, field, number(j.at("min_eig"), where + ".min_eig"),
                                                    number(j.at("max_eig"), where + ".max_eig"));
    } catch (const ContractError& e) {
      throw ConfigError(where + ": " + e.what());
    }
  }
  if (type == "floor") {
    check_keys(j, {"type"}, where);
    return std::make_shared<FloorNormHamiltonian>(m);
  }
  if (type == "halfdisk") {
    check_keys(j, {"type"}, where);
    if (m != 2) throw ConfigError(where + ": halfdisk needs a 2-dimensional horizontal space");
    return std::make_shared<HalfDiskHamiltonian>();
  }
  if (type == "tabulated") return parse_tabulated(j, m, base, where, ambient_dim);
  throw ConfigError(where + ": unknown hamiltonian type '" + type + "'");
}

void parse_domain(const json& j, RunConfig& cfg, const std::filesystem::path& base) {
  check_keys(j, {"shape", "min", "max", "h", "spacing", "center", "radius", "mask_file"}, "domain");
  const std::string shape = j.contains("shape") ? text(j.at("shape"), "domain.shape") : "box";
  DomainSpec& d = cfg.domain;
  if (shape == "box") d.shape = ShapeKind::Box;
  else if (shape == "disk") d.shape = ShapeKind::Disk;
  else if (shape == "slit-disk") d.shape = ShapeKind::SlitDisk;
  else if (shape == "mask") d.shape = ShapeKind::Mask;
  else throw ConfigError("domain.shape: unknown shape '" + shape + "'");
  const bool round = d.shape == ShapeKind::Disk || d.shape == ShapeKind::SlitDisk;

  if (j.contains("center")) d.center = vector_of(j.at("center"), "domain.center");
  d.radius = number_or(j, "radius", 1.0, "domain");
  if (!(d.radius > 0.0)) throw ConfigError("domain.radius: must be positive");
  if (j.contains("min") != j.contains("max")) throw ConfigError("domain: give both 'min' and 'max'");
  if (j.contains("min")) {
    d.lo = vector_of(j.at("min"), "domain.min");
    d.hi = vector_of(j.at("max"), "domain.max", static_cast<int>(d.lo.size()));
  } else if (round) {
    if (d.center.size() == 0) d.center = Vec::Zero(2);
    d.lo = d.center.array() - d.radius;
    d.hi = d.center.array() + d.radius;
  } else {
    throw ConfigError("domain: 'min' and 'max' are required");
  }
  const int n = static_cast<int>(d.lo.size());
  if ((d.hi - d.lo).minCoeff() <= 0.0) throw ConfigError("domain: max must exceed min on every axis");
  if (round) {
    if (d.center.size() == 0) d.center = Vec::Zero(n);
    if (d.center.size() != n) throw ConfigError("domain.center: wrong dimension");
    if (n != 2) throw ConfigError("domain: disk shapes are planar");
  } else if (j.contains("center") || j.contains("radius")) {
    throw ConfigError("domain: 'center' and 'radius' only apply to disk shapes");
  }
  if (!j.contains("h")) throw ConfigError("domain: 'h' is required");
  cfg.h = number(j.at("h"), "domain.h");
  if (!(cfg.h > 0.0)) throw ConfigError("domain.h: must be positive");

  FramePtr frame = make_frame(cfg.frame, n);
  d.spacing = j.contains("spacing") ? vector_of(j.at("spacing"), "domain.spacing", n) : frame->lattice_spacing(cfg.h);
  if (d.spacing.minCoeff() <= 0.0) throw ConfigError("domain.spacing: must be positive");

  if (d.shape != ShapeKind::Mask) {
    if (j.contains("mask_file")) throw ConfigError("domain: 'mask_file' only applies to shape 'mask'");
    return;
  }
  if (!j.contains("mask_file")) throw ConfigError("domain: shape 'mask' needs 'mask_file'");
  const auto path = base / text(j.at("mask_file"), "domain.mask_file");
  d.mask.clear();
  for (const auto& row : read_numeric_csv(path, static_cast<std::size_t>(n))) {
    std::vector<int> idx(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
      const double t = (row[static_cast<std::size_t>(k)] - d.lo(k)) / d.spacing(k);
      const double r = std::round(t);
      const double extent = std::floor((d.hi(k) - d.lo(k)) / d.spacing(k) + 1e-9);
      if (std::abs(t - r) > 1e-6 || r < 0.0 || r > extent)
        throw ConfigError("domain.mask_file: point " + std::to_string(d.mask.size() + 1) +
                          " is not a lattice point of the box");
      idx[static_cast<std::size_t>(k)] = static_cast<int>(r);
    }
    d.mask.push_back(std::move(idx));
  }
  if (d.mask.empty()) throw ConfigError("domain.mask_file: no points");
}

BoundarySpec parse_boundary(const json& j, int n, const std::filesystem::path& base) {
  check_keys(j, {"expression", "csv"}, "boundary");
  if (j.contains("expression") == j.contains("csv"))
    throw ConfigError("boundary: give exactly one of 'expression' or 'csv'");
  BoundarySpec b;
  if (j.contains("expression")) {
    b.source = text(j.at("expression"), "boundary.expression");
    b.expression = Expression::parse(b.source, n);
    return b;
  }
  const auto path = base / text(j.at("csv"), "boundary.csv");
  b.source = path.string();
  for (const auto& row : read_numeric_csv(path, static_cast<std::size_t>(n + 1))) {
    Vec x(n);
    for (int k = 0; k < n; ++k) x(k) = row[static_cast<std::size_t>(k)];
    b.points.push_back(x);
    b.values.push_back(row[static_cast<std::size_t>(n)]);
  }
  if (b.points.empty()) throw ConfigError("boundary.csv: no rows");
  return b;
}

void parse_solver(const json& j, SolverParams& s) {
  check_keys(j, {"radii", "order", "seed", "max_sweeps", "residual_tol", "keep_tol", "blend"}, "solver");
  if (j.contains("radii")) {
    const auto& r = j.at("radii");
    if (!r.is_array() || r.empty()) throw ConfigError("solver.radii: expected a non-empty array");
    s.radii.clear();
    for (const auto& v : r) {
      const double radius = number(v, "solver.radii");
      if (radius < 2.0) throw ConfigError("solver.radii: radii must be at least 2");
      s.radii.push_back(radius);
    }
  }
  if (j.contains("order")) {
    const auto o = text(j.at("order"), "solver.order");
    if (o == "lexicographic") s.order = SweepOrder::Lexicographic;
    else if (o == "random") s.order = SweepOrder::Random;
    else throw ConfigError("solver.order: expected 'lexicographic' or 'random'");
  }
  if (j.contains("blend")) {
    const auto b = text(j.at("blend"), "solver.blend");
    if (b == "midpoint") s.blend = BlendRule::Midpoint;
    else if (b == "weighted") s.blend = BlendRule::Weighted;
    else throw ConfigError("solver.blend: expected 'midpoint' or 'weighted'");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw ConfigError("solver.seed: expected a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("max_sweeps")) {
    s.max_sweeps = integer(j.at("max_sweeps"), "solver.max_sweeps");
    if (s.max_sweeps < 0) throw ConfigError("solver.max_sweeps: must be non-negative");
  }
  s.residual_tol = number_or(j, "residual_tol", s.residual_tol, "solver");
  s.keep_tol = number_or(j, "keep_tol", s.keep_tol, "solver");
  if (!(s.residual_tol > 0.0)) throw ConfigError("solver.residual_tol: must be positive");
  if (!(s.keep_tol >= 0.0 && s.keep_tol <= 1.0)) throw ConfigError("solver.keep_tol: must lie in [0, 1]");
}

}  // namespace

RunConfig parse_config_text(const std::string& content, const std::filesystem::path& base_dir) {
  json j;
  try {
    j = json::parse(content, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  check_keys(j, {"description", "domain", "frame", "hamiltonian", "stencil_radius", "quadrature", "boundary",
                 "lambda", "source", "direction", "subset", "solver", "output_dir", "seed"},
             "config");
  RunConfig cfg;
  try {
    if (j.contains("frame")) cfg.frame = text(j.at("frame"), "frame");
    if (!j.contains("domain")) throw ConfigError("config: 'domain' is required");
    parse_domain(j.at("domain"), cfg, base_dir);
    const int n = static_cast<int>(cfg.domain.lo.size());
    const FramePtr frame = make_frame(cfg.frame, n);

    const json hj = j.contains("hamiltonian") ? j.at("hamiltonian") : json{{"type", "pnorm"}};
    cfg.hamiltonian = parse_hamiltonian(hj, frame->m(), base_dir, "hamiltonian", n);
    cfg.hamiltonian_desc = hj.dump();

    if (j.contains("stencil_radius")) {
      cfg.stencil.radius = integer(j.at("stencil_radius"), "stencil_radius");
      if (cfg.stencil.radius < 1 || cfg.stencil.radius > 8) throw ConfigError("stencil_radius: must lie in 1..8");
    }
    if (j.contains("quadrature")) {
      const auto q = text(j.at("quadrature"), "quadrature");
      if (q == "midpoint") cfg.quadrature = Quadrature::Midpoint;
      else if (q == "trapezoid") cfg.quadrature = Quadrature::Trapezoid;
      else throw ConfigError("quadrature: expected 'midpoint' or 'trapezoid'");
    }
    if (j.contains("boundary")) cfg.boundary = parse_boundary(j.at("boundary"), n, base_dir);
    if (j.contains("lambda")) {
      cfg.lambda = number(j.at("lambda"), "lambda");
      if (!(cfg.lambda >= 0.0)) throw ConfigError("lambda: must be non-negative");
    }
    if (j.contains("source")) cfg.source = vector_of(j.at("source"), "source", n);
    if (j.contains("direction")) {
      const auto d = text(j.at("direction"), "direction");
      if (d == "from") cfg.direction = Direction::From;
      else if (d == "to") cfg.direction = Direction::To;
      else throw ConfigError("direction: expected 'from' or 'to'");
    }
    if (j.contains("subset")) {
      cfg.subset = text(j.at("subset"), "subset");
      if (cfg.subset != "boundary" && cfg.subset != "all") throw ConfigError("subset: expected 'boundary' or 'all'");
    }
    cfg.solver.quad = cfg.quadrature;
    if (j.contains("solver")) parse_solver(j.at("solver"), cfg.solver);
    cfg.solver.quad = cfg.quadrature;
    if (j.contains("output_dir")) cfg.output_dir = base_dir / text(j.at("output_dir"), "output_dir");
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) throw ConfigError("seed: expected a non-negative integer");
      cfg.seed = j.at("seed").get<std::uint64_t>();
      if (!j.contains("solver") || !j.at("solver").contains("seed")) cfg.solver.seed = cfg.seed;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ContractError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig parse_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path.parent_path());
}

Problem build_problem(const RunConfig& config) {
  Problem p;
  try {
    p.frame = make_frame(config.frame, static_cast<int>(config.domain.lo.size()));
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
  p.domain = std::make_shared<const GridDomain>(GridDomain::build(config.domain));
  p.graph = std::make_shared<const DirectedGraph>(DirectedGraph::build(p.domain, p.frame, config.stencil));
  return p;
}

BoundaryFunction boundary_function(const RunConfig& config, const GridDomain& domain) {
  if (!config.boundary) throw ConfigError("config: no 'boundary' entry");
  const BoundarySpec& b = *config.boundary;
  if (b.expression) {
    const Expression e = *b.expression;
    return BoundaryFunction::sample(domain, [&e](const Vec& x) { return e(x); });
  }
  try {
    return BoundaryFunction::from_points(domain, b.points, b.values);
  } catch (const ContractError& e) {
    throw ConfigError(std::string("boundary.csv: ") + e.what());
  }
}

}  // namespace linf
