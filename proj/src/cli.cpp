#include "linf/cli.hpp"

#include "linf/amle.hpp"
#include "linf/config.hpp"
#include "linf/extension.hpp"
#include "linf/io.hpp"
#include "linf/parallel.hpp"
#include "linf/verify.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <sstream>

namespace linf {

namespace {

using nlohmann::ordered_json;

ordered_json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

std::string hex(std::uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

ordered_json vec_json(const Vec& x) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < x.size(); ++i) a.push_back(num(x(i)));
  return a;
}

struct Overrides {
  std::string config;
  std::string output;
  std::optional<double> lambda;
  std::vector<double> source;
  std::string direction;
  std::optional<std::uint64_t> seed;
  std::vector<double> radii;
  std::optional<int> max_sweeps;
  bool emit_plot = false;
};

RunConfig load(const Overrides& o) {
  RunConfig cfg = parse_config(o.config);
  const int n = static_cast<int>(cfg.domain.lo.size());
  if (o.lambda) {
    if (!(*o.lambda >= 0.0) || !std::isfinite(*o.lambda)) throw ConfigError("--lambda: must be non-negative");
    cfg.lambda = *o.lambda;
  }
  if (!o.source.empty()) {
    if (static_cast<int>(o.source.size()) != n) throw ConfigError("--source: expected " + std::to_string(n) + " coordinates");
    Vec s(n);
    for (int k = 0; k < n; ++k) s(k) = o.source[static_cast<std::size_t>(k)];
    cfg.source = s;
  }
  if (!o.direction.empty()) {
    if (o.direction == "from") cfg.direction = Direction::From;
    else if (o.direction == "to") cfg.direction = Direction::To;
    else throw ConfigError("--direction: expected 'from' or 'to'");
  }
  if (o.seed) cfg.solver.seed = cfg.seed = *o.seed;
  if (!o.radii.empty()) {
    for (double r : o.radii)
      if (!(r >= 2.0)) throw ConfigError("--radii: radii must be at least 2");
    cfg.solver.radii = o.radii;
  }
  if (o.max_sweeps) {
    if (*o.max_sweeps < 0) throw ConfigError("--max-sweeps: must be non-negative");
    cfg.solver.max_sweeps = *o.max_sweeps;
  }
  if (!o.output.empty()) cfg.output_dir = o.output;
  return cfg;
}

ordered_json metadata(const RunConfig& cfg, const Problem& p, const std::string& provenance) {
  ordered_json m;
  m["version"] = kVersion;
  m["provenance"] = provenance;
  m["frame"] = cfg.frame;
  m["hamiltonian"] = ordered_json::parse(cfg.hamiltonian_desc);
  m["h"] = num(cfg.h);
  m["spacing"] = vec_json(p.domain->spacing());
  m["stencil_radius"] = cfg.stencil.radius;
  m["quadrature"] = to_string(cfg.quadrature);
  m["vertices"] = p.domain->size();
  m["boundary_vertices"] = p.domain->boundary().size();
  m["edges"] = p.graph->edge_count();
  m["domain_fingerprint"] = hex(p.domain->fingerprint());
  return m;
}

VertexId source_vertex(const RunConfig& cfg, const GridDomain& domain) {
  const Vec x = cfg.source ? *cfg.source : Vec(0.5 * (cfg.domain.lo + cfg.domain.hi));
  const VertexId v = domain.closest_vertex(x);
  if (v == kNoVertex) throw ContractError("source: domain has no vertices");
  return v;
}

void add_field(OutputBundle& out, const std::string& stem, const GridDomain& domain,
               const std::vector<double>& values, bool plot) {
  out.add(stem + ".csv", field_csv(domain, values));
  if (plot && domain.dim() <= 2) out.add(stem + ".dat", field_gnuplot(domain, values));
}

void finish(const OutputBundle& out, std::chrono::steady_clock::time_point start) {
  for (const auto& path : out.commit()) std::cout << "wrote " << path.lexically_normal().string() << "\n";
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::cout << "wall time " << secs << " s\n";
}

int cmd_distance(const Overrides& o, bool cc) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(o);
  const Problem p = build_problem(cfg);
  const VertexId s = source_vertex(cfg, *p.domain);
  DistanceField d;
  if (cc) {
    d = cc_distance(*p.graph, s);
  } else {
    d = cfg.direction == Direction::From ? dist_from(*p.graph, *cfg.hamiltonian, cfg.lambda, s, cfg.quadrature)
                                         : dist_to(*p.graph, *cfg.hamiltonian, cfg.lambda, s, cfg.quadrature);
  }
  const std::string stem = cc ? "cc_distance" : "distance";
  OutputBundle out(cfg.output_dir);
  add_field(out, stem, *p.domain, d.values, o.emit_plot);
  ordered_json meta = metadata(cfg, p, stem);
  meta["lambda"] = num(cc ? 1.0 : cfg.lambda);
  meta["direction"] = d.direction == Direction::From ? "from" : "to";
  meta["source"] = vec_json(p.domain->coord(s));
  std::size_t unreachable = 0;
  double max_finite = 0.0;
  for (double v : d.values) {
    if (std::isinf(v)) ++unreachable;
    else max_finite = std::max(max_finite, v);
  }
  meta["unreachable"] = unreachable;
  meta["max_finite"] = num(max_finite);
  if (!d.warning.empty()) meta["warning"] = d.warning;
  out.add(stem + ".json", dump(meta));
  std::cout << stem << ": " << p.domain->size() << " vertices, max finite " << max_finite << ", unreachable "
            << unreachable << "\n";
  if (!d.warning.empty()) std::cout << "warning: " << d.warning << "\n";
  finish(out, start);
  return 0;
}

int cmd_all_pairs(const Overrides& o) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(o);
  const Problem p = build_problem(cfg);
  std::vector<VertexId> subset;
  if (cfg.subset == "all") {
    for (std::size_t v = 0; v < p.domain->size(); ++v) subset.push_back(static_cast<VertexId>(v));
  } else {
    subset.assign(p.domain->boundary().begin(), p.domain->boundary().end());
  }
  const auto costs = edge_costs(*p.graph, *cfg.hamiltonian, cfg.lambda, cfg.quadrature);
  const DistanceMatrix m = all_pairs(*p.graph, costs, subset);
  std::ostringstream csv;
  csv << "source";
  for (std::size_t j = 0; j < subset.size(); ++j) csv << "," << j;
  csv << "\n";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    csv << i;
    for (std::size_t j = 0; j < subset.size(); ++j) csv << "," << format_double(m(i, j));
    csv << "\n";
  }
  std::ostringstream idx;
  idx << "index";
  for (int k = 0; k < p.domain->dim(); ++k) idx << ",x" << k + 1;
  idx << "\n";
  for (std::size_t i = 0; i < subset.size(); ++i) {
    idx << i;
    const Vec x = p.domain->coord(subset[i]);
    for (int k = 0; k < p.domain->dim(); ++k) idx << "," << format_double(x(k));
    idx << "\n";
  }
  OutputBundle out(cfg.output_dir);
  out.add("all_pairs.csv", csv.str());
  out.add("all_pairs_vertices.csv", idx.str());
  ordered_json meta = metadata(cfg, p, "all-pairs");
  meta["lambda"] = num(cfg.lambda);
  meta["subset"] = cfg.subset;
  meta["size"] = subset.size();
  out.add("all_pairs.json", dump(meta));
  std::cout << "all-pairs: " << subset.size() << " x " << subset.size() << " matrix\n";
  finish(out, start);
  return 0;
}

ordered_json mu_json(const CompatibilityResult& r, const GridDomain& d) {
  ordered_json j;
  j["mu"] = num(r.mu);
  j["method"] = r.method;
  j["iterations"] = r.iterations;
  j["tolerance"] = num(r.tolerance);
  j["lambda_h"] = num(r.lambda_h);
  if (r.witness_x != kNoVertex) j["witness_x"] = vec_json(d.coord(r.witness_x));
  if (r.witness_y != kNoVertex) j["witness_y"] = vec_json(d.coord(r.witness_y));
  return j;
}

MuOptions mu_options(const RunConfig& cfg) {
  MuOptions opt;
  opt.quad = cfg.quadrature;
  return opt;
}

int cmd_mu(const Overrides& o) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(o);
  const Problem p = build_problem(cfg);
  const BoundaryFunction g = boundary_function(cfg, *p.domain);
  const CompatibilityResult r = mu_threshold(g, *p.graph, *cfg.hamiltonian, mu_options(cfg));
  OutputBundle out(cfg.output_dir);
  ordered_json j = metadata(cfg, p, "mu");
  j["boundary"] = cfg.boundary->source;
  j["result"] = mu_json(r, *p.domain);
  out.add("mu.json", dump(j));
  std::cout << "mu = " << format_double(r.mu) << " (" << r.method << ", " << r.iterations << " iterations)\n";
  finish(out, start);
  return 0;
}

int cmd_mcshane(const Overrides& o) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(o);
  const Problem p = build_problem(cfg);
  const BoundaryFunction g = boundary_function(cfg, *p.domain);
  const CompatibilityResult r = mu_threshold(g, *p.graph, *cfg.hamiltonian, mu_options(cfg));
  const ScalarField up = mcshane_upper(g, *p.graph, *cfg.hamiltonian, r.mu, cfg.quadrature);
  const ScalarField lo = mcshane_lower(g, *p.graph, *cfg.hamiltonian, r.mu, cfg.quadrature);
  OutputBundle out(cfg.output_dir);
  add_field(out, "mcshane_upper", *p.domain, up.values, o.emit_plot);
  add_field(out, "mcshane_lower", *p.domain, lo.values, o.emit_plot);
  ordered_json j = metadata(cfg, p, "mcshane");
  j["boundary"] = cfg.boundary->source;
  j["result"] = mu_json(r, *p.domain);
  const EnergyReport eu = energy(up, *p.domain, *p.frame, *cfg.hamiltonian);
  const EnergyReport el = energy(lo, *p.domain, *p.frame, *cfg.hamiltonian);
  j["energy_upper"] = num(eu.headline);
  j["energy_lower"] = num(el.headline);
  double band = 0.0;
  for (std::size_t v = 0; v < up.size(); ++v) band = std::max(band, up.values[v] - lo.values[v]);
  j["band_width"] = num(band);
  out.add("mcshane.json", dump(j));
  std::cout << "mu = " << format_double(r.mu) << ", energy(S+) = " << eu.headline << ", energy(S-) = " << el.headline
            << ", band width " << band << "\n";
  finish(out, start);
  return 0;
}

std::string trace_plot(const SolverReport& r) {
  std::ostringstream os;
  os << "# sweep graph_energy gradient_energy residual mean_violation band\n";
  for (std::size_t i = 0; i < r.energy_trace.size(); ++i) {
    auto at = [i](const std::vector<double>& v) {
      return i < v.size() ? format_double(v[i]) : std::string("nan");
    };
    os << i << " " << at(r.energy_trace) << " " << at(r.gradient_energy_trace) << " " << at(r.residual_trace) << " "
       << at(r.mean_violation_trace) << " " << at(r.band_trace) << "\n";
  }
  return os.str();
}

int cmd_amle(const Overrides& o) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(o);
  const Problem p = build_problem(cfg);
  const BoundaryFunction g = boundary_function(cfg, *p.domain);
  const AmleResult res = solve_amle(g, *p.graph, *cfg.hamiltonian, cfg.solver);
  const SolverReport& r = res.report;
  const EnergyReport e = energy(res.u, *p.domain, *p.frame, *cfg.hamiltonian);

  OutputBundle out(cfg.output_dir);
  add_field(out, "amle", *p.domain, res.u.values, o.emit_plot);
  ordered_json j = metadata(cfg, p, res.u.provenance);
  j["boundary"] = cfg.boundary->source;
  ordered_json s;
  s["radii"] = cfg.solver.radii;
  s["order"] = cfg.solver.order == SweepOrder::Random ? "random" : "lexicographic";
  s["blend"] = cfg.solver.blend == BlendRule::Midpoint ? "midpoint" : "weighted";
  s["seed"] = cfg.solver.seed;
  s["max_sweeps"] = cfg.solver.max_sweeps;
  s["residual_tol"] = num(cfg.solver.residual_tol);
  s["keep_tol"] = num(cfg.solver.keep_tol);
  j["solver"] = s;
  ordered_json rep;
  rep["sweeps"] = r.sweeps;
  rep["converged"] = r.converged;
  rep["mu"] = num(r.mu);
  rep["final_residual"] = num(r.final_residual);
  rep["energy"] = num(e.headline);
  rep["graph_energy"] = num(r.energy_trace.empty() ? 0.0 : r.energy_trace.back());
  rep["balls"] = r.balls;
  rep["colors"] = r.colors;
  auto trace = [](const std::vector<double>& v) {
    ordered_json a = ordered_json::array();
    for (double x : v) a.push_back(num(x));
    return a;
  };
  rep["energy_trace"] = trace(r.energy_trace);
  rep["gradient_energy_trace"] = trace(r.gradient_energy_trace);
  rep["residual_trace"] = trace(r.residual_trace);
  rep["mean_violation_trace"] = trace(r.mean_violation_trace);
  rep["band_trace"] = trace(r.band_trace);
  j["report"] = rep;
  out.add("amle_report.json", dump(j));
  if (o.emit_plot) out.add("energy_trace.dat", trace_plot(r));
  std::cout << "amle: " << (r.converged ? "converged" : "not converged") << " after " << r.sweeps
            << " sweeps, residual " << r.final_residual << ", mu " << r.mu << ", energy " << e.headline << "\n";
  finish(out, start);
  return 0;
}

ordered_json suite_json(const SuiteReport& s) {
  ordered_json j;
  j["version"] = kVersion;
  j["suite"] = s.suite;
  j["pass"] = s.pass();
  if (!std::isnan(s.measured_c1)) j["measured_c1"] = num(s.measured_c1);
  ordered_json checks = ordered_json::array();
  for (const auto& c : s.checks) {
    ordered_json cj;
    cj["name"] = c.name;
    cj["pass"] = c.pass;
    cj["value"] = num(c.value);
    cj["limit"] = num(c.limit);
    if (!c.detail.empty()) cj["detail"] = c.detail;
    checks.push_back(cj);
  }
  j["checks"] = checks;
  return j;
}

void print_suite(const SuiteReport& s) {
  for (const auto& c : s.checks)
    std::cout << (c.pass ? "[PASS] " : "[FAIL] ") << s.suite << "/" << c.name << ": " << format_double(c.value)
              << " (limit " << format_double(c.limit) << ")" << (c.detail.empty() ? "" : " " + c.detail) << "\n";
}

SuiteReport default_bounds_fixture() {
  DomainSpec spec;
  spec.lo = make_vec({0.0, 0.0});
  spec.hi = make_vec({1.0, 1.0});
  spec.spacing = make_vec({1.0 / 14.0, 1.0 / 14.0});
  auto domain = std::make_shared<const GridDomain>(GridDomain::build(spec));
  auto graph = std::make_shared<const DirectedGraph>(
      DirectedGraph::build(domain, make_frame("euclidean", 2), StencilSpec{1}));
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 4.0;
  return bound_suite(*graph, AnisotropicQuadratic(a));
}

int cmd_verify(const Overrides& o, const std::string& suite, double h) {
  const auto start = std::chrono::steady_clock::now();
  std::optional<RunConfig> cfg;
  if (!o.config.empty()) cfg = load(o);
  if (!(h > 0.0)) throw ConfigError("--mesh: must be positive");
  std::vector<SuiteReport> reports;
  if (suite == "counterexamples") {
    reports.push_back(counterexample_floor(h));
    reports.push_back(counterexample_halfdisk(h));
  } else if (suite == "rademacher") {
    reports.push_back(rademacher_suite(h));
  } else if (suite == "oracle") {
    reports.push_back(oracle_suite());
  } else if (suite == "bounds") {
    if (cfg) {
      const Problem p = build_problem(*cfg);
      BoundSpec spec;
      spec.quad = cfg->quadrature;
      spec.seed = cfg->seed;
      reports.push_back(bound_suite(*p.graph, *cfg->hamiltonian, spec));
    } else {
      reports.push_back(default_bounds_fixture());
    }
  } else {
    throw ConfigError("--suite: expected rademacher, counterexamples, bounds or oracle");
  }
  const std::filesystem::path dir = !o.output.empty() ? std::filesystem::path(o.output)
                                    : cfg                ? cfg->output_dir
                                                         : std::filesystem::path("out");
  OutputBundle out(dir);
  bool pass = true;
  for (const auto& r : reports) {
    print_suite(r);
    pass = pass && r.pass();
    out.add("verify_" + r.suite + ".json", dump(suite_json(r)));
  }
  std::cout << "suite " << suite << ": " << (pass ? "PASS" : "FAIL") << "\n";
  finish(out, start);
  return pass ? 0 : 1;
}

int cmd_check_hamiltonian(const Overrides& o) {
  const auto start = std::chrono::steady_clock::now();
  const RunConfig cfg = load(o);
  AssumptionSampleSpec spec;
  spec.x_lo = cfg.domain.lo;
  spec.x_hi = cfg.domain.hi;
  spec.seed = cfg.seed;
  const AssumptionReport r = check_assumptions(*cfg.hamiltonian, spec);
  double lh = lambda_h(*cfg.hamiltonian, 1e-9);
  if (lh <= 1e-8) lh = 0.0;
  ordered_json j;
  j["version"] = kVersion;
  j["hamiltonian"] = ordered_json::parse(cfg.hamiltonian_desc);
  j["name"] = r.hamiltonian;
  j["lower_semicontinuous"] = r.lsc_declared;
  j["level_homogeneous"] = cfg.hamiltonian->level_homogeneous();
  j["x_dependent"] = cfg.hamiltonian->x_dependent();
  j["lambda_h"] = num(lh);
  j["checks"] = r.checks;
  ordered_json v = ordered_json::array();
  for (const auto& viol : r.violations) v.push_back({{"kind", viol.kind}, {"detail", viol.detail}});
  j["violations"] = v;
  OutputBundle out(cfg.output_dir);
  out.add("check_hamiltonian.json", dump(j));
  std::cout << r.hamiltonian << ": " << r.checks << " checks, " << r.violations.size() << " violations, lambda_H "
            << lh << (r.lsc_declared ? "" : ", not lower semicontinuous") << "\n";
  for (const auto& viol : r.violations) std::cout << "  " << viol.kind << ": " << viol.detail << "\n";
  finish(out, start);
  return r.ok() ? 0 : 3;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Hamiltonian intrinsic distances, McShane extensions and absolute minimizers on lattices"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  app.fallthrough();
  int threads = 0;
  app.add_option("--threads", threads, "Worker threads (default: LINF_THREADS or hardware concurrency)")
      ->check(CLI::PositiveNumber);

  Overrides o;
  std::string suite;
  double verify_h = 0.02;

  auto common = [&](CLI::App* sub, bool config_required) {
    auto* c = sub->add_option("config", o.config, "Run configuration (JSON)");
    if (config_required) c->required();
    sub->add_option("-o,--output", o.output, "Output directory (overrides output_dir)");
    sub->add_flag("--emit-plot", o.emit_plot, "Also write gnuplot data files");
  };
  auto* distance = app.add_subcommand("distance", "Pseudo-distance field from or to a source vertex");
  auto* cc = app.add_subcommand("cc-distance", "Carnot-Caratheodory distance field from a source vertex");
  auto* pairs = app.add_subcommand("all-pairs", "Distance matrix over the boundary or all vertices");
  auto* mu = app.add_subcommand("mu", "Compatibility threshold of the boundary datum");
  auto* mcshane = app.add_subcommand("mcshane", "Upper and lower McShane extensions");
  auto* amle = app.add_subcommand("amle", "Absolute minimizer by local ball replacement");
  auto* verify = app.add_subcommand("verify", "Run a verification suite");
  auto* check = app.add_subcommand("check-hamiltonian", "Sample the structural assumptions of a Hamiltonian");
  for (auto* sub : {distance, cc, pairs, mu, mcshane, amle, check}) common(sub, true);
  common(verify, false);
  for (auto* sub : {distance, cc}) {
    sub->add_option("--source", o.source, "Source coordinates")->delimiter(',');
  }
  distance->add_option("--lambda", o.lambda, "Level");
  distance->add_option("--direction", o.direction, "from or to");
  pairs->add_option("--lambda", o.lambda, "Level");
  for (auto* sub : {amle, check, mu, mcshane}) sub->add_option("--seed", o.seed, "Random seed");
  amle->add_option("--radii", o.radii, "Ball radii in units of h, coarse to fine")->delimiter(',');
  amle->add_option("--max-sweeps", o.max_sweeps, "Sweep limit");
  verify->add_option("--suite", suite, "rademacher, counterexamples, bounds or oracle")->required();
  verify->add_option("--mesh", verify_h, "Mesh size for the built-in fixtures");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (threads > 0) set_thread_count(threads);

  try {
    if (distance->parsed()) return cmd_distance(o, false);
    if (cc->parsed()) return cmd_distance(o, true);
    if (pairs->parsed()) return cmd_all_pairs(o);
    if (mu->parsed()) return cmd_mu(o);
    if (mcshane->parsed()) return cmd_mcshane(o);
    if (amle->parsed()) return cmd_amle(o);
    if (verify->parsed()) return cmd_verify(o, suite, verify_h);
    if (check->parsed()) return cmd_check_hamiltonian(o);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ContractError& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

}  // namespace linf
