#include "linf/verify.hpp"

#include "linf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <random>
#include <sstream>

namespace linf {

namespace {

constexpr double kRoundoff = 1e-12;

std::shared_ptr<const GridDomain> make_domain(ShapeKind shape, const Vec& lo, const Vec& hi, const Vec& spacing,
                                              double radius = 1.0) {
  DomainSpec spec;
  spec.shape = shape;
  spec.lo = lo;
  spec.hi = hi;
  spec.spacing = spacing;
  spec.center = Vec::Zero(lo.size());
  spec.radius = radius;
  return std::make_shared<const GridDomain>(GridDomain::build(spec));
}

DirectedGraph euclidean_graph(const Vec& lo, const Vec& hi, double h, int stencil) {
  auto d = make_domain(ShapeKind::Box, lo, hi, Vec::Constant(lo.size(), h));
  return DirectedGraph::build(d, std::make_shared<EuclideanFrame>(static_cast<int>(lo.size())), {stencil});
}

ScalarField to_field(const DistanceField& f, std::string provenance) {
  ScalarField u;
  u.values = f.values;
  u.domain_fingerprint = f.domain_fingerprint;
  u.provenance = std::move(provenance);
  u.level = f.level;
  return u;
}

std::vector<VertexId> sample_sources(std::size_t n, const DualOptions& o) {
  std::vector<VertexId> ids(n);
  std::iota(ids.begin(), ids.end(), 0);
  if (n <= o.exhaustive_limit) return ids;
  std::mt19937_64 rng(o.seed);
  std::shuffle(ids.begin(), ids.end(), rng);
  ids.resize(std::min(n, o.source_budget));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

}  // namespace

bool SuiteReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

void SuiteReport::add(std::string name, bool ok, double value, double limit, std::string detail) {
  checks.push_back({std::move(name), ok, value, limit, std::move(detail)});
}

double measure_c1(double h, int stencil_radius, std::size_t pairs, std::uint64_t seed) {
  const auto g = euclidean_graph(make_vec({0, 0}), make_vec({1, 1}), h, stencil_radius);
  const PNormHamiltonian norm(2);
  const auto costs = edge_costs(g, norm, 1.0);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(g.vertex_count()) - 1);
  std::vector<std::pair<VertexId, VertexId>> sample;
  while (sample.size() < pairs) {
    const VertexId a = pick(rng), b = pick(rng);
    if (a != b) sample.emplace_back(a, b);
  }
  std::vector<double> err(pairs, 0.0);
  parallel_for(pairs, [&](std::size_t i) {
    const auto [a, b] = sample[i];
    const double d = dist_from(g, costs, a)[b];
    err[i] = std::fabs(d - (g.domain().coord(a) - g.domain().coord(b)).norm());
  });
  return *std::max_element(err.begin(), err.end()) / h;
}

double lambda_star(const ScalarField& u, const GridDomain& domain, const Frame& frame, const Hamiltonian& h) {
  return energy(u, domain, frame, h).headline;
}

double lambda_dual(const ScalarField& u, const DirectedGraph& graph, const Hamiltonian& h, const DualOptions& o) {
  if (u.size() != graph.vertex_count() || u.domain_fingerprint != graph.domain().fingerprint())
    throw ContractError("lambda_dual: field belongs to a different domain");
  if (!(o.rel_tol > 0.0)) throw ContractError("lambda_dual: tolerance must be positive");
  const auto sources = sample_sources(graph.vertex_count(), o);
  const std::size_t nv = graph.vertex_count();

  // Largest violation of u(y) - u(x) <= d(x, y) over the tested pairs.
  auto worst = [&](const std::vector<double>& costs, bool ratio) {
    std::vector<double> per(sources.size(), 0.0);
    parallel_for(sources.size(), [&](std::size_t i) {
      const VertexId x = sources[i];
      const auto d = dist_from(graph, costs, x);
      double best = ratio ? 0.0 : -kInf;
      for (std::size_t y = 0; y < nv; ++y) {
        if (static_cast<VertexId>(y) == x) continue;
        const double rise = u.values[y] - u[x];
        const double allow = kRoundoff * std::max({1.0, std::fabs(u.values[y]), std::fabs(u[x])});
        if (ratio) {
          if (rise <= allow) continue;
          best = std::max(best, d.values[y] > 0.0 ? rise / d.values[y] : kInf);
        } else {
          best = std::max(best, rise - d.values[y] - allow * std::max(1.0, std::isfinite(d.values[y]) ? d.values[y] : 0.0));
        }
      }
      per[i] = best;
    });
    return *std::max_element(per.begin(), per.end());
  };

  if (h.level_homogeneous()) {
    const double r = worst(edge_costs(graph, h, 1.0, o.quad), true);
    if (!std::isfinite(r)) throw ContractError("lambda_dual: no feasible level");
    return r;
  }
  auto feasible = [&](double lambda) { return worst(edge_costs(graph, h, lambda, o.quad), false) <= 0.0; };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1048576.0) throw ContractError("lambda_dual: bracket cap exceeded");
  }
  while (hi - lo > o.rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

RademacherReport rademacher_report(const ScalarField& u, const DirectedGraph& graph, const Hamiltonian& h,
                                   double tolerance, const DualOptions& options) {
  RademacherReport r;
  const auto e = energy(u, graph.domain(), graph.frame(), h);
  r.lambda_star = e.headline;
  r.lambda_star_with_one_sided = e.with_one_sided;
  r.lambda_dual = lambda_dual(u, graph, h, options);
  r.lambda_h = lambda_h(h, 1e-9);
  if (r.lambda_h <= 1e-8) r.lambda_h = 0.0;
  r.gap = std::fabs(std::max(r.lambda_h, r.lambda_star) - std::max(r.lambda_h, r.lambda_dual));
  r.tolerance = tolerance;
  r.pass = r.gap <= tolerance;
  return r;
}

DistanceMatrix floyd_warshall_oracle(const DirectedGraph& graph, const std::vector<double>& costs) {
  const std::size_t n = graph.vertex_count();
  if (n > 500) throw ContractError("floyd_warshall_oracle: more than 500 vertices");
  DistanceMatrix m;
  m.n = n;
  m.values.assign(n * n, kInf);
  for (std::size_t i = 0; i < n; ++i) m.values[i * n + i] = 0.0;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    const auto a = static_cast<std::size_t>(graph.source(static_cast<EdgeId>(e)));
    const auto b = static_cast<std::size_t>(graph.target(static_cast<EdgeId>(e)));
    m.values[a * n + b] = std::min(m.values[a * n + b], costs[e]);
  }
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      const double ik = m.values[i * n + k];
      if (ik == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = ik + m.values[k * n + j];
        if (cand < m.values[i * n + j]) m.values[i * n + j] = cand;
      }
    }
  return m;
}

SuiteReport counterexample_floor(double h) {
  SuiteReport rep;
  rep.suite = "counterexample-floor";
  const auto g = euclidean_graph(make_vec({-1, -1}), make_vec({1, 1}), h, 1);
  const FloorNormHamiltonian floor_norm(2);
  const VertexId z = g.domain().nearest_vertex(make_vec({0, 0}));
  const auto cc = cc_distance(g, z);
  const auto d05 = dist_from(g, floor_norm, 0.5, z);
  const bool identical = cc.values.size() == d05.values.size() &&
                         std::memcmp(cc.values.data(), d05.values.data(), cc.values.size() * sizeof(double)) == 0;
  rep.add("floor d_0.5 equals d_CC bitwise", identical, identical ? 0.0 : 1.0, 0.0);
  rep.add("floor norm declared not lower semicontinuous", !floor_norm.lower_semicontinuous(), 0.0, 0.0);

  const auto r = rademacher_report(to_field(cc, "cc-distance"), g, floor_norm, 0.0);
  rep.add("lambda* of d_CC under floor norm", r.lambda_star >= 0.95, r.lambda_star, 0.95, ">= limit");
  rep.add("lambda_dual of d_CC under floor norm", r.lambda_dual <= 0.55, r.lambda_dual, 0.55, "<= limit");
  rep.add("Rademacher gap", r.gap >= 0.4, r.gap, 0.4, "identity fails: gap >= limit");
  return rep;
}

SuiteReport counterexample_halfdisk(double h) {
  SuiteReport rep;
  rep.suite = "counterexample-halfdisk";
  auto dom = make_domain(ShapeKind::Disk, make_vec({-1, -1}), make_vec({1, 1}), make_vec({h, h}));
  const auto g = DirectedGraph::build(dom, std::make_shared<EuclideanFrame>(2), {1});
  const HalfDiskHamiltonian half;
  const double r_inner = half.radii(1.0).r_inner;
  rep.add("inner radius at level 1 is zero", r_inner == 0.0, r_inner, 0.0);
  const double lh = lambda_h(half, 1e-6);
  rep.add("lambda_H = 2", std::fabs(lh - 2.0) <= 1e-3, lh, 1e-3, "|lambda_H - 2| <= limit");

  const VertexId o = dom->nearest_vertex(make_vec({0, 0}));
  const auto costs = edge_costs(g, half, 1.0);
  const auto from_o = dist_from(g, costs, o);
  const auto to_o = dist_to(g, costs, o);
  double worst_left = 0.0, worst_ratio = kInf;
  for (std::size_t v = 0; v < dom->size(); ++v) {
    const Vec x = dom->coord(static_cast<VertexId>(v));
    if (std::fabs(x(1)) > 1e-12 || !(x(0) < 0.0) || !(x(0) > -0.9)) continue;
    worst_left = std::max(worst_left, from_o.values[v]);
    worst_ratio = std::min(worst_ratio, to_o.values[v] / std::fabs(x(0)));
  }
  rep.add("leftward distance d_1(o,(a,0)), a in (-0.9,0)", worst_left <= h, worst_left, h, "<= h");
  rep.add("rightward distance d_1((a,0),o) / |a|", worst_ratio >= 0.9, worst_ratio, 0.9, ">= limit");
  const VertexId p = dom->nearest_vertex(make_vec({-0.5, 0}));
  const double forward = from_o[p], backward = to_o[p];
  rep.add("d_1(o,(-0.5,0))", forward <= 0.02, forward, 0.02);
  rep.add("d_1((-0.5,0),o)", backward >= 0.45 && backward <= 0.55, backward, 0.55, "within [0.45, 0.55]");
  const double ratio = forward > 0.0 ? backward / forward : kInf;
  rep.add("asymmetry ratio", ratio >= 10.0, ratio, 10.0, ">= limit");
  return rep;
}

SuiteReport bound_suite(const DirectedGraph& graph, const Hamiltonian& h, const BoundSpec& spec) {
  SuiteReport rep;
  rep.suite = "bounds";
  std::vector<double> lambdas(spec.lambdas);
  std::sort(lambdas.begin(), lambdas.end());
  const std::size_t nv = graph.vertex_count();
  if (nv < 2) throw ContractError("bound_suite: graph too small");

  std::mt19937_64 rng(spec.seed);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(nv) - 1);
  std::vector<std::pair<VertexId, VertexId>> pairs;
  while (pairs.size() < spec.pairs) {
    const VertexId a = pick(rng), b = pick(rng);
    if (a != b) pairs.emplace_back(a, b);
  }
  std::vector<VertexId> sources;
  for (const auto& p : pairs) sources.push_back(p.first);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  auto slot = [&](VertexId s) {
    return static_cast<std::size_t>(std::lower_bound(sources.begin(), sources.end(), s) - sources.begin());
  };

  // rows[l][i] = distance field from sources[i] at lambdas[l]; l = lambdas.size() is d_CC.
  const PNormHamiltonian unit(graph.frame().m());
  std::vector<std::vector<std::vector<double>>> rows(lambdas.size() + 1,
                                                     std::vector<std::vector<double>>(sources.size()));
  for (std::size_t l = 0; l <= lambdas.size(); ++l) {
    const auto costs = l < lambdas.size() ? edge_costs(graph, h, lambdas[l], spec.quad) : edge_costs(graph, unit, 1.0);
    parallel_for(sources.size(), [&](std::size_t i) { rows[l][i] = dist_from(graph, costs, sources[i]).values; });
  }
  const auto& cc = rows[lambdas.size()];

  std::size_t lower_bad = 0, upper_bad = 0, mono_bad = 0, checked = 0;
  for (std::size_t l = 0; l < lambdas.size(); ++l) {
    const auto radii = h.radii(lambdas[l]);
    for (const auto& [a, b] : pairs) {
      const std::size_t i = slot(a);
      const double d = rows[l][i][static_cast<std::size_t>(b)];
      const double dcc = cc[i][static_cast<std::size_t>(b)];
      ++checked;
      if (radii.r_inner > 0.0 && radii.r_inner * dcc > d) ++lower_bad;
      if (d > radii.r_outer * dcc) ++upper_bad;
      if (l + 1 < lambdas.size() && d > rows[l + 1][i][static_cast<std::size_t>(b)]) ++mono_bad;
    }
  }
  rep.add("comparability lower bound violations", lower_bad == 0, static_cast<double>(lower_bad), 0.0,
          std::to_string(checked) + " pair-levels");
  rep.add("comparability upper bound violations", upper_bad == 0, static_cast<double>(upper_bad), 0.0,
          std::to_string(checked) + " pair-levels");
  rep.add("lambda monotonicity violations", mono_bad == 0, static_cast<double>(mono_bad), 0.0,
          std::to_string(lambdas.size()) + " levels");

  std::size_t mid_bad = 0, mid_checked = 0;
  double worst_excess = -kInf;
  for (double lambda : lambdas) {
    const auto costs = edge_costs(graph, h, lambda, spec.quad);
    const double max_cost = costs.empty() ? 0.0 : *std::max_element(costs.begin(), costs.end());
    auto judge = [&](double defect, double d) {
      ++mid_checked;
      const double excess = defect - max_cost;
      worst_excess = std::max(worst_excess, excess);
      if (excess > kRoundoff * std::max(1.0, d)) ++mid_bad;
    };
    if (nv <= 225) {
      std::vector<VertexId> all(nv);
      std::iota(all.begin(), all.end(), 0);
      const auto d = all_pairs(graph, costs, all);
      for (std::size_t x = 0; x < nv; ++x)
        for (std::size_t y = 0; y < nv; ++y) {
          const double dxy = d(x, y);
          if (!std::isfinite(dxy)) continue;
          double best = kInf;
          for (std::size_t z = 0; z < nv; ++z) best = std::min(best, std::max(d(x, z), d(z, y)));
          judge(best - 0.5 * dxy, dxy);
        }
    } else {
      for (const auto& [a, b] : pairs) {
        const auto fx = dist_from(graph, costs, a);
        if (!std::isfinite(fx[b])) continue;
        judge(midpoint_defect(fx, dist_to(graph, costs, b), b), fx[b]);
      }
    }
  }
  rep.add("midpoint defect above max edge cost", mid_bad == 0, static_cast<double>(mid_bad), 0.0,
          std::to_string(mid_checked) + " pairs, worst excess " + fmt(worst_excess));
  return rep;
}

SuiteReport oracle_suite(std::size_t configs, std::uint64_t seed) {
  SuiteReport rep;
  rep.suite = "oracle";
  std::mt19937_64 rng(seed);
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const double levels[] = {0.5, 1.0, 1.5, 2.5};
  double worst = 0.0;
  for (std::size_t c = 0; c < configs; ++c) {
    const bool heisenberg = c % 2 == 1;
    const int stencil = uniform(1, 2);
    const double lambda = levels[uniform(0, 3)];
    const int which = uniform(0, 2);
    HamiltonianPtr ham;
    if (which == 0) ham = std::make_shared<PNormHamiltonian>(2);
    else if (which == 1) ham = std::make_shared<HalfDiskHamiltonian>();
    else ham = std::make_shared<FloorNormHamiltonian>(2);

    std::shared_ptr<const GridDomain> dom;
    FramePtr frame;
    if (heisenberg) {
      frame = std::make_shared<HeisenbergFrame>();
      const double h = 0.25;
      const int nx = uniform(3, 5), ny = uniform(3, 5), nz = uniform(5, 17);
      dom = make_domain(ShapeKind::Box, make_vec({0, 0, 0}),
                        make_vec({(nx - 1) * h, (ny - 1) * h, (nz - 1) * h * h / 2}), frame->lattice_spacing(h));
    } else {
      frame = std::make_shared<EuclideanFrame>(2);
      const double h = 0.1;
      const int nx = uniform(3, 20), ny = uniform(3, 20);
      dom = make_domain(ShapeKind::Box, make_vec({0, 0}), make_vec({(nx - 1) * h, (ny - 1) * h}),
                        make_vec({h, h}));
    }
    const auto g = DirectedGraph::build(dom, frame, {stencil});
    const auto costs = edge_costs(g, *ham, lambda);
    std::vector<VertexId> all(g.vertex_count());
    std::iota(all.begin(), all.end(), 0);
    const auto dij = all_pairs(g, costs, all);
    const auto fw = floyd_warshall_oracle(g, costs);
    double diff = 0.0;
    for (std::size_t i = 0; i < dij.values.size(); ++i) {
      const double a = dij.values[i], b = fw.values[i];
      if (a == b) continue;
      diff = std::max(diff, std::isfinite(a) && std::isfinite(b) ? std::fabs(a - b) : kInf);
    }
    worst = std::max(worst, diff);
    std::ostringstream os;
    os << frame->name() << " " << ham->name() << " lambda=" << lambda << " s=" << stencil << " V=" << g.vertex_count();
    rep.add("config " + std::to_string(c), diff <= 1e-12, diff, 1e-12, os.str());
  }
  return rep;
}

SuiteReport rademacher_suite(double h, int stencil_radius, const ToleranceModel& tol) {
  SuiteReport rep;
  rep.suite = "rademacher";
  const auto g = euclidean_graph(make_vec({0, 0}), make_vec({1, 1}), h, stencil_radius);
  const GridDomain& d = g.domain();
  const auto norm = std::make_shared<PNormHamiltonian>(2);
  Mat a(2, 2);
  a << 1, 0, 0, 4;
  const auto aniso = std::make_shared<AnisotropicQuadratic>(a);

  auto linear = [&](double a1, double a2) {
    return sample_field(d, [=](const Vec& x) { return a1 * x(0) + a2 * x(1); }, "linear");
  };
  auto cone = [&](const Hamiltonian& ham, double lambda, double z1, double z2) {
    return to_field(dist_from(g, ham, lambda, d.nearest_vertex(make_vec({z1, z2}))), "cone");
  };
  struct Case {
    std::string name;
    HamiltonianPtr ham;
    ScalarField u;
  };
  std::vector<Case> cases;
  cases.push_back({"pnorm linear (1,0.5)", norm, linear(1.0, 0.5)});
  cases.push_back({"pnorm linear (-0.3,0.8)", norm, linear(-0.3, 0.8)});
  cases.push_back({"pnorm cone level 1", norm, cone(*norm, 1.0, 0.5, 0.5)});
  cases.push_back({"pnorm cone level 2", norm, cone(*norm, 2.0, 0.2, 0.7)});
  cases.push_back({"pnorm blend cone+linear", norm, blend(cone(*norm, 1.0, 0.5, 0.5), linear(1.0, 0.5), 0.5)});
  cases.push_back({"pnorm blend two cones", norm, blend(cone(*norm, 1.0, 0.3, 0.3), cone(*norm, 1.0, 0.7, 0.6), 0.5)});
  cases.push_back({"anisotropic linear (1,0.5)", aniso, linear(1.0, 0.5)});
  cases.push_back({"anisotropic linear (0.2,-0.6)", aniso, linear(0.2, -0.6)});
  cases.push_back({"anisotropic cone level 1", aniso, cone(*aniso, 1.0, 0.4, 0.6)});
  cases.push_back({"anisotropic blend cone+linear", aniso, blend(cone(*aniso, 1.0, 0.4, 0.6), linear(0.2, -0.6), 0.5)});

  for (const auto& c : cases) {
    const auto probe = rademacher_report(c.u, g, *c.ham, 0.0);
    const double limit = 0.05 * std::max(probe.lambda_star, 0.1) + tol.tol(h);
    std::ostringstream os;
    os << "lambda*=" << fmt(probe.lambda_star) << " lambda_dual=" << fmt(probe.lambda_dual);
    rep.add(c.name, probe.gap <= limit, probe.gap, limit, os.str());
  }
  rep.measured_c1 = measure_c1(h, stencil_radius);
  return rep;
}

}  // namespace linf
