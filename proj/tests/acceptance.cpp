// One [PASS]/[FAIL] line per acceptance criterion; exits nonzero if any
// criterion fails.

#include "linf/amle.hpp"
#include "linf/extension.hpp"
#include "linf/verify.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

using namespace linf;

namespace {

// Pinned tolerances.
constexpr double kOracleTol = 1e-12;
constexpr double kClosedFormRelErr = 0.03;
constexpr double kMcShaneRel = 0.05;
constexpr double kAmleProfileTol = 1e-3;
constexpr double kAmleResidual = 1e-3;
constexpr double kHeisenbergVerticalRel = 0.10;
constexpr double kBallBoxMaxC = 5.0;
constexpr double kSlitMin = 1.0;
const ToleranceModel kTol{};

struct Outcome {
  bool pass = false;
  std::string summary;
};

int failures = 0;

void criterion(int id, const std::string& name, double runtime_limit, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool pass = o.pass;
  std::ostringstream time;
  time << secs << " s";
  if (runtime_limit > 0.0) {
    time << " (limit " << runtime_limit << " s)";
    pass = pass && secs <= runtime_limit;
  }
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s; %s\n", pass ? "PASS" : "FAIL", id, name.c_str(), o.summary.c_str(), time.str().c_str());
  std::fflush(stdout);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::shared_ptr<const GridDomain> box_domain(Vec lo, Vec hi, Vec spacing, ShapeKind shape = ShapeKind::Box) {
  DomainSpec spec;
  spec.shape = shape;
  spec.lo = std::move(lo);
  spec.hi = std::move(hi);
  spec.spacing = std::move(spacing);
  if (shape != ShapeKind::Box) {
    spec.center = make_vec({0.0, 0.0});
    spec.radius = 1.0;
  }
  return std::make_shared<const GridDomain>(GridDomain::build(spec));
}

std::shared_ptr<const DirectedGraph> graph_on(std::shared_ptr<const GridDomain> d, const std::string& frame, int s) {
  const int n = d->dim();
  return std::make_shared<const DirectedGraph>(DirectedGraph::build(std::move(d), make_frame(frame, n), StencilSpec{s}));
}

std::shared_ptr<const DirectedGraph> unit_square(double h, int s) {
  return graph_on(box_domain(make_vec({0, 0}), make_vec({1, 1}), make_vec({h, h})), "euclidean", s);
}

Mat diag14() {
  Mat a = Mat::Zero(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 4.0;
  return a;
}

Outcome from_suite(const SuiteReport& r, const std::function<bool(const Check&)>& select = {}) {
  Outcome o{true, ""};
  std::size_t n = 0;
  for (const auto& c : r.checks) {
    if (select && !select(c)) continue;
    ++n;
    if (!c.pass) {
      o.pass = false;
      o.summary += "failed '" + c.name + "' value " + fmt(c.value) + " limit " + fmt(c.limit) + "; ";
    }
  }
  if (n == 0) return {false, "no checks selected"};
  if (o.pass) o.summary = std::to_string(n) + " checks passed";
  return o;
}

bool name_has(const Check& c, const std::string& s) { return c.name.find(s) != std::string::npos; }

Outcome oracle_equivalence() {
  const auto r = oracle_suite(20, 11);
  double worst = 0.0;
  for (const auto& c : r.checks) worst = std::max(worst, c.value);
  Outcome o = from_suite(r);
  o.pass = o.pass && r.checks.size() >= 20 && worst <= kOracleTol;
  o.summary += ", max |dijkstra - floyd-warshall| = " + fmt(worst);
  return o;
}

Outcome euclidean_closed_form() {
  const double h = 0.02;
  const auto g = unit_square(h, 3);
  const auto& d = g->domain();
  const PNormHamiltonian p(2);
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(d.size()) - 1);
  // 200 pairs from 20 sources.
  std::vector<VertexId> sources;
  while (sources.size() < 20) sources.push_back(pick(rng));
  double worst = 0.0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const auto costs = edge_costs(*g, p, lambda);
    for (VertexId s : sources) {
      const auto field = dist_from(*g, costs, s);
      for (int k = 0; k < 10; ++k) {
        VertexId t = pick(rng);
        while (t == s) t = pick(rng);
        const double exact = lambda * (d.coord(s) - d.coord(t)).norm();
        worst = std::max(worst, std::abs(field[t] - exact) / exact);
      }
    }
  }
  return {worst <= kClosedFormRelErr, "max relative error " + fmt(worst) + " (limit " + fmt(kClosedFormRelErr) + ")"};
}

Outcome comparability() {
  BoundSpec spec;
  spec.pairs = 500;
  const auto r = bound_suite(*unit_square(0.05, 2), AnisotropicQuadratic(diag14()), spec);
  return from_suite(r, [](const Check& c) { return name_has(c, "comparability"); });
}

Outcome monotonicity() {
  BoundSpec spec;
  spec.lambdas = {0.25, 0.5, 1.0, 2.0, 4.0};
  spec.pairs = 500;
  const auto r = bound_suite(*unit_square(0.05, 2), AnisotropicQuadratic(diag14()), spec);
  return from_suite(r, [](const Check& c) { return name_has(c, "monotonicity"); });
}

Outcome midpoint() {
  const auto g = unit_square(1.0 / 14.0, 1);
  if (g->vertex_count() != 225) return {false, "fixture is not 15x15"};
  const auto r = bound_suite(*g, PNormHamiltonian(2));
  return from_suite(r, [](const Check& c) { return name_has(c, "midpoint"); });
}

Outcome floor_counterexample() {
  const auto r = counterexample_floor(0.02);
  Outcome o = from_suite(r);
  for (const auto& c : r.checks)
    if (name_has(c, "gap")) o.summary += ", gap " + fmt(c.value);
  return o;
}

Outcome halfdisk_example() {
  const auto r = counterexample_halfdisk(0.02);
  Outcome o = from_suite(r);
  for (const auto& c : r.checks)
    if (name_has(c, "d_1")) o.summary += ", " + c.name + " = " + fmt(c.value);
  return o;
}

Outcome mcshane_suite() {
  const double h = 0.02;
  const auto g = unit_square(h, 3);
  const auto& d = g->domain();
  const PNormHamiltonian p(2);
  const Vec a = make_vec({1.0, 0.5});
  const auto data = BoundaryFunction::sample(d, [&](const Vec& x) { return a.dot(x); });
  const double mu = mu_threshold(data, *g, p).mu;
  const auto up = mcshane_upper(data, *g, p, mu);
  const auto lo = mcshane_lower(data, *g, p, mu);
  bool trace_exact = true, ordered = true;
  for (std::size_t i = 0; i < d.boundary().size(); ++i)
    trace_exact = trace_exact && up[d.boundary()[i]] == data.values[i] && lo[d.boundary()[i]] == data.values[i];
  for (std::size_t v = 0; v < d.size(); ++v) ordered = ordered && lo.values[v] <= up.values[v];
  const auto& f = g->frame();
  const double eu = energy(up, d, f, p).headline, el = energy(lo, d, f, p).headline;
  const double limit = kMcShaneRel * mu + kTol.c1 * h;
  double combo = 0.0;
  for (const auto& u : {blend(up, lo, 0.5), blend(up, lo, 0.25), pointwise_max(up, lo), pointwise_min(up, lo)})
    combo = std::max(combo, energy(u, d, f, p).headline);
  const bool pass = trace_exact && ordered && std::abs(eu - mu) <= limit && std::abs(el - mu) <= limit &&
                    combo <= mu + kTol.c1 * h;
  return {pass, std::string("trace ") + (trace_exact ? "exact" : "MISMATCH") + ", S- <= S+ " +
                    (ordered ? "holds" : "VIOLATED") + ", mu " + fmt(mu) + " (|a| = " + fmt(a.norm()) + "), energy S+ " +
                    fmt(eu) + ", S- " + fmt(el) + " (|e - mu| limit " + fmt(limit) + "), max over blend/max/min " +
                    fmt(combo) + " (limit " + fmt(mu + kTol.c1 * h) + ")"};
}

Outcome rademacher() {
  const double h = 0.02;
  const auto r = rademacher_suite(h, 5, kTol);
  Outcome o = from_suite(r);
  double worst = 0.0;
  for (const auto& c : r.checks) worst = std::max(worst, c.value / c.limit);
  o.pass = o.pass && r.checks.size() == 10;
  o.summary += ", worst gap / limit " + fmt(worst);
  return o;
}

Outcome amle() {
  std::string summary;
  bool pass = true;
  // Segment: the absolute minimizer of |u'| is the linear interpolant.
  {
    const auto g = graph_on(box_domain(make_vec({0.0}), make_vec({1.0}), make_vec({0.02})), "euclidean", 1);
    const auto& d = g->domain();
    const auto data = BoundaryFunction::sample(d, [](const Vec& x) { return x(0) * x(0) - 0.3; });
    const auto r = solve_amle(data, *g, PNormHamiltonian(1), SolverParams{});
    double worst = 0.0;
    for (std::size_t v = 0; v < d.size(); ++v) {
      const double x = d.coord(static_cast<VertexId>(v))(0);
      worst = std::max(worst, std::abs(r.u.values[v] - (x - 0.3)));
    }
    pass = pass && worst <= 1e-3;
    summary += "segment max error " + fmt(worst) + " (limit 0.001)";
  }
  // Four-point datum on the square.
  {
    const double h = 0.1;
    const auto g = graph_on(box_domain(make_vec({-1, -1}), make_vec({1, 1}), make_vec({h, h})), "euclidean", 1);
    const auto& d = g->domain();
    const PNormHamiltonian p(2);
    const auto data = BoundaryFunction::sample(d, [](const Vec& x) { return std::abs(x(0)) - std::abs(x(1)); });
    SolverParams params;
    params.max_sweeps = 200;
    params.residual_tol = kAmleResidual;
    const auto r = solve_amle(data, *g, p, params);
    const auto balls = random_balls(*g, 50, 2.0, 6.0, 29);
    const auto sw = sandwich_check(r.u, p, balls);
    const double mu = r.report.mu;
    const double e = energy(r.u, d, g->frame(), p).headline;
    const bool ok = r.report.converged && r.report.final_residual <= kAmleResidual && r.report.sweeps <= 200 &&
                    balls.size() == 50 && sw.max_violation <= kAmleProfileTol + kTol.c1 * h &&
                    std::abs(e - mu) <= kMcShaneRel * mu + kTol.c1 * h;
    pass = pass && ok;
    summary += "; four-point " + std::string(r.report.converged ? "converged" : "NOT converged") + " in " +
               std::to_string(r.report.sweeps) + " sweeps (residual " + fmt(r.report.final_residual) +
               "), sandwich max violation on 50 balls " + fmt(sw.max_violation) + " (limit " +
               fmt(kAmleProfileTol + kTol.c1 * h) + "), energy " + fmt(e) + " vs mu " + fmt(mu);
  }
  return {pass, summary};
}

Outcome heisenberg() {
  const double h = 0.02;
  const HeisenbergFrame frame;
  const auto d = box_domain(make_vec({-0.4, -0.4, -0.02}), make_vec({0.4, 0.4, 0.12}), frame.lattice_spacing(h));
  const auto g = graph_on(d, "heisenberg", 1);
  const VertexId o = d->nearest_vertex(make_vec({0, 0, 0}));
  const VertexId top = d->nearest_vertex(make_vec({0, 0, 0.1}));
  if (o == kNoVertex || top == kNoVertex) return {false, "fixture vertices missing"};
  const auto from_o = cc_distance(*g, o);
  const double vertical = from_o[top];
  const double oracle = std::sqrt(4.0 * std::numbers::pi * 0.1);
  const double rel = std::abs(vertical - oracle) / oracle;

  // Ball-box: fit the smallest C with |x-y| / C <= d_CC <= C |x-y|^(1/2).
  std::mt19937_64 rng(31);
  auto in_core = [&](VertexId v) {
    const Vec x = d->coord(v);
    return std::abs(x(0)) <= 0.2 && std::abs(x(1)) <= 0.2 && x(2) >= 0.0 && x(2) <= 0.1;
  };
  std::uniform_int_distribution<VertexId> pick(0, static_cast<VertexId>(d->size()) - 1);
  auto draw = [&] {
    VertexId v = pick(rng);
    while (!in_core(v)) v = pick(rng);
    return v;
  };
  std::vector<VertexId> sources{o};
  while (sources.size() < 4) sources.push_back(draw());
  double c = 0.0;
  std::size_t pairs = 0;
  for (VertexId s : sources) {
    const auto field = s == o ? from_o : cc_distance(*g, s);
    for (int k = 0; k < 50; ++k) {
      const VertexId t = draw();
      if (t == s) continue;
      const double e = (d->coord(s) - d->coord(t)).norm();
      c = std::max({c, e / field[t], field[t] / std::sqrt(e)});
      ++pairs;
    }
  }
  const bool pass = rel <= kHeisenbergVerticalRel && c <= kBallBoxMaxC;
  return {pass, "d_CC(0,(0,0,0.1)) = " + fmt(vertical) + " vs sqrt(0.4 pi) = " + fmt(oracle) + " (rel " + fmt(rel) +
                    ", limit " + fmt(kHeisenbergVerticalRel) + "), fitted ball-box C = " + fmt(c) + " over " +
                    std::to_string(pairs) + " pairs (sanity limit " + fmt(kBallBoxMaxC) + ")"};
}

Outcome slit() {
  const double h = 0.02;
  const auto d = box_domain(make_vec({-1, -1}), make_vec({1, 1}), make_vec({h, h}), ShapeKind::SlitDisk);
  const auto g = graph_on(d, "euclidean", 3);
  const VertexId x = d->nearest_vertex(make_vec({0.5, 0.1}));
  const VertexId y = d->nearest_vertex(make_vec({0.5, -0.1}));
  if (x == kNoVertex || y == kNoVertex) return {false, "fixture vertices missing"};
  const double dist = cc_distance(*g, x)[y];
  const double straight = (d->coord(x) - d->coord(y)).norm();
  return {dist >= kSlitMin, "intrinsic distance " + fmt(dist) + " (limit >= " + fmt(kSlitMin) + "), straight " + fmt(straight)};
}

}  // namespace

int main() {
  criterion(1, "oracle equivalence", 60, oracle_equivalence);
  criterion(2, "euclidean closed form", 120, euclidean_closed_form);
  criterion(3, "comparability", 0, comparability);
  criterion(4, "lambda monotonicity", 0, monotonicity);
  criterion(5, "midpoint property", 0, midpoint);
  criterion(6, "floor norm counterexample", 0, floor_counterexample);
  criterion(7, "half-disk example", 0, halfdisk_example);
  criterion(8, "mcshane and mu", 120, mcshane_suite);
  criterion(9, "rademacher identity", 0, rademacher);
  criterion(10, "amle solver", 300, amle);
  criterion(11, "heisenberg geometry", 180, heisenberg);
  criterion(12, "slit disk", 0, slit);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
