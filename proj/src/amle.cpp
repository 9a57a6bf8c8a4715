#include "linf/amle.hpp"

#include "linf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace linf {

std::shared_ptr<Ball> make_ball(const DirectedGraph& graph, const Vec& center, double radius) {
  const GridDomain& u = graph.domain();
  const double reach = radius * (1.0 + 1e-12);
  try {
    auto v = std::make_shared<const GridDomain>(
        u.restrict([&](const Vec& x) { return (x - center).norm() <= reach; }, graph.stencil().radius));
    auto g = std::make_shared<const DirectedGraph>(DirectedGraph::build(v, graph.frame_ptr(), graph.stencil()));
    auto ball = std::make_shared<Ball>();
    ball->center = center;
    ball->radius = radius;
    ball->domain = std::move(v);
    ball->graph = std::move(g);
    return ball;
  } catch (const ContractError&) {
    return nullptr;
  }
}

std::vector<Ball> all_balls(const DirectedGraph& graph, const std::vector<double>& radii) {
  const GridDomain& u = graph.domain();
  const auto interior = u.interior();
  std::vector<Ball> out;
  for (double r : radii) {
    std::vector<std::shared_ptr<Ball>> made(interior.size());
    parallel_for(interior.size(), [&](std::size_t i) {
      made[i] = make_ball(graph, u.coord(interior[i]), r * u.h());
    });
    for (auto& b : made)
      if (b) out.push_back(std::move(*b));
  }
  return out;
}

std::vector<Ball> random_balls(const DirectedGraph& graph, std::size_t count, double r_min, double r_max,
                               std::uint64_t seed) {
  if (!(r_min > 0.0 && r_max >= r_min)) throw ContractError("random_balls: invalid radius range");
  const GridDomain& u = graph.domain();
  const auto interior = u.interior();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  std::uniform_real_distribution<double> radius(r_min, r_max);
  std::vector<Ball> out;
  for (std::size_t attempt = 0; out.size() < count && attempt < 50 * count; ++attempt) {
    const VertexId c = interior[pick(rng)];
    const double r = radius(rng) * u.h();
    if (auto b = make_ball(graph, u.coord(c), r)) out.push_back(std::move(*b));
  }
  if (out.size() < count) throw ContractError("random_balls: could not place the requested balls");
  return out;
}

namespace {

struct LocalSolution {
  ScalarField u;
  ScalarField lower;
  ScalarField upper;
  double mu = 0.0;
};

LocalSolution solve_local(const ScalarField& u, const Ball& ball, const Hamiltonian& h, double lh,
                          Quadrature quad) {
  const GridDomain& v = *ball.domain;
  if (v.parent_fingerprint() != u.domain_fingerprint)
    throw ContractError("ball does not belong to the field's domain");
  LocalSolution s;
  s.u.values.resize(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) s.u.values[i] = u[v.parent(static_cast<VertexId>(i))];
  s.u.domain_fingerprint = v.fingerprint();
  const auto trace = BoundaryFunction::trace(v, s.u);
  MuOptions opts;
  opts.quad = quad;
  opts.reject_below_lambda_h = false;
  opts.lambda_h = lh;
  s.mu = mu_threshold(trace, *ball.graph, h, opts).mu;
  s.upper = mcshane_upper(trace, *ball.graph, h, s.mu, quad);
  s.lower = mcshane_lower(trace, *ball.graph, h, s.mu, quad);
  return s;
}

double violation(const LocalSolution& s, double* below = nullptr, double* above = nullptr) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < s.u.size(); ++i) {
    lo = std::max(lo, s.lower.values[i] - s.u.values[i]);
    hi = std::max(hi, s.u.values[i] - s.upper.values[i]);
  }
  if (below) *below = lo;
  if (above) *above = hi;
  return std::max(lo, hi);
}

// Groups of balls with pairwise disjoint vertex sets, preserving order.
std::vector<std::vector<std::size_t>> color(const std::vector<Ball>& balls, const std::vector<std::size_t>& order,
                                            std::size_t vertex_count) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::vector<char>> used;
  for (std::size_t idx : order) {
    const GridDomain& v = *balls[idx].domain;
    std::size_t c = 0;
    for (; c < groups.size(); ++c) {
      bool clash = false;
      for (std::size_t i = 0; i < v.size() && !clash; ++i)
        clash = used[c][static_cast<std::size_t>(v.parent(static_cast<VertexId>(i)))] != 0;
      if (!clash) break;
    }
    if (c == groups.size()) {
      groups.emplace_back();
      used.emplace_back(vertex_count, 0);
    }
    groups[c].push_back(idx);
    for (std::size_t i = 0; i < v.size(); ++i) used[c][static_cast<std::size_t>(v.parent(static_cast<VertexId>(i)))] = 1;
  }
  return groups;
}

double band_excursion(const ScalarField& u, const ScalarField& lower, const ScalarField& upper) {
  double worst = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i)
    worst = std::max({worst, lower.values[i] - u.values[i], u.values[i] - upper.values[i]});
  return worst;
}

}  // namespace

AmleResult solve_amle(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h,
                      const SolverParams& params) {
  if (params.radii.empty()) throw ContractError("amle: empty radius schedule");
  for (double r : params.radii)
    if (!(r >= 2.0)) throw ContractError("amle: ball radii must be at least 2h");
  if (!(params.residual_tol > 0.0)) throw ContractError("amle: residual tolerance must be positive");
  if (params.max_sweeps < 0) throw ContractError("amle: negative sweep limit");
  const GridDomain& dom = graph.domain();

  MuOptions opts;
  opts.quad = params.quad;
  const auto compat = mu_threshold(g, graph, h, opts);
  const auto upper = mcshane_upper(g, graph, h, compat.mu, params.quad);
  const auto lower = mcshane_lower(g, graph, h, compat.mu, params.quad);

  AmleResult result;
  result.u = blend(upper, lower, 0.5);
  result.u.provenance = "amle";
  result.u.level = compat.mu;
  SolverReport& rep = result.report;
  rep.mu = compat.mu;
  ScalarField& u = result.u;
  rep.energy_trace.push_back(graph_energy(u, graph, h, params.quad));
  rep.gradient_energy_trace.push_back(energy(u, dom, graph.frame(), h).headline);
  rep.band_trace.push_back(band_excursion(u, lower, upper));

  const auto [gmin, gmax] = std::minmax_element(g.values.begin(), g.values.end());
  if (*gmax - *gmin == 0.0) {
    rep.converged = true;
    return result;
  }

  std::vector<double> radii(params.radii);
  std::stable_sort(radii.begin(), radii.end(), std::greater<>());
  std::vector<std::vector<std::size_t>> schedule;
  std::vector<Ball> balls;
  std::mt19937_64 rng(params.seed);
  for (double r : radii) {
    auto group = all_balls(graph, {r});
    std::vector<std::size_t> order(group.size());
    for (std::size_t i = 0; i < group.size(); ++i) order[i] = balls.size() + i;
    if (params.order == SweepOrder::Random) std::shuffle(order.begin(), order.end(), rng);
    for (auto& b : group) balls.push_back(std::move(b));
    for (auto& c : color(balls, order, dom.size())) schedule.push_back(std::move(c));
  }
  rep.balls = balls.size();
  rep.colors = schedule.size();
  if (balls.empty()) throw ContractError("amle: no usable balls for the radius schedule");

  const double lh = compat.lambda_h;
  std::vector<double> ball_violation(balls.size(), 0.0);
  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    for (const auto& group : schedule) {
      parallel_for(group.size(), [&](std::size_t k) {
        const Ball& ball = balls[group[k]];
        const auto s = solve_local(u, ball, h, lh, params.quad);
        ball_violation[group[k]] = violation(s);
        // Balls already sandwiched between their own McShane extensions are
        // local sub- and superminimizers; replacing them only churns.
        if (ball_violation[group[k]] <= params.keep_tol * params.residual_tol) return;
        const GridDomain& v = *ball.domain;
        double t = 0.5;
        if (params.blend == BlendRule::Weighted) {
          const VertexId c = v.nearest_vertex(ball.center);
          const double a = s.lower[c], b = s.upper[c];
          t = b > a ? std::clamp((s.u[c] - a) / (b - a), 0.0, 1.0) : 0.5;
        }
        for (VertexId i : v.interior()) u[v.parent(i)] = s.lower[i] + t * (s.upper[i] - s.lower[i]);
      });
    }
    ++rep.sweeps;
    double worst = 0.0, total = 0.0;
    for (double x : ball_violation) {
      worst = std::max(worst, x);
      total += x;
    }
    rep.residual_trace.push_back(worst);
    rep.mean_violation_trace.push_back(total / static_cast<double>(balls.size()));
    const double e = graph_energy(u, graph, h, params.quad);
    if (e > rep.energy_trace.back() + params.residual_tol) {
      std::ostringstream os;
      os << "amle: energy rose from " << rep.energy_trace.back() << " to " << e << " in sweep " << rep.sweeps;
      throw ContractError(os.str());
    }
    rep.energy_trace.push_back(e);
    rep.gradient_energy_trace.push_back(energy(u, dom, graph.frame(), h).headline);
    rep.band_trace.push_back(band_excursion(u, lower, upper));
    rep.final_residual = worst;
    if (worst <= params.residual_tol) {
      rep.converged = true;
      break;
    }
  }
  return result;
}

SandwichReport sandwich_check(const ScalarField& u, const Hamiltonian& h, const std::vector<Ball>& balls,
                              Quadrature quad) {
  SandwichReport rep;
  rep.balls.resize(balls.size());
  const double lh = lambda_h(h, 1e-9);
  parallel_for(balls.size(), [&](std::size_t i) {
    const auto s = solve_local(u, balls[i], h, lh, quad);
    BallCheck& c = rep.balls[i];
    c.center = balls[i].center;
    c.radius = balls[i].radius;
    c.mu = s.mu;
    violation(s, &c.below, &c.above);
    c.energy = energy(s.u, *balls[i].domain, balls[i].graph->frame(), h).headline;
    c.graph_energy = graph_energy(s.u, *balls[i].graph, h, quad);
  });
  double total = 0.0;
  for (const auto& c : rep.balls) {
    const double v = std::max(c.below, c.above);
    rep.max_violation = std::max(rep.max_violation, v);
    total += v;
  }
  if (!rep.balls.empty()) rep.mean_violation = total / static_cast<double>(rep.balls.size());
  return rep;
}

std::vector<BallCheck> local_energy_profile(const ScalarField& u, const Hamiltonian& h, const std::vector<Ball>& balls,
                                            Quadrature quad) {
  return sandwich_check(u, h, balls, quad).balls;
}

}  // namespace linf
