#include "linf/extension.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace linf {

namespace {

// Comparisons between data differences and path sums allow for round-off.
constexpr double kRoundoff = 1e-12;

double allowance(double a, double b, double d) {
  return kRoundoff * std::max({1.0, std::fabs(a), std::fabs(b), std::isfinite(d) ? d : 0.0});
}

void require_same(const GridDomain& d, const BoundaryFunction& g) {
  if (g.domain_fingerprint != d.fingerprint() || g.values.size() != d.boundary().size())
    throw ContractError("boundary data belongs to a different domain");
}

void require_same(const ScalarField& u, const ScalarField& v) {
  if (u.size() != v.size() || u.domain_fingerprint != v.domain_fingerprint)
    throw ContractError("fields live on different domains");
}

struct Slack {
  double value = -kInf;
  std::size_t i = 0, j = 0;
};

// Largest violation g(y) - g(x) - D(x, y) beyond round-off, first in
// lexicographic order on ties.
Slack worst_slack(const std::vector<double>& g, const DistanceMatrix& d) {
  Slack s;
  for (std::size_t i = 0; i < d.n; ++i) {
    for (std::size_t j = 0; j < d.n; ++j) {
      if (i == j) continue;
      const double dij = d(i, j);
      const double slack = g[j] - g[i] - dij - allowance(g[i], g[j], dij);
      if (slack > s.value) s = {slack, i, j};
    }
  }
  return s;
}

bool is_positive_lambda_h(double lh) { return lh > 1e-8; }

}  // namespace

CompatibilityResult mu_threshold(const BoundaryFunction& g, const DirectedGraph& graph,
                                 const Hamiltonian& h, const MuOptions& options) {
  const GridDomain& d = graph.domain();
  require_same(d, g);
  if (!(options.rel_tol > 0.0)) throw ContractError("mu: tolerance must be positive");
  if (d.boundary().empty()) throw ContractError("mu: empty boundary");
  const auto boundary = d.boundary();
  CompatibilityResult r;
  r.lambda_h = std::isnan(options.lambda_h) ? lambda_h(h, 1e-9) : options.lambda_h;

  if (h.level_homogeneous()) {
    r.method = "ratio";
    const auto d1 = all_pairs(graph, edge_costs(graph, h, 1.0, options.quad), boundary);
    double best = 0.0;
    for (std::size_t i = 0; i < d1.n; ++i) {
      for (std::size_t j = 0; j < d1.n; ++j) {
        if (i == j) continue;
        const double rise = g.values[j] - g.values[i] - allowance(g.values[i], g.values[j], 0.0);
        if (rise <= 0.0) continue;
        const double dij = d1(i, j);
        if (!(dij > 0.0)) {
          throw IncompatibleBoundaryError("incompatible boundary data: zero distance between boundary vertices " +
                                          std::to_string(boundary[i]) + " and " + std::to_string(boundary[j]) +
                                          " with different values");
        }
        const double ratio = (g.values[j] - g.values[i]) / dij;
        if (ratio > best) {
          best = ratio;
          r.witness_x = boundary[i];
          r.witness_y = boundary[j];
        }
      }
    }
    if (best > options.cap) throw IncompatibleBoundaryError("incompatible boundary data: threshold exceeds cap");
    r.mu = best;
    r.tolerance = options.rel_tol * best;
  } else {
    r.method = "bisection";
    auto slack_at = [&](double lambda) {
      return worst_slack(g.values, all_pairs(graph, edge_costs(graph, h, lambda, options.quad), boundary));
    };
    Slack s = slack_at(0.0);
    if (s.value <= 0.0) {
      r.mu = 0.0;
    } else {
      double lo = 0.0, hi = 1.0;
      for (;;) {
        s = slack_at(hi);
        ++r.iterations;
        if (s.value <= 0.0) break;
        lo = hi;
        hi *= 2.0;
        if (hi > options.cap) throw IncompatibleBoundaryError("incompatible boundary data: no feasible level up to cap");
      }
      while (hi - lo > options.rel_tol * hi) {
        const double mid = 0.5 * (lo + hi);
        const Slack sm = slack_at(mid);
        ++r.iterations;
        if (sm.value <= 0.0) {
          hi = mid;
          s = sm;
        } else {
          lo = mid;
        }
      }
      r.mu = hi;
      r.tolerance = hi - lo;
      r.witness_x = boundary[s.i];
      r.witness_y = boundary[s.j];
    }
  }
  if (options.reject_below_lambda_h && is_positive_lambda_h(r.lambda_h) && r.mu <= r.lambda_h) {
    std::ostringstream os;
    os << "boundary data threshold mu = " << r.mu << " does not exceed lambda_H = " << r.lambda_h
       << "; extensions at this level are not supported";
    throw ContractError(os.str());
  }
  return r;
}

namespace {

ScalarField mcshane(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h, double mu,
                    Quadrature quad, bool upper) {
  const GridDomain& d = graph.domain();
  require_same(d, g);
  if (!(mu >= 0.0)) throw ContractError("mcshane: level must be nonnegative");
  std::vector<double> potentials(g.values);
  if (!upper)
    for (double& p : potentials) p = -p;
  const auto field = multi_source(graph, edge_costs(graph, h, mu, quad), d.boundary(), potentials,
                                  upper ? Direction::From : Direction::To);
  ScalarField u;
  u.values = field.values;
  if (!upper)
    for (double& v : u.values) v = -v;
  for (VertexId v : d.interior()) {
    if (!std::isfinite(u[v]))
      throw ContractError("mcshane: interior vertex " + std::to_string(v) + " is not connected to the boundary");
  }
  for (std::size_t i = 0; i < g.values.size(); ++i) u[d.boundary()[i]] = g.values[i];
  u.domain_fingerprint = d.fingerprint();
  u.provenance = upper ? "mcshane-upper" : "mcshane-lower";
  u.level = mu;
  return u;
}

}  // namespace

ScalarField mcshane_upper(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h, double mu,
                          Quadrature quad) {
  return mcshane(g, graph, h, mu, quad, true);
}

ScalarField mcshane_lower(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h, double mu,
                          Quadrature quad) {
  return mcshane(g, graph, h, mu, quad, false);
}

EnergyReport energy(const ScalarField& u, const GridDomain& domain, const Frame& frame, const Hamiltonian& h) {
  if (u.size() != domain.size() || u.domain_fingerprint != domain.fingerprint())
    throw ContractError("energy: field belongs to a different domain");
  EnergyReport r;
  for (VertexId v : domain.interior()) {
    const auto grad = horizontal_gradient(frame, domain, u, v);
    const double value = h.eval(domain.coord(v), grad.coeffs);
    r.with_one_sided = std::max(r.with_one_sided, value);
    if (grad.one_sided) {
      ++r.one_sided;
      continue;
    }
    if (r.argmax == kNoVertex || value > r.headline) {
      r.headline = value;
      r.argmax = v;
    }
  }
  return r;
}

double graph_energy(const ScalarField& u, const DirectedGraph& graph, const Hamiltonian& h, Quadrature quad) {
  if (u.size() != graph.vertex_count() || u.domain_fingerprint != graph.domain().fingerprint())
    throw ContractError("graph_energy: field belongs to a different domain");
  const std::size_t ne = graph.edge_count();
  auto rise = [&](std::size_t e) {
    return u[graph.target(static_cast<EdgeId>(e))] - u[graph.source(static_cast<EdgeId>(e))];
  };
  if (h.level_homogeneous()) {
    const auto c1 = edge_costs(graph, h, 1.0, quad);
    double best = 0.0;
    for (std::size_t e = 0; e < ne; ++e) {
      const double r = rise(e);
      if (r <= 0.0) continue;
      if (!(c1[e] > 0.0)) return kInf;
      best = std::max(best, r / c1[e]);
    }
    return best;
  }
  auto feasible = [&](double lambda) {
    const auto c = edge_costs(graph, h, lambda, quad);
    for (std::size_t e = 0; e < ne; ++e)
      if (rise(e) > c[e] + kRoundoff * std::max(1.0, c[e])) return false;
    return true;
  };
  if (feasible(0.0)) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (!feasible(hi)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1048576.0) return kInf;
  }
  while (hi - lo > 1e-9 * hi) {
    const double mid = 0.5 * (lo + hi);
    (feasible(mid) ? hi : lo) = mid;
  }
  return hi;
}

ScalarField blend(const ScalarField& u, const ScalarField& v, double t) {
  require_same(u, v);
  if (!(t >= 0.0 && t <= 1.0)) throw ContractError("blend: weight outside [0,1]");
  ScalarField w = u;
  for (std::size_t i = 0; i < w.size(); ++i) w.values[i] = t * u.values[i] + (1.0 - t) * v.values[i];
  std::ostringstream os;
  os << "blend(" << u.provenance << "," << v.provenance << "," << t << ")";
  w.provenance = os.str();
  w.level = std::max(u.level, v.level);
  return w;
}

ScalarField pointwise_max(const ScalarField& u, const ScalarField& v) {
  require_same(u, v);
  ScalarField w = u;
  for (std::size_t i = 0; i < w.size(); ++i) w.values[i] = std::max(u.values[i], v.values[i]);
  w.provenance = "max(" + u.provenance + "," + v.provenance + ")";
  w.level = std::max(u.level, v.level);
  return w;
}

ScalarField pointwise_min(const ScalarField& u, const ScalarField& v) {
  require_same(u, v);
  ScalarField w = u;
  for (std::size_t i = 0; i < w.size(); ++i) w.values[i] = std::min(u.values[i], v.values[i]);
  w.provenance = "min(" + u.provenance + "," + v.provenance + ")";
  w.level = std::max(u.level, v.level);
  return w;
}

ScalarField glue(const ScalarField& u, const GridDomain& v, const ScalarField& replacement, double tol) {
  if (v.parent_fingerprint() != u.domain_fingerprint)
    throw ContractError("glue: subdomain is not a restriction of the field's domain");
  if (replacement.size() != v.size() || replacement.domain_fingerprint != v.fingerprint())
    throw ContractError("glue: replacement does not live on the subdomain");
  double gap = 0.0;
  VertexId worst = kNoVertex;
  for (VertexId b : v.boundary()) {
    const double diff = std::fabs(replacement[b] - u[v.parent(b)]);
    if (diff > gap) {
      gap = diff;
      worst = b;
    }
  }
  if (gap > tol) {
    std::ostringstream os;
    os << "glue: replacement differs from the field on the subdomain boundary by " << gap << " at vertex "
       << v.parent(worst);
    throw ContractError(os.str());
  }
  ScalarField w = u;
  for (std::size_t i = 0; i < v.size(); ++i) w[v.parent(static_cast<VertexId>(i))] = replacement.values[i];
  w.provenance = "glue(" + u.provenance + "," + replacement.provenance + ")";
  return w;
}

}  // namespace linf
