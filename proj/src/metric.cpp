#include "linf/metric.hpp"

#include "linf/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <sstream>

namespace linf {

std::vector<std::vector<int>> StencilSpec::coefficients(int m) const {
  if (radius < 1) throw ContractError("stencil radius must be >= 1");
  if (m < 1 || m > kMaxDim) throw ContractError("stencil: unsupported dimension");
  std::vector<std::vector<int>> out;
  std::vector<int> c(static_cast<std::size_t>(m), -radius);
  for (;;) {
    int g = 0;
    for (int v : c) g = std::gcd(g, std::abs(v));
    if (g == 1) out.push_back(c);
    std::size_t k = 0;
    while (k < c.size() && c[k] == radius) c[k++] = -radius;
    if (k == c.size()) break;
    ++c[k];
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string to_string(Quadrature q) { return q == Quadrature::Midpoint ? "midpoint" : "trapezoid"; }

namespace {

Vec to_vec(const std::vector<int>& c) {
  Vec v(static_cast<Eigen::Index>(c.size()));
  for (std::size_t i = 0; i < c.size(); ++i) v(static_cast<Eigen::Index>(i)) = c[i];
  return v;
}

std::string describe(const GridDomain& d, VertexId v) {
  std::ostringstream os;
  os << v << " (";
  const Vec x = d.coord(v);
  for (Eigen::Index k = 0; k < x.size(); ++k) os << (k ? "," : "") << x(k);
  os << ")";
  return os.str();
}

}  // namespace

DirectedGraph DirectedGraph::build(std::shared_ptr<const GridDomain> domain, FramePtr frame,
                                   StencilSpec stencil) {
  if (!domain || !frame) throw ContractError("graph: missing domain or frame");
  if (frame->n() != domain->dim()) throw ContractError("graph: frame and domain dimensions differ");
  DirectedGraph g;
  g.domain_ = std::move(domain);
  g.frame_ = std::move(frame);
  g.stencil_ = stencil;
  g.coefficients_ = stencil.coefficients(g.frame_->m());
  const GridDomain& d = *g.domain_;
  const std::size_t nv = d.size();
  const std::size_t nc = g.coefficients_.size();
  const double h = d.h();

  std::vector<Vec> cvecs;
  for (const auto& c : g.coefficients_) cvecs.push_back(to_vec(c));
  const bool check_barriers = !d.barriers().empty();

  std::vector<VertexId> slots(nv * nc, kNoVertex);
  parallel_for(nv, [&](std::size_t i) {
    const auto a = static_cast<VertexId>(i);
    const Vec x = d.coord(a);
    for (std::size_t k = 0; k < nc; ++k) {
      const VertexId b = d.nearest_vertex(g.frame_->horizontal_step(x, cvecs[k], h));
      if (b == kNoVertex || b == a) continue;
      if (check_barriers && d.blocked(x, d.coord(b))) continue;
      slots[i * nc + k] = b;
    }
  });

  g.offsets_.assign(nv + 1, 0);
  for (std::size_t i = 0; i < nv; ++i) {
    EdgeId count = 0;
    for (std::size_t k = 0; k < nc; ++k) count += slots[i * nc + k] != kNoVertex;
    g.offsets_[i + 1] = g.offsets_[i] + count;
  }
  const auto ne = static_cast<std::size_t>(g.offsets_[nv]);
  g.sources_.resize(ne);
  g.targets_.resize(ne);
  g.stencil_index_.resize(ne);
  std::vector<std::size_t> in_degree(nv, 0);
  std::size_t e = 0;
  for (std::size_t i = 0; i < nv; ++i) {
    for (std::size_t k = 0; k < nc; ++k) {
      const VertexId b = slots[i * nc + k];
      if (b == kNoVertex) continue;
      g.sources_[e] = static_cast<VertexId>(i);
      g.targets_[e] = b;
      g.stencil_index_[e] = static_cast<std::uint16_t>(k);
      ++in_degree[static_cast<std::size_t>(b)];
      ++e;
    }
  }
  std::vector<VertexId>().swap(slots);

  g.in_offsets_.assign(nv + 1, 0);
  for (std::size_t v = 0; v < nv; ++v) g.in_offsets_[v + 1] = g.in_offsets_[v] + in_degree[v];
  g.in_edges_.resize(ne);
  std::vector<std::size_t> fill(g.in_offsets_.begin(), g.in_offsets_.end() - 1);
  for (std::size_t i = 0; i < ne; ++i) g.in_edges_[fill[static_cast<std::size_t>(g.targets_[i])]++] = static_cast<EdgeId>(i);

  for (VertexId v : d.interior()) {
    if (g.out_begin(v) == g.out_end(v) || g.in_begin(v) == g.in_end(v))
      throw ContractError("graph: isolated interior vertex " + describe(d, v));
  }
  return g;
}

Vec DirectedGraph::displacement(EdgeId e) const {
  return domain_->h() * to_vec(coefficients_[static_cast<std::size_t>(stencil_index(e))]);
}

EdgeId DirectedGraph::find_edge(VertexId a, VertexId b, const std::vector<double>& costs) const {
  EdgeId best = -1;
  for (EdgeId e = out_begin(a); e < out_end(a); ++e) {
    if (target(e) != b) continue;
    if (best < 0 || costs[static_cast<std::size_t>(e)] < costs[static_cast<std::size_t>(best)]) best = e;
  }
  return best;
}

double edge_cost(const DirectedGraph& g, EdgeId e, const Hamiltonian& h, double lambda, Quadrature quad) {
  const Vec q = g.displacement(e);
  const Vec a = g.domain().coord(g.source(e));
  const Vec b = g.domain().coord(g.target(e));
  if (quad == Quadrature::Midpoint) return h.support(0.5 * (a + b), lambda, q);
  return 0.5 * (h.support(a, lambda, q) + h.support(b, lambda, q));
}

std::vector<double> edge_costs(const DirectedGraph& g, const Hamiltonian& h, double lambda, Quadrature quad) {
  if (h.dim() != g.frame().m()) throw ContractError("hamiltonian and frame horizontal dimensions differ");
  std::vector<double> costs(g.edge_count());
  if (!h.x_dependent()) {
    const Vec x0 = g.domain().coord(0);
    std::vector<double> table;
    for (const auto& c : g.coefficients()) table.push_back(h.support(x0, lambda, g.domain().h() * to_vec(c)));
    for (std::size_t e = 0; e < costs.size(); ++e) costs[e] = table[static_cast<std::size_t>(g.stencil_index(static_cast<EdgeId>(e)))];
    return costs;
  }
  const std::size_t chunk = 4096;
  const std::size_t chunks = (costs.size() + chunk - 1) / chunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(costs.size(), (c + 1) * chunk);
    for (std::size_t e = c * chunk; e < end; ++e) costs[e] = edge_cost(g, static_cast<EdgeId>(e), h, lambda, quad);
  });
  return costs;
}

DistanceField multi_source(const DirectedGraph& g, const std::vector<double>& costs,
                           std::span<const VertexId> seeds, std::span<const double> potentials,
                           Direction direction) {
  if (costs.size() != g.edge_count()) throw ContractError("edge cost vector does not match graph");
  if (seeds.size() != potentials.size()) throw ContractError("seed and potential counts differ");
  const std::size_t nv = g.vertex_count();
  DistanceField f;
  f.values.assign(nv, kInf);
  f.next.assign(nv, kNoVertex);
  f.direction = direction;
  f.domain_fingerprint = g.domain().fingerprint();

  using Item = std::pair<double, VertexId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    const auto s = static_cast<std::size_t>(seeds[i]);
    if (s >= nv) throw ContractError("seed vertex out of range");
    if (potentials[i] < f.values[s]) {
      f.values[s] = potentials[i];
      heap.emplace(potentials[i], seeds[i]);
    }
  }
  std::vector<char> done(nv, 0);
  while (!heap.empty()) {
    const auto [dv, v] = heap.top();
    heap.pop();
    const auto vi = static_cast<std::size_t>(v);
    if (done[vi]) continue;
    done[vi] = 1;
    auto relax = [&](VertexId u, double w) {
      const double cand = dv + w;
      const auto ui = static_cast<std::size_t>(u);
      if (cand < f.values[ui]) {
        f.values[ui] = cand;
        f.next[ui] = v;
        heap.emplace(cand, u);
      }
    };
    if (direction == Direction::From) {
      for (EdgeId e = g.out_begin(v); e < g.out_end(v); ++e) relax(g.target(e), costs[static_cast<std::size_t>(e)]);
    } else {
      for (std::size_t s = g.in_begin(v); s < g.in_end(v); ++s) {
        const EdgeId e = g.in_edge(s);
        relax(g.source(e), costs[static_cast<std::size_t>(e)]);
      }
    }
  }
  return f;
}

DistanceField dist_from(const DirectedGraph& g, const std::vector<double>& costs, VertexId source) {
  const double zero = 0.0;
  auto f = multi_source(g, costs, {&source, 1}, {&zero, 1}, Direction::From);
  f.anchor = source;
  return f;
}

DistanceField dist_to(const DirectedGraph& g, const std::vector<double>& costs, VertexId target) {
  const double zero = 0.0;
  auto f = multi_source(g, costs, {&target, 1}, {&zero, 1}, Direction::To);
  f.anchor = target;
  return f;
}

std::string level_warning(const Hamiltonian& h, double lambda) {
  if (h.radii(lambda).r_inner > 0.0) return {};
  std::ostringstream os;
  os << "inner radius vanishes at level " << lambda
     << "; d_lambda need not bound the Carnot-Caratheodory distance from below";
  return os.str();
}

DistanceField dist_from(const DirectedGraph& g, const Hamiltonian& h, double lambda, VertexId source,
                        Quadrature quad) {
  auto f = dist_from(g, edge_costs(g, h, lambda, quad), source);
  f.level = lambda;
  f.warning = level_warning(h, lambda);
  return f;
}

DistanceField dist_to(const DirectedGraph& g, const Hamiltonian& h, double lambda, VertexId target,
                      Quadrature quad) {
  auto f = dist_to(g, edge_costs(g, h, lambda, quad), target);
  f.level = lambda;
  f.warning = level_warning(h, lambda);
  return f;
}

DistanceField cc_distance(const DirectedGraph& g, VertexId source) {
  const PNormHamiltonian unit(g.frame().m());
  return dist_from(g, unit, 1.0, source);
}

DistanceMatrix all_pairs(const DirectedGraph& g, const std::vector<double>& costs,
                         std::span<const VertexId> subset) {
  if (subset.empty()) throw ContractError("all_pairs: empty vertex subset");
  DistanceMatrix m;
  m.n = subset.size();
  m.values.resize(m.n * m.n);
  parallel_for(m.n, [&](std::size_t i) {
    const auto f = dist_from(g, costs, subset[i]);
    for (std::size_t j = 0; j < m.n; ++j) m.values[i * m.n + j] = f[subset[j]];
  });
  return m;
}

double path_length(const DirectedGraph& g, const std::vector<double>& costs, std::span<const VertexId> path) {
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const EdgeId e = g.find_edge(path[i - 1], path[i], costs);
    if (e < 0) {
      throw ContractError("path_length: no edge from vertex " + describe(g.domain(), path[i - 1]) +
                          " to vertex " + describe(g.domain(), path[i]));
    }
    total += costs[static_cast<std::size_t>(e)];
  }
  return total;
}

std::vector<VertexId> extract_path(const DistanceField& field, VertexId v) {
  std::vector<VertexId> path;
  if (!std::isfinite(field[v])) return path;
  for (VertexId u = v; u != kNoVertex; u = field.next[static_cast<std::size_t>(u)]) path.push_back(u);
  if (field.direction == Direction::From) std::reverse(path.begin(), path.end());
  return path;
}

double midpoint_defect(const DistanceField& from_x, const DistanceField& to_y, VertexId y) {
  const double d = from_x[y];
  if (!std::isfinite(d)) return -kInf;
  double best = kInf;
  for (std::size_t z = 0; z < from_x.size(); ++z) best = std::min(best, std::max(from_x.values[z], to_y.values[z]));
  return best - 0.5 * d;
}

double midpoint_defect(const DirectedGraph& g, const std::vector<double>& costs, VertexId x, VertexId y) {
  return midpoint_defect(dist_from(g, costs, x), dist_to(g, costs, y), y);
}

}  // namespace linf
