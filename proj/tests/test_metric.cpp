#include "linf/metric.hpp"
#include "linf/verify.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "fixtures.hpp"

using namespace linf;

namespace {

// Chamfer distance of the 8-neighbour lattice: max + (sqrt2 - 1) min of the
// axis offsets, in lattice units.
double octile(const Vec& a, const Vec& b, double h) {
  const double dx = std::abs(a(0) - b(0)) / h, dy = std::abs(a(1) - b(1)) / h;
  return h * (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy));
}

}  // namespace

TEST_CASE("stencil enumeration") {
  CHECK(StencilSpec{1}.coefficients(2).size() == 8);
  CHECK(StencilSpec{2}.coefficients(2).size() == 16);
  CHECK(StencilSpec{1}.coefficients(3).size() == 26);
  for (const auto& c : StencilSpec{3}.coefficients(2)) {
    CHECK(std::gcd(std::abs(c[0]), std::abs(c[1])) == 1);
    CHECK(std::max(std::abs(c[0]), std::abs(c[1])) <= 3);
  }
}

TEST_CASE("graph is reverse-closed on a box") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1), 2);
  std::set<std::pair<VertexId, VertexId>> edges;
  for (EdgeId e = 0; e < static_cast<EdgeId>(g->edge_count()); ++e) edges.insert({g->source(e), g->target(e)});
  for (const auto& [a, b] : edges) CHECK(edges.count({b, a}) == 1);
  for (std::size_t v = 0; v < g->vertex_count(); ++v)
    for (std::size_t k = g->in_begin(static_cast<VertexId>(v)); k < g->in_end(static_cast<VertexId>(v)); ++k)
      CHECK(g->target(g->in_edge(k)) == static_cast<VertexId>(v));
}

TEST_CASE("heisenberg graph has no direct vertical edge") {
  const HeisenbergFrame f;
  DomainSpec spec;
  spec.lo = make_vec({-0.5, -0.5, -0.1});
  spec.hi = make_vec({0.5, 0.5, 0.1});
  spec.spacing = f.lattice_spacing(0.1);
  auto d = std::make_shared<const GridDomain>(GridDomain::build(spec));
  const auto g = DirectedGraph::build(d, make_frame("heisenberg", 3), StencilSpec{1});
  for (EdgeId e = 0; e < static_cast<EdgeId>(g.edge_count()); ++e) {
    const Vec dx = d->coord(g.target(e)) - d->coord(g.source(e));
    CHECK(std::abs(dx(0)) + std::abs(dx(1)) > 0.05);
  }
}

TEST_CASE("edge cost examples") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const VertexId a = g->domain().nearest_vertex(make_vec({0.5, 0.5}));
  EdgeId right = -1, left = -1;
  for (EdgeId e = g->out_begin(a); e < g->out_end(a); ++e) {
    const Vec d = g->displacement(e);
    if (d(0) > 0 && d(1) == 0) right = e;
    if (d(0) < 0 && d(1) == 0) left = e;
  }
  REQUIRE(right >= 0);
  REQUIRE(left >= 0);
  CHECK(edge_cost(*g, right, PNormHamiltonian(2), 1.0) == doctest::Approx(0.1));
  CHECK(edge_cost(*g, right, FloorNormHamiltonian(), 0.5) == doctest::Approx(0.1));
  CHECK(edge_cost(*g, left, HalfDiskHamiltonian(), 1.0) == 0.0);
  CHECK(edge_cost(*g, right, HalfDiskHamiltonian(), 1.0) == doctest::Approx(0.1));
}

TEST_CASE("level zero gives the zero field") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const auto d = dist_from(*g, PNormHamiltonian(2), 0.0, 0);
  for (double v : d.values) CHECK(v == 0.0);
}

TEST_CASE("level warning below lambda_H") {
  const auto g = testing::euclidean_graph(testing::disk(0.1));
  CHECK_FALSE(dist_from(*g, HalfDiskHamiltonian(), 1.0, 0).warning.empty());
  CHECK(dist_from(*g, HalfDiskHamiltonian(), 3.0, 0).warning.empty());
  CHECK(dist_from(*g, PNormHamiltonian(2), 1.0, 0).warning.empty());
}

TEST_CASE("8-neighbour distance equals the chamfer closed form") {
  const double h = 0.05;
  const auto g = testing::euclidean_graph(testing::unit_box(h));
  const auto costs = edge_costs(*g, PNormHamiltonian(2), 1.0);
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<std::size_t> pick(0, g->vertex_count() - 1);
  for (int i = 0; i < 20; ++i) {
    const auto s = static_cast<VertexId>(pick(rng));
    const auto d = dist_from(*g, costs, s);
    for (int k = 0; k < 50; ++k) {
      const auto t = static_cast<VertexId>(pick(rng));
      CHECK(d[t] == doctest::Approx(octile(g->domain().coord(s), g->domain().coord(t), h)).epsilon(1e-12));
    }
  }
}

TEST_CASE("wider stencils approach the euclidean distance") {
  const double h = 0.05;
  const auto g = testing::euclidean_graph(testing::unit_box(h), 3);
  const VertexId s = g->domain().nearest_vertex(make_vec({0.0, 0.0}));
  const auto d = dist_from(*g, PNormHamiltonian(2), 2.0, s);
  for (std::size_t v = 0; v < g->vertex_count(); v += 7) {
    const double exact = 2.0 * g->domain().coord(static_cast<VertexId>(v)).norm();
    CHECK(d[static_cast<VertexId>(v)] >= exact - 1e-12);
    // Angular gap of the s = 3 stencil.
    CHECK(d[static_cast<VertexId>(v)] <= exact * 1.0136 + 1e-12);
  }
}

TEST_CASE("distance axioms and path extraction") {
  const auto g = testing::euclidean_graph(testing::disk(0.1), 2);
  const auto costs = edge_costs(*g, AnisotropicQuadratic(testing::diag(1.0, 4.0)), 1.0);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> pick(0, g->vertex_count() - 1);
  for (int i = 0; i < 10; ++i) {
    const auto x = static_cast<VertexId>(pick(rng));
    const auto dx = dist_from(*g, costs, x);
    CHECK(dx[x] == 0.0);
    for (int k = 0; k < 10; ++k) {
      const auto y = static_cast<VertexId>(pick(rng));
      const auto dy = dist_from(*g, costs, y);
      for (int j = 0; j < 10; ++j) {
        const auto z = static_cast<VertexId>(pick(rng));
        CHECK(dx[z] >= 0.0);
        // Sums along different paths round differently.
        CHECK(dx[z] <= (dx[y] + dy[z]) * (1.0 + 1e-12));
      }
      const auto path = extract_path(dx, y);
      REQUIRE(path.front() == x);
      REQUIRE(path.back() == y);
      CHECK(path_length(*g, costs, path) == doctest::Approx(dx[y]).epsilon(1e-12));
    }
  }
}

TEST_CASE("dist_to is the transpose of dist_from") {
  const auto g = testing::euclidean_graph(testing::disk(0.2));
  const auto costs = edge_costs(*g, HalfDiskHamiltonian(), 1.0);
  const VertexId t = 5;
  const auto to = dist_to(*g, costs, t);
  for (std::size_t v = 0; v < g->vertex_count(); ++v)
    CHECK(to[static_cast<VertexId>(v)] == dist_from(*g, costs, static_cast<VertexId>(v))[t]);
}

TEST_CASE("path length") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.25));
  const auto costs = edge_costs(*g, PNormHamiltonian(2), 1.0);
  const VertexId a = 0;
  const EdgeId e = g->out_begin(a);
  const std::vector<VertexId> one{a, g->target(e)};
  CHECK(path_length(*g, costs, one) == costs[static_cast<std::size_t>(e)]);
  const VertexId far = g->domain().nearest_vertex(make_vec({1.0, 1.0}));
  const std::vector<VertexId> gap{a, far};
  CHECK_THROWS_AS(path_length(*g, costs, gap), ContractError);
}

TEST_CASE("midpoint defect") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const auto costs = edge_costs(*g, PNormHamiltonian(2), 1.0);
  CHECK(midpoint_defect(*g, costs, 7, 7) == 0.0);
  const double max_edge = *std::max_element(costs.begin(), costs.end());
  for (VertexId x = 0; x < 121; x += 13)
    for (VertexId y = 0; y < 121; y += 11) CHECK(midpoint_defect(*g, costs, x, y) <= max_edge + 1e-12);
}

TEST_CASE("cc distance around the slit") {
  const auto g = testing::euclidean_graph(testing::disk(0.02, ShapeKind::SlitDisk), 3);
  const auto& d = g->domain();
  const VertexId x = d.nearest_vertex(make_vec({0.5, 0.1}));
  const VertexId y = d.nearest_vertex(make_vec({0.5, -0.1}));
  REQUIRE(x != kNoVertex);
  REQUIRE(y != kNoVertex);
  CHECK(cc_distance(*g, x)[y] >= 1.0);
  // Detour around the slit tip: 2 |(0.5, 0.1)| up to the stencil angular
  // gap, plus a few steps since the slit points themselves are removed.
  CHECK(cc_distance(*g, x)[y] <= 2.0 * std::hypot(0.5, 0.1) * 1.0136 + 4 * 0.02);
}

TEST_CASE("all pairs matches floyd-warshall") {
  const auto g = testing::euclidean_graph(testing::disk(0.25), 2);
  const auto costs = edge_costs(*g, HalfDiskHamiltonian(), 1.0);
  std::vector<VertexId> all(g->vertex_count());
  for (std::size_t v = 0; v < all.size(); ++v) all[v] = static_cast<VertexId>(v);
  const auto dj = all_pairs(*g, costs, all);
  const auto fw = floyd_warshall_oracle(*g, costs);
  bool asymmetric = false;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = 0; j < all.size(); ++j) {
      CHECK(std::abs(dj(i, j) - fw(i, j)) <= 1e-12);
      if (std::abs(dj(i, j) - dj(j, i)) > 0.1) asymmetric = true;
    }
  CHECK(asymmetric);
}

TEST_CASE("monotone in the level") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1), 2);
  const AnisotropicQuadratic a(testing::diag(1.0, 4.0));
  const auto lo = dist_from(*g, a, 0.5, 3);
  const auto hi = dist_from(*g, a, 2.0, 3);
  for (std::size_t v = 0; v < g->vertex_count(); ++v) CHECK(lo.values[v] <= hi.values[v]);
}

TEST_CASE("trapezoid and midpoint agree for x-independent costs") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const PNormHamiltonian p(2);
  CHECK(edge_costs(*g, p, 1.0, Quadrature::Midpoint) == edge_costs(*g, p, 1.0, Quadrature::Trapezoid));
  CHECK_THROWS_AS(edge_costs(*g, PNormHamiltonian(3), 1.0), ContractError);
}
