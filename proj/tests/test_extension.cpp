#include "linf/extension.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "fixtures.hpp"

using namespace linf;

namespace {

double octile(const Vec& a, const Vec& b, double h) {
  const double dx = std::abs(a(0) - b(0)) / h, dy = std::abs(a(1) - b(1)) / h;
  return h * (std::max(dx, dy) + (std::sqrt(2.0) - 1.0) * std::min(dx, dy));
}

// Largest slope of g between boundary vertices measured by `dist`.
double brute_ratio(const GridDomain& d, const BoundaryFunction& g,
                   const std::function<double(VertexId, VertexId)>& dist) {
  double best = 0.0;
  const auto b = d.boundary();
  for (std::size_t i = 0; i < b.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (i != j) best = std::max(best, (g.values[j] - g.values[i]) / dist(b[i], b[j]));
  return best;
}

}  // namespace

TEST_CASE("constant data") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const auto c = BoundaryFunction::sample(g->domain(), [](const Vec&) { return 2.5; });
  const PNormHamiltonian p(2);
  CHECK(mu_threshold(c, *g, p).mu == 0.0);
  for (double v : mcshane_upper(c, *g, p, 0.0).values) CHECK(v == 2.5);
  for (double v : mcshane_lower(c, *g, p, 0.0).values) CHECK(v == 2.5);
}

TEST_CASE("linear data on a box matches the chamfer oracle") {
  const double h = 0.1;
  const auto g = testing::euclidean_graph(testing::unit_box(h));
  const auto& d = g->domain();
  const auto data = BoundaryFunction::sample(d, [](const Vec& x) { return x(0) + 0.5 * x(1); });
  const auto r = mu_threshold(data, *g, PNormHamiltonian(2));
  const double oracle = brute_ratio(d, data, [&](VertexId a, VertexId b) { return octile(d.coord(a), d.coord(b), h); });
  CHECK(r.mu == doctest::Approx(oracle).epsilon(1e-12));
  CHECK(r.method == "ratio");
  CHECK(r.mu <= std::hypot(1.0, 0.5) + 1e-12);
  CHECK(r.mu >= std::hypot(1.0, 0.5) / 1.0824);
  REQUIRE(r.witness_x != kNoVertex);
  const double slack = data.values[static_cast<std::size_t>(d.boundary_slot(r.witness_y))] -
                       data.values[static_cast<std::size_t>(d.boundary_slot(r.witness_x))];
  CHECK(slack / octile(d.coord(r.witness_x), d.coord(r.witness_y), h) == doctest::Approx(r.mu));
}

TEST_CASE("bisection agrees with the ratio for a tabulated norm") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1), 2);
  const auto data = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return x(0) * x(1); });
  const PNormHamiltonian p(2);
  const auto t = TabulatedHamiltonian::sample_polar(p, 8.0, 721, 200);
  const auto exact = mu_threshold(data, *g, p);
  const auto sampled = mu_threshold(data, *g, t);
  CHECK(sampled.method == "bisection");
  CHECK(sampled.iterations > 0);
  // The sampled sublevel set is slightly smaller, so the threshold is slightly larger.
  CHECK(sampled.mu >= exact.mu * (1.0 - 1e-6));
  CHECK(sampled.mu <= exact.mu * 1.05);
}

TEST_CASE("jump across the slit") {
  const auto g = testing::euclidean_graph(testing::disk(0.1, ShapeKind::SlitDisk));
  const auto& d = g->domain();
  // Polar angle in [0, 2pi) over 2pi: continuous except across the slit.
  const auto data = BoundaryFunction::sample(d, [](const Vec& x) {
    const double t = std::atan2(x(1), x(0));
    return (t < 0.0 ? t + 2.0 * std::numbers::pi : t) / (2.0 * std::numbers::pi);
  });
  const auto r = mu_threshold(data, *g, PNormHamiltonian(2));
  CHECK(std::isfinite(r.mu));
  const auto costs = edge_costs(*g, PNormHamiltonian(2), 1.0);
  std::vector<DistanceField> from;
  for (std::size_t v = 0; v < d.size(); ++v) from.push_back(dist_from(*g, costs, static_cast<VertexId>(v)));
  const double oracle = brute_ratio(d, data, [&](VertexId a, VertexId b) { return from[static_cast<std::size_t>(a)][b]; });
  CHECK(r.mu == doctest::Approx(oracle).epsilon(1e-9));
  // Measured in straight lines the jump across the slit is much steeper.
  const double straight = brute_ratio(d, data, [&](VertexId a, VertexId b) { return (d.coord(a) - d.coord(b)).norm(); });
  CHECK(straight > 4.0);
  CHECK(r.mu < 0.5 * straight);
}

TEST_CASE("data below lambda_H is rejected") {
  const auto g = testing::euclidean_graph(testing::disk(0.1));
  const auto small = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return x(0); });
  CHECK_THROWS_AS(mu_threshold(small, *g, HalfDiskHamiltonian()), ContractError);
  const auto big = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return 3.0 * x(0); });
  CHECK(mu_threshold(big, *g, HalfDiskHamiltonian()).mu > 2.0);
}

TEST_CASE("mu is nondecreasing under scaling") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const AnisotropicQuadratic a(testing::diag(1.0, 4.0));
  double prev = 0.0;
  for (double c : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const auto data = BoundaryFunction::sample(g->domain(), [c](const Vec& x) { return c * std::sin(3 * x(0)) * x(1); });
    const double mu = mu_threshold(data, *g, a).mu;
    CHECK(mu >= prev);
    prev = mu;
  }
}

TEST_CASE("mcshane envelopes") {
  const double h = 0.05;
  const auto g = testing::euclidean_graph(testing::unit_box(h), 2);
  const auto& d = g->domain();
  const PNormHamiltonian p(2);
  const auto data = BoundaryFunction::sample(d, [](const Vec& x) { return std::abs(x(0) - 0.5) - x(1) * x(1); });
  const double mu = mu_threshold(data, *g, p).mu;
  const auto up = mcshane_upper(data, *g, p, mu);
  const auto lo = mcshane_lower(data, *g, p, mu);
  CHECK(up.provenance == "mcshane-upper");
  CHECK(up.level == mu);
  for (std::size_t i = 0; i < d.boundary().size(); ++i) {
    CHECK(up[d.boundary()[i]] == data.values[i]);
    CHECK(lo[d.boundary()[i]] == data.values[i]);
  }
  for (std::size_t v = 0; v < d.size(); ++v) CHECK(lo.values[v] <= up.values[v]);
  // Lipschitz with respect to d_mu.
  const auto costs = edge_costs(*g, p, mu);
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<std::size_t> pick(0, d.size() - 1);
  for (int i = 0; i < 30; ++i) {
    const auto x = static_cast<VertexId>(pick(rng));
    const auto dx = dist_from(*g, costs, x);
    for (std::size_t y = 0; y < d.size(); ++y) {
      const double allow = 1e-12 * (1.0 + std::abs(up.values[y]) + dx.values[y]);
      CHECK(up.values[y] - up[x] <= dx.values[y] + allow);
      CHECK(lo.values[y] - lo[x] <= dx.values[y] + allow);
    }
  }
  // Energy of the envelopes stays within the tolerance of mu; central
  // differences across the kinks of S+- overshoot by O(h).
  const EuclideanFrame f(2);
  CHECK(energy(up, d, f, p).headline <= 1.05 * mu + h);
  CHECK(energy(lo, d, f, p).headline <= 1.05 * mu + h);
}

TEST_CASE("energy of simple fields") {
  const auto d = testing::unit_box(0.1);
  const EuclideanFrame f(2);
  const PNormHamiltonian p(2);
  const auto lin = sample_field(*d, [](const Vec& x) { return 3.0 * x(0) - 4.0 * x(1); });
  const auto e = energy(lin, *d, f, p);
  CHECK(e.headline == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(e.one_sided == 0);
  CHECK(energy(sample_field(*d, [](const Vec&) { return 1.0; }), *d, f, p).headline == 0.0);
  const auto g = testing::euclidean_graph(d);
  // Steepest slope of a linear field along the 8 stencil directions.
  double steepest = 0.0;
  for (const auto& c : StencilSpec{1}.coefficients(2)) steepest = std::max(steepest, (3.0 * c[0] - 4.0 * c[1]) / std::hypot(c[0], c[1]));
  CHECK(graph_energy(lin, *g, p) == doctest::Approx(steepest).epsilon(1e-12));
}

TEST_CASE("field algebra") {
  const auto d = testing::unit_box(0.25);
  const auto u = sample_field(*d, [](const Vec& x) { return x(0); });
  const auto v = sample_field(*d, [](const Vec& x) { return x(1); });
  const auto b = blend(u, v, 0.25);
  const auto hi = pointwise_max(u, v);
  const auto lo = pointwise_min(u, v);
  for (std::size_t i = 0; i < d->size(); ++i) {
    CHECK(b.values[i] == doctest::Approx(0.25 * u.values[i] + 0.75 * v.values[i]));
    CHECK(hi.values[i] == std::max(u.values[i], v.values[i]));
    CHECK(lo.values[i] == std::min(u.values[i], v.values[i]));
  }
  CHECK_THROWS_AS(blend(u, v, 1.5), ContractError);
  const auto other = sample_field(*testing::unit_box(0.125), [](const Vec&) { return 0.0; });
  CHECK_THROWS_AS(pointwise_max(u, other), ContractError);
}

TEST_CASE("glue") {
  const auto d = testing::unit_box(0.1);
  const auto u = sample_field(*d, [](const Vec& x) { return x(0); });
  const Vec c = make_vec({0.5, 0.5});
  const GridDomain v = d->restrict([&](const Vec& x) { return (x - c).norm() <= 0.3; });
  ScalarField rep = sample_field(v, [](const Vec& x) { return x(0); });
  for (VertexId i : v.interior()) rep[i] += 0.01;
  const auto glued = glue(u, v, rep);
  for (std::size_t i = 0; i < v.size(); ++i)
    CHECK(glued[v.parent(static_cast<VertexId>(i))] == rep.values[i]);
  CHECK(glued[0] == u[0]);
  ScalarField bad = rep;
  bad[v.boundary()[0]] += 0.5;
  CHECK_THROWS_AS(glue(u, v, bad), ContractError);
}
