#include "linf/amle.hpp"
#include "linf/extension.hpp"

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace linf;

namespace {

std::shared_ptr<const DirectedGraph> four_point_graph(double h) {
  return testing::euclidean_graph(testing::box(make_vec({-1.0, -1.0}), make_vec({1.0, 1.0}), h));
}

double four_point(const Vec& x) { return std::abs(x(0)) - std::abs(x(1)); }

}  // namespace

TEST_CASE("constant data needs no sweep") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const auto data = BoundaryFunction::sample(g->domain(), [](const Vec&) { return -1.0; });
  const auto r = solve_amle(data, *g, PNormHamiltonian(2), SolverParams{});
  CHECK(r.report.sweeps == 0);
  CHECK(r.report.converged);
  for (double v : r.u.values) CHECK(v == -1.0);
}

TEST_CASE("segment converges to the linear interpolant") {
  const auto g = testing::euclidean_graph(testing::box(make_vec({0.0}), make_vec({1.0}), 0.05));
  const auto data = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return 2.0 * x(0) * x(0); });
  const auto r = solve_amle(data, *g, PNormHamiltonian(1), SolverParams{});
  CHECK(r.report.converged);
  const auto& d = g->domain();
  // Boundary vertices are the two end points.
  const double a = d.coord(d.boundary().front())(0), b = d.coord(d.boundary().back())(0);
  const double ga = 2 * a * a, gb = 2 * b * b;
  for (std::size_t v = 0; v < d.size(); ++v) {
    const double x = d.coord(static_cast<VertexId>(v))(0);
    CHECK(std::abs(r.u.values[v] - (ga + (gb - ga) * (x - a) / (b - a))) <= 1e-3);
  }
}

TEST_CASE("four-point data") {
  const double h = 0.1;
  const auto g = four_point_graph(h);
  const auto& d = g->domain();
  const PNormHamiltonian p(2);
  const auto data = BoundaryFunction::sample(d, four_point);
  const auto r = solve_amle(data, *g, p, SolverParams{});
  REQUIRE(r.report.converged);
  CHECK(r.report.final_residual <= 1e-3);
  CHECK(r.report.sweeps <= 200);
  CHECK(r.report.energy_trace.size() == static_cast<std::size_t>(r.report.sweeps) + 1);

  for (std::size_t i = 0; i < d.boundary().size(); ++i) CHECK(r.u[d.boundary()[i]] == data.values[i]);
  const double mu = mu_threshold(data, *g, p).mu;
  CHECK(r.report.mu == mu);
  const auto up = mcshane_upper(data, *g, p, mu);
  const auto lo = mcshane_lower(data, *g, p, mu);
  for (std::size_t v = 0; v < d.size(); ++v) {
    CHECK(r.u.values[v] <= up.values[v] + 1e-12);
    CHECK(r.u.values[v] >= lo.values[v] - 1e-12);
  }
  CHECK(std::abs(energy(r.u, d, g->frame(), p).headline - mu) <= 0.05 * mu + h);

  const auto balls = random_balls(*g, 50, 2.0, 5.0, 17);
  REQUIRE(balls.size() == 50);
  const auto check = sandwich_check(r.u, p, balls);
  CHECK(check.max_violation <= 1e-3 + h);
  for (const auto& b : check.balls) CHECK(b.graph_energy <= b.mu + 1e-9);
}

TEST_CASE("energy trace never increases beyond the residual tolerance") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.05));
  const auto data = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return x(0) * x(0) - x(1) * x(1); });
  SolverParams params;
  params.max_sweeps = 30;
  const auto r = solve_amle(data, *g, PNormHamiltonian(2), params);
  for (std::size_t i = 1; i < r.report.energy_trace.size(); ++i)
    CHECK(r.report.energy_trace[i] <= r.report.energy_trace[i - 1] + params.residual_tol);
  CHECK(r.report.colors > 1);
  CHECK(r.report.balls > 0);
}

TEST_CASE("runs are reproducible for a seed") {
  const auto g = four_point_graph(0.1);
  const auto data = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return x(0) * x(1) + 0.3 * x(0); });
  SolverParams params;
  params.order = SweepOrder::Random;
  params.seed = 42;
  params.max_sweeps = 20;
  const auto a = solve_amle(data, *g, PNormHamiltonian(2), params);
  const auto b = solve_amle(data, *g, PNormHamiltonian(2), params);
  CHECK(a.u.values == b.u.values);
  CHECK(a.report.residual_trace == b.report.residual_trace);
}

TEST_CASE("weighted blend also converges") {
  const auto g = four_point_graph(0.1);
  const auto data = BoundaryFunction::sample(g->domain(), four_point);
  SolverParams params;
  params.blend = BlendRule::Weighted;
  const auto r = solve_amle(data, *g, PNormHamiltonian(2), params);
  CHECK(r.report.converged);
}

TEST_CASE("linear fields are absolutely minimizing") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.05), 3);
  const PNormHamiltonian p(2);
  const auto u = sample_field(g->domain(), [](const Vec& x) { return 0.8 * x(0) - 0.6 * x(1); });
  const auto balls = random_balls(*g, 20, 3.0, 6.0, 5);
  for (const auto& b : local_energy_profile(u, p, balls)) {
    CHECK(std::abs(b.energy - 1.0) <= 1e-9);
    CHECK(std::abs(b.mu - 1.0) <= 0.05);
  }
  CHECK(sandwich_check(u, p, balls).max_violation <= 0.05);
}

TEST_CASE("balls") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const auto b = make_ball(*g, make_vec({0.5, 0.5}), 0.3);
  REQUIRE(b);
  CHECK(b->domain->parent_fingerprint() == g->domain().fingerprint());
  for (VertexId v : b->domain->interior()) CHECK((b->domain->coord(v) - b->center).norm() < 0.3);
  CHECK(make_ball(*g, make_vec({0.5, 0.5}), 0.05) == nullptr);
  CHECK_FALSE(all_balls(*g, {3.0}).empty());
}

TEST_CASE("invalid parameters") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.1));
  const auto data = BoundaryFunction::sample(g->domain(), [](const Vec& x) { return x(0); });
  SolverParams params;
  params.radii = {1.0};
  CHECK_THROWS_AS(solve_amle(data, *g, PNormHamiltonian(2), params), ContractError);
  params = SolverParams{};
  params.residual_tol = 0.0;
  CHECK_THROWS_AS(solve_amle(data, *g, PNormHamiltonian(2), params), ContractError);
}
