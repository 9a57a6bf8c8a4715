#include "linf/verify.hpp"

#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"

using namespace linf;

TEST_CASE("lambda_star examples") {
  const double h = 0.05;
  const auto g = testing::euclidean_graph(testing::unit_box(h), 3);
  const auto& d = g->domain();
  const PNormHamiltonian p(2);
  const VertexId z = d.nearest_vertex(make_vec({0.5, 0.5}));
  const auto cc = cc_distance(*g, z);
  ScalarField u{cc.values, d.fingerprint(), "cc", 1.0};
  CHECK(std::abs(lambda_star(u, d, g->frame(), p) - 1.0) <= ToleranceModel{}.tol(h));
  CHECK(lambda_star(sample_field(d, [](const Vec&) { return 4.0; }), d, g->frame(), p) == 0.0);
  const auto d2 = dist_from(*g, p, 2.0, z);
  ScalarField u2{d2.values, d.fingerprint(), "dist", 2.0};
  // Costs scale with the level, so does the discretization error.
  CHECK(lambda_star(u2, d, g->frame(), p) <= 2.0 * (1.0 + ToleranceModel{}.tol(h)));
}

TEST_CASE("lambda_dual examples") {
  const double h = 0.05;
  const auto g = testing::euclidean_graph(testing::unit_box(h), 3);
  const auto& d = g->domain();
  const PNormHamiltonian p(2);
  const auto lin = sample_field(d, [](const Vec& x) { return 0.6 * x(0) + 0.8 * x(1); });
  CHECK(std::abs(lambda_dual(lin, *g, p) - 1.0) <= ToleranceModel{}.tol(h));
  CHECK(lambda_dual(sample_field(d, [](const Vec&) { return 1.0; }), *g, p) == 0.0);
  const auto df = dist_from(*g, p, 1.5, 17);
  ScalarField u{df.values, d.fingerprint(), "dist", 1.5};
  CHECK(lambda_dual(u, *g, p) <= 1.5 * (1.0 + 1e-6));
  // Non-homogeneous Hamiltonians take the bisection path.
  const auto t = TabulatedHamiltonian::sample_polar(p, 4.0, 361, 100);
  CHECK(std::abs(lambda_dual(lin, *g, t) - lambda_dual(lin, *g, p)) <= 0.05);
}

TEST_CASE("rademacher report") {
  const double h = 0.05;
  const auto g = testing::euclidean_graph(testing::unit_box(h), 3);
  const PNormHamiltonian p(2);
  const auto c = rademacher_report(sample_field(g->domain(), [](const Vec&) { return 0.0; }), *g, p, 1e-3);
  CHECK(c.gap == 0.0);
  CHECK(c.pass);
  const auto smooth = sample_field(g->domain(), [](const Vec& x) { return std::sin(x(0)) + 0.5 * x(1) * x(1); });
  const auto r = rademacher_report(smooth, *g, p, ToleranceModel{}.tol(h));
  CHECK(r.pass);
  CHECK(r.lambda_h == 0.0);
}

TEST_CASE("floor norm breaks the identity") {
  const auto g = testing::euclidean_graph(testing::box(make_vec({-1.0, -1.0}), make_vec({1.0, 1.0}), 0.05));
  const VertexId z = g->domain().nearest_vertex(make_vec({0.0, 0.0}));
  const auto cc = cc_distance(*g, z);
  ScalarField u{cc.values, g->domain().fingerprint(), "cc", 1.0};
  const auto r = rademacher_report(u, *g, FloorNormHamiltonian(), ToleranceModel{}.tol(0.05));
  CHECK_FALSE(r.pass);
  CHECK(r.lambda_star >= 0.95);
  CHECK(r.lambda_dual <= 0.55);
}

TEST_CASE("floyd-warshall oracle") {
  const auto g = testing::euclidean_graph(testing::unit_box(0.25));
  const auto costs = edge_costs(*g, PNormHamiltonian(2), 1.0);
  const auto fw = floyd_warshall_oracle(*g, costs);
  for (std::size_t i = 0; i < fw.n; ++i) CHECK(fw(i, i) == 0.0);
  const auto big = testing::euclidean_graph(testing::unit_box(0.04));
  CHECK_THROWS_AS(floyd_warshall_oracle(*big, edge_costs(*big, PNormHamiltonian(2), 1.0)), ContractError);
}

TEST_CASE("counterexample suites pass") {
  const auto floor = counterexample_floor(0.05);
  for (const auto& c : floor.checks) CHECK_MESSAGE(c.pass, c.name);
  const auto half = counterexample_halfdisk(0.02);
  for (const auto& c : half.checks) CHECK_MESSAGE(c.pass, c.name);
}

TEST_CASE("bound suite") {
  const auto g = testing::euclidean_graph(testing::unit_box(1.0 / 14.0));
  const AnisotropicQuadratic a(testing::diag(1.0, 4.0));
  const auto r = bound_suite(*g, a);
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name);
  const auto again = bound_suite(*g, a);
  REQUIRE(again.checks.size() == r.checks.size());
  for (std::size_t i = 0; i < r.checks.size(); ++i) CHECK(again.checks[i].value == r.checks[i].value);
}

TEST_CASE("oracle suite") {
  const auto r = oracle_suite(6, 3);
  CHECK(r.pass());
}

TEST_CASE("tolerance model") {
  const ToleranceModel t;
  CHECK(t.tol(0.02) == doctest::Approx(0.02 + 1e-6));
  const double c1 = measure_c1(0.05, 3, 50, 1);
  CHECK(c1 > 0.0);
  CHECK(c1 <= t.c1);
}
