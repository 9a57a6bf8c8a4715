#pragma once

#include "linf/amle.hpp"
#include "linf/extension.hpp"
#include "linf/metric.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace linf {

/// tol(h) = c1 * h + bisection. c1 is pinned; suites also report the value
/// measured on the Euclidean closed-form case.
struct ToleranceModel {
  double c1 = 1.0;
  double bisection = 1e-6;
  double tol(double h) const { return c1 * h + bisection; }
};

/// Max absolute error of d_1 against |x - y| per unit h on the unit box
/// with H = |p|, over `pairs` seeded vertex pairs.
double measure_c1(double h, int stencil_radius, std::size_t pairs = 200, std::uint64_t seed = 7);

/// Central-difference energy (one-sided vertices excluded).
double lambda_star(const ScalarField& u, const GridDomain& domain, const Frame& frame, const Hamiltonian& h);

struct DualOptions {
  double rel_tol = 1e-6;
  /// All pairs up to this many vertices, otherwise sampled sources against
  /// every target.
  std::size_t exhaustive_limit = 225;
  std::size_t source_budget = 64;
  std::uint64_t seed = 1;
  Quadrature quad = Quadrature::Midpoint;
};

/// Smallest lambda with u(y) - u(x) <= d_lambda(x, y) on the tested pairs.
double lambda_dual(const ScalarField& u, const DirectedGraph& graph, const Hamiltonian& h,
                   const DualOptions& options = {});

struct RademacherReport {
  double lambda_star = 0.0;
  double lambda_star_with_one_sided = 0.0;
  double lambda_dual = 0.0;
  double lambda_h = 0.0;
  double gap = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// gap = |max(lambda_H, lambda*) - max(lambda_H, lambda_dual)|; passes when
/// gap <= tolerance.
RademacherReport rademacher_report(const ScalarField& u, const DirectedGraph& graph, const Hamiltonian& h,
                                   double tolerance, const DualOptions& options = {});

/// Cubic all-pairs relaxation over every vertex (at most 500).
DistanceMatrix floyd_warshall_oracle(const DirectedGraph& graph, const std::vector<double>& costs);

struct Check {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double limit = 0.0;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<Check> checks;
  /// Measured discretization constant, where the suite computes one.
  double measured_c1 = std::numeric_limits<double>::quiet_NaN();
  bool pass() const;
  void add(std::string name, bool pass, double value, double limit, std::string detail = {});
};

/// Floor-norm Hamiltonian on the box [-1,1]^2 at mesh h: the level-0.5
/// distance coincides bitwise with d_CC, and the Rademacher identity fails
/// for u = d_CC(0, .) with lambda* >= 0.95, lambda_dual <= 0.55, gap >= 0.4.
SuiteReport counterexample_floor(double h);

/// Half-disk Hamiltonian on the unit disk at mesh h: zero inner radius at
/// level 1, free leftward motion, full rightward cost, strong asymmetry and
/// lambda_H = 2.
SuiteReport counterexample_halfdisk(double h);

struct BoundSpec {
  std::vector<double> lambdas{0.5, 1.0, 2.0};
  std::size_t pairs = 500;
  std::uint64_t seed = 3;
  Quadrature quad = Quadrature::Midpoint;
};

/// Comparability R'_lambda d_CC <= d_lambda <= R_lambda d_CC and
/// monotonicity in lambda on sampled pairs (exact), and the midpoint defect
/// against the largest edge cost (all pairs up to 225 vertices, sampled
/// pairs otherwise).
SuiteReport bound_suite(const DirectedGraph& graph, const Hamiltonian& h, const BoundSpec& spec = {});

/// Dijkstra all-pairs against Floyd-Warshall on `configs` seeded random
/// small grids (Euclidean and Heisenberg frames; p-norm, half-disk and
/// floor-norm Hamiltonians).
SuiteReport oracle_suite(std::size_t configs = 20, std::uint64_t seed = 11);

/// Rademacher identity on ten fields (linear, cones and blends) for the
/// Euclidean norm and A = diag(1,4) on the unit box at mesh h.
SuiteReport rademacher_suite(double h, int stencil_radius = 5, const ToleranceModel& tol = {});

}  // namespace linf
