#pragma once

#include "linf/extension.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace linf {

enum class SweepOrder { Lexicographic, Random };
enum class BlendRule { Midpoint, Weighted };

struct SolverParams {
  /// Ball radii in units of h, applied coarse to fine within each sweep.
  std::vector<double> radii{4.0, 2.0};
  SweepOrder order = SweepOrder::Lexicographic;
  std::uint64_t seed = 1;
  int max_sweeps = 200;
  double residual_tol = 1e-3;
  /// Balls whose sandwich violation is at most keep_tol * residual_tol are
  /// left unchanged.
  double keep_tol = 0.1;
  BlendRule blend = BlendRule::Midpoint;
  Quadrature quad = Quadrature::Midpoint;
};

/// A discrete ball V of the solver domain with its own graph. The frontier
/// of V is as wide as the stencil, so every edge leaving an interior vertex
/// of V stays in V.
struct Ball {
  Vec center;
  double radius = 0.0;
  std::shared_ptr<const GridDomain> domain;
  std::shared_ptr<const DirectedGraph> graph;
};

/// Euclidean ball of `radius` around `center` restricted from the graph's
/// domain. Returns nullptr when the selection has no usable interior.
std::shared_ptr<Ball> make_ball(const DirectedGraph& graph, const Vec& center, double radius);

/// Balls of each radius (units of h) centered at every interior vertex.
std::vector<Ball> all_balls(const DirectedGraph& graph, const std::vector<double>& radii);
/// `count` balls with centers drawn uniformly from interior vertices and
/// radii uniform in [r_min, r_max] (units of h).
std::vector<Ball> random_balls(const DirectedGraph& graph, std::size_t count, double r_min, double r_max,
                               std::uint64_t seed);

struct SolverReport {
  int sweeps = 0;
  bool converged = false;
  double mu = 0.0;
  double final_residual = 0.0;
  /// Edge-wise energy after each sweep (index 0 is the initial field).
  std::vector<double> energy_trace;
  /// Central-difference energy after each sweep.
  std::vector<double> gradient_energy_trace;
  /// Largest sandwich violation seen during each sweep.
  std::vector<double> residual_trace;
  /// Mean per-ball sandwich violation during each sweep.
  std::vector<double> mean_violation_trace;
  /// Largest excursion outside the global McShane band after each sweep.
  std::vector<double> band_trace;
  std::size_t balls = 0;
  std::size_t colors = 0;
};

struct AmleResult {
  ScalarField u;
  SolverReport report;
};

/// Iterated local replacement starting from the midpoint of the global
/// McShane extensions. Each ball V gets the configured blend of the McShane
/// extensions of u restricted to the boundary of V. Disjoint balls are
/// processed in parallel. Throws ContractError if the edge-wise energy rises
/// by more than the residual tolerance in a sweep.
AmleResult solve_amle(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h,
                      const SolverParams& params);

struct BallCheck {
  Vec center;
  double radius = 0.0;
  double mu = 0.0;
  /// max (S-_V - u)^+ over V.
  double below = 0.0;
  /// max (u - S+_V)^+ over V.
  double above = 0.0;
  /// Central-difference energy of u over the interior of V.
  double energy = 0.0;
  /// Edge-wise energy of u on the graph of V.
  double graph_energy = 0.0;
};

struct SandwichReport {
  std::vector<BallCheck> balls;
  double max_violation = 0.0;
  double mean_violation = 0.0;
};

/// Local sub/superminimizer test of u on each ball.
SandwichReport sandwich_check(const ScalarField& u, const Hamiltonian& h, const std::vector<Ball>& balls,
                              Quadrature quad = Quadrature::Midpoint);

/// Energy of u on each ball next to the threshold of its own trace; an
/// absolute minimizer has the two agree.
std::vector<BallCheck> local_energy_profile(const ScalarField& u, const Hamiltonian& h,
                                            const std::vector<Ball>& balls,
                                            Quadrature quad = Quadrature::Midpoint);

}  // namespace linf
