#pragma once

#include "linf/domain.hpp"
#include "linf/frame.hpp"
#include "linf/hamiltonian.hpp"
#include "linf/metric.hpp"

#include <cmath>
#include <string>

namespace linf {

struct MuOptions {
  /// Relative bisection tolerance.
  double rel_tol = 1e-6;
  /// Upper limit for the doubling bracket search.
  double cap = 1048576.0;
  Quadrature quad = Quadrature::Midpoint;
  /// Reject data whose threshold does not exceed a positive lambda_H.
  bool reject_below_lambda_h = true;
  /// Precomputed lambda_H; NaN means compute it.
  double lambda_h = std::numeric_limits<double>::quiet_NaN();
};

/// Smallest level mu with g(y) - g(x) <= d_mu(x, y) for all boundary pairs.
struct CompatibilityResult {
  double mu = 0.0;
  /// Boundary vertices attaining the tightest constraint (kNoVertex when mu = 0).
  VertexId witness_x = kNoVertex;
  VertexId witness_y = kNoVertex;
  int iterations = 0;
  double tolerance = 0.0;
  double lambda_h = 0.0;
  /// "ratio" for level-homogeneous Hamiltonians, "bisection" otherwise.
  std::string method;
};

/// Level-homogeneous Hamiltonians are solved exactly as the largest ratio
/// (g(y) - g(x)) / d_1(x, y); others by doubling from 1 and bisection.
/// Throws IncompatibleBoundaryError when no level up to the cap is
/// feasible, and ContractError when 0 < mu <= lambda_H (unless disabled).
CompatibilityResult mu_threshold(const BoundaryFunction& g, const DirectedGraph& graph,
                                 const Hamiltonian& h, const MuOptions& options = {});

/// Upper McShane extension min_y g(y) + d_mu(y, x). Equals g on the boundary.
ScalarField mcshane_upper(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h,
                          double mu, Quadrature quad = Quadrature::Midpoint);
/// Lower McShane extension max_y g(y) - d_mu(x, y). Equals g on the boundary.
ScalarField mcshane_lower(const BoundaryFunction& g, const DirectedGraph& graph, const Hamiltonian& h,
                          double mu, Quadrature quad = Quadrature::Midpoint);

struct EnergyReport {
  /// Max of H(x, Xu) over interior vertices with a central-difference gradient.
  double headline = 0.0;
  /// Max over all interior vertices, one-sided ones included.
  double with_one_sided = 0.0;
  VertexId argmax = kNoVertex;
  std::size_t one_sided = 0;
};

/// Discrete L-infinity energy of u over the interior of `domain`.
EnergyReport energy(const ScalarField& u, const GridDomain& domain, const Frame& frame,
                    const Hamiltonian& h);

/// Smallest level lambda with u(b) - u(a) <= cost_lambda(a -> b) on every
/// edge; +inf if none up to 2^20.
double graph_energy(const ScalarField& u, const DirectedGraph& graph, const Hamiltonian& h,
                    Quadrature quad = Quadrature::Midpoint);

/// t u + (1 - t) v.
ScalarField blend(const ScalarField& u, const ScalarField& v, double t);
ScalarField pointwise_max(const ScalarField& u, const ScalarField& v);
ScalarField pointwise_min(const ScalarField& u, const ScalarField& v);

/// u outside V, `replacement` on V. V must be a restriction of u's domain;
/// the replacement must agree with u on the boundary of V within tol.
ScalarField glue(const ScalarField& u, const GridDomain& v, const ScalarField& replacement,
                 double tol = 1e-9);

}  // namespace linf
