#pragma once

#include "linf/domain.hpp"
#include "linf/frame.hpp"
#include "linf/hamiltonian.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace linf {

/// Horizontal coefficient stencil: c in Z^m with 0 < |c|_inf <= radius and
/// coprime components.
struct StencilSpec {
  int radius = 1;

  /// Sorted lexicographically; closed under negation.
  std::vector<std::vector<int>> coefficients(int m) const;
};

enum class Quadrature { Midpoint, Trapezoid };

std::string to_string(Quadrature q);

using EdgeId = std::int64_t;

/// Directed graph on domain vertices. Each vertex a has an edge per stencil
/// vector c to the lattice vertex nearest to a + h c^T coeff(a); targets
/// outside the domain, self-loops and barrier crossings are dropped.
/// Forward and reverse adjacency are both stored in CSR form.
class DirectedGraph {
 public:
  /// Throws ContractError if an interior vertex has no outgoing or no
  /// incoming edge.
  static DirectedGraph build(std::shared_ptr<const GridDomain> domain, FramePtr frame,
                             StencilSpec stencil);

  const GridDomain& domain() const { return *domain_; }
  std::shared_ptr<const GridDomain> domain_ptr() const { return domain_; }
  const Frame& frame() const { return *frame_; }
  FramePtr frame_ptr() const { return frame_; }
  const StencilSpec& stencil() const { return stencil_; }
  const std::vector<std::vector<int>>& coefficients() const { return coefficients_; }

  std::size_t vertex_count() const { return domain_->size(); }
  std::size_t edge_count() const { return targets_.size(); }

  EdgeId out_begin(VertexId v) const { return offsets_[static_cast<std::size_t>(v)]; }
  EdgeId out_end(VertexId v) const { return offsets_[static_cast<std::size_t>(v) + 1]; }
  VertexId source(EdgeId e) const { return sources_[static_cast<std::size_t>(e)]; }
  VertexId target(EdgeId e) const { return targets_[static_cast<std::size_t>(e)]; }
  /// Index into coefficients() of the stencil vector of edge e.
  int stencil_index(EdgeId e) const { return stencil_index_[static_cast<std::size_t>(e)]; }
  /// Horizontal displacement h c of edge e.
  Vec displacement(EdgeId e) const;

  /// Edges entering v, as forward edge ids.
  std::size_t in_begin(VertexId v) const { return in_offsets_[static_cast<std::size_t>(v)]; }
  std::size_t in_end(VertexId v) const { return in_offsets_[static_cast<std::size_t>(v) + 1]; }
  EdgeId in_edge(std::size_t slot) const { return in_edges_[slot]; }

  /// Cheapest edge a -> b, or -1.
  EdgeId find_edge(VertexId a, VertexId b, const std::vector<double>& costs) const;

 private:
  DirectedGraph() = default;

  std::shared_ptr<const GridDomain> domain_;
  FramePtr frame_;
  StencilSpec stencil_;
  std::vector<std::vector<int>> coefficients_;

  std::vector<EdgeId> offsets_;
  std::vector<VertexId> sources_;
  std::vector<VertexId> targets_;
  std::vector<std::uint16_t> stencil_index_;
  std::vector<std::size_t> in_offsets_;
  std::vector<EdgeId> in_edges_;
};

/// Cost of a single edge at level lambda: the support function of the
/// lambda-sublevel set in the edge's displacement, evaluated at the edge
/// midpoint or averaged over the endpoints.
double edge_cost(const DirectedGraph& g, EdgeId e, const Hamiltonian& h, double lambda,
                 Quadrature quad = Quadrature::Midpoint);

/// All edge costs at level lambda. x-independent Hamiltonians are evaluated
/// once per stencil vector.
std::vector<double> edge_costs(const DirectedGraph& g, const Hamiltonian& h, double lambda,
                               Quadrature quad = Quadrature::Midpoint);

enum class Direction { From, To };

/// Shortest-path values from a source set (Direction::From) or to a target
/// set (Direction::To). Unreachable vertices hold +inf.
struct DistanceField {
  std::vector<double> values;
  /// Predecessor (From) or successor (To) on a shortest path; kNoVertex at
  /// anchors and unreachable vertices.
  std::vector<VertexId> next;
  VertexId anchor = kNoVertex;
  Direction direction = Direction::From;
  double level = 0.0;
  std::uint64_t domain_fingerprint = 0;
  /// Set when the level has zero inner radius (distances may degenerate).
  std::string warning;

  double operator[](VertexId v) const { return values[static_cast<std::size_t>(v)]; }
  std::size_t size() const { return values.size(); }
};

/// Dijkstra with initial potentials: value(v) = min over seeds s of
/// potential(s) + d(s, v) (From) or potential(s) + d(v, s) (To).
DistanceField multi_source(const DirectedGraph& g, const std::vector<double>& costs,
                           std::span<const VertexId> seeds, std::span<const double> potentials,
                           Direction direction);

DistanceField dist_from(const DirectedGraph& g, const std::vector<double>& costs, VertexId source);
DistanceField dist_to(const DirectedGraph& g, const std::vector<double>& costs, VertexId target);

/// Level-tagged convenience overloads; they attach the degenerate-level
/// warning when r_inner(lambda) = 0.
DistanceField dist_from(const DirectedGraph& g, const Hamiltonian& h, double lambda, VertexId source,
                        Quadrature quad = Quadrature::Midpoint);
DistanceField dist_to(const DirectedGraph& g, const Hamiltonian& h, double lambda, VertexId target,
                      Quadrature quad = Quadrature::Midpoint);

/// Carnot-Caratheodory distance from source: unit Euclidean ball support.
DistanceField cc_distance(const DirectedGraph& g, VertexId source);

/// Row-major |subset| x |subset| matrix D[i][j] = d(subset[i], subset[j]).
struct DistanceMatrix {
  std::size_t n = 0;
  std::vector<double> values;
  double operator()(std::size_t i, std::size_t j) const { return values[i * n + j]; }
};

DistanceMatrix all_pairs(const DirectedGraph& g, const std::vector<double>& costs,
                         std::span<const VertexId> subset);

/// Sum of edge costs along consecutive vertices (cheapest parallel edge).
/// Throws ContractError naming the first missing edge.
double path_length(const DirectedGraph& g, const std::vector<double>& costs,
                   std::span<const VertexId> path);

/// Vertex sequence source -> ... -> v recovered from a From field, or
/// v -> ... -> target from a To field. Empty if v is unreachable.
std::vector<VertexId> extract_path(const DistanceField& field, VertexId v);

/// inf_z max(d(x,z), d(z,y)) - d(x,y)/2 over all vertices z.
double midpoint_defect(const DistanceField& from_x, const DistanceField& to_y, VertexId y);
double midpoint_defect(const DirectedGraph& g, const std::vector<double>& costs, VertexId x,
                       VertexId y);

/// Warning text for levels with vanishing inner radius, empty otherwise.
std::string level_warning(const Hamiltonian& h, double lambda);

}  // namespace linf
