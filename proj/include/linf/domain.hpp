#pragma once

#include "linf/types.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace linf {

enum class ShapeKind { Box, Disk, SlitDisk, Mask };

std::string to_string(ShapeKind shape);

struct DomainSpec {
  ShapeKind shape = ShapeKind::Box;
  Vec lo;
  Vec hi;
  /// Per-axis lattice spacing.
  Vec spacing;
  /// Disk and slit-disk only. The slit runs from the center along +x1 to
  /// the rim.
  Vec center;
  double radius = 1.0;
  /// Mask only: lattice multi-indices of the selected points.
  std::vector<std::vector<int>> mask;
};

/// Planar obstacle segment: lattice edges crossing it do not exist.
struct Barrier {
  Vec a;
  Vec b;
};

/// Lattice discretization of a bounded domain.
///
/// The selected point set is split into a thin discrete boundary (points
/// with a lattice neighbour outside the set, or across a barrier) and the
/// interior. Boundary points farther than the frontier width (Chebyshev, in
/// lattice steps) from every interior point are dropped, and the interior
/// must be a single axis-connected component.
class GridDomain {
 public:
  /// Throws ContractError for an empty or disconnected interior.
  static GridDomain build(const DomainSpec& spec);

  /// Sub-domain of the points accepted by `keep`. The boundary is the
  /// discrete frontier of the selection: points with a lattice point within
  /// Chebyshev distance `frontier_width` outside it. Throws ContractError if
  /// the selection has no interior or a disconnected one.
  GridDomain restrict(const std::function<bool(const Vec&)>& keep, int frontier_width = 1) const;

  int dim() const { return static_cast<int>(spacing_.size()); }
  const Vec& spacing() const { return spacing_; }
  /// Nominal mesh size (spacing along the first axis).
  double h() const { return spacing_(0); }
  const Vec& lo() const { return lo_; }
  const std::vector<int>& extent() const { return extent_; }
  ShapeKind shape() const { return shape_; }
  const std::vector<Barrier>& barriers() const { return barriers_; }

  std::size_t size() const { return parent_.size(); }
  Vec coord(VertexId v) const;
  std::span<const int> lattice_index(VertexId v) const;
  VertexId vertex_at(std::span<const int> index) const;
  /// Vertex at the lattice point nearest to x, or kNoVertex if that point is
  /// not part of the domain.
  VertexId nearest_vertex(const Vec& x) const;
  /// Closest vertex by Euclidean distance (linear scan).
  VertexId closest_vertex(const Vec& x) const;

  bool is_boundary(VertexId v) const { return boundary_flag_[static_cast<std::size_t>(v)] != 0; }
  std::span<const VertexId> boundary() const { return boundary_; }
  std::span<const VertexId> interior() const { return interior_; }
  /// Position of a boundary vertex inside boundary(), or -1.
  int boundary_slot(VertexId v) const { return boundary_slot_[static_cast<std::size_t>(v)]; }

  /// True if the straight segment a-b crosses a barrier.
  bool blocked(const Vec& a, const Vec& b) const;

  /// Vertex id in the domain this one was restricted from (identity for
  /// built domains).
  VertexId parent(VertexId v) const { return parent_[static_cast<std::size_t>(v)]; }

  /// Hash of lattice geometry and vertex set; fields carry it to detect
  /// mixing values from different domains.
  std::uint64_t fingerprint() const { return fingerprint_; }
  /// Fingerprint of the domain parent() refers to.
  std::uint64_t parent_fingerprint() const { return parent_fingerprint_; }

 private:
  GridDomain() = default;
  void classify(std::vector<char> member, const std::vector<VertexId>& parent_of_point,
                int frontier_width);
  std::size_t linear(std::span<const int> index) const;

  ShapeKind shape_ = ShapeKind::Box;
  Vec lo_;
  Vec spacing_;
  std::vector<int> extent_;
  std::vector<Barrier> barriers_;

  std::vector<VertexId> lattice_to_vertex_;
  std::vector<int> indices_;  // dim() per vertex
  std::vector<VertexId> parent_;
  std::vector<char> boundary_flag_;
  std::vector<int> boundary_slot_;
  std::vector<VertexId> boundary_;
  std::vector<VertexId> interior_;
  std::uint64_t fingerprint_ = 0;
  std::uint64_t parent_fingerprint_ = 0;
};

/// Per-vertex real values on a GridDomain.
struct ScalarField {
  std::vector<double> values;
  std::uint64_t domain_fingerprint = 0;
  /// What produced the field, e.g. "mcshane-upper".
  std::string provenance;
  /// Level (lambda or mu) used to produce it; NaN if not applicable.
  double level = std::numeric_limits<double>::quiet_NaN();

  double operator[](VertexId v) const { return values[static_cast<std::size_t>(v)]; }
  double& operator[](VertexId v) { return values[static_cast<std::size_t>(v)]; }
  std::size_t size() const { return values.size(); }
};

ScalarField sample_field(const GridDomain& domain, const std::function<double(const Vec&)>& f,
                         std::string provenance = "sampled");

/// Boundary datum g, one value per entry of GridDomain::boundary().
struct BoundaryFunction {
  std::vector<double> values;
  std::uint64_t domain_fingerprint = 0;

  static BoundaryFunction sample(const GridDomain& domain,
                                 const std::function<double(const Vec&)>& g);
  /// Trace of a field on the domain boundary.
  static BoundaryFunction trace(const GridDomain& domain, const ScalarField& u);
  /// Values given at explicit points, matched to boundary vertices by
  /// nearest lattice point. Every boundary vertex must be covered.
  static BoundaryFunction from_points(const GridDomain& domain, std::span<const Vec> points,
                                      std::span<const double> values);
};

}  // namespace linf
