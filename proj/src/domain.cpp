#include "linf/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>

namespace linf {

std::string to_string(ShapeKind shape) {
  switch (shape) {
    case ShapeKind::Box: return "box";
    case ShapeKind::Disk: return "disk";
    case ShapeKind::SlitDisk: return "slit-disk";
    case ShapeKind::Mask: return "mask";
  }
  return "unknown";
}

namespace {

double orient(const Vec& a, const Vec& b, const Vec& c) {
  return (b(0) - a(0)) * (c(1) - a(1)) - (b(1) - a(1)) * (c(0) - a(0));
}

bool within_box(const Vec& a, const Vec& b, const Vec& p) {
  return std::min(a(0), b(0)) <= p(0) && p(0) <= std::max(a(0), b(0)) &&
         std::min(a(1), b(1)) <= p(1) && p(1) <= std::max(a(1), b(1));
}

// Closed segments; touching counts as crossing.
bool segments_intersect(const Vec& p1, const Vec& p2, const Vec& q1, const Vec& q2) {
  const double d1 = orient(q1, q2, p1);
  const double d2 = orient(q1, q2, p2);
  const double d3 = orient(p1, p2, q1);
  const double d4 = orient(p1, p2, q2);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0)))
    return true;
  if (d1 == 0 && within_box(q1, q2, p1)) return true;
  if (d2 == 0 && within_box(q1, q2, p2)) return true;
  if (d3 == 0 && within_box(p1, p2, q1)) return true;
  if (d4 == 0 && within_box(p1, p2, q2)) return true;
  return false;
}

std::vector<std::vector<int>> chebyshev_offsets(int n, int width, bool axis_only) {
  std::vector<std::vector<int>> out;
  std::vector<int> off(static_cast<std::size_t>(n), -width);
  for (;;) {
    int nonzero = 0;
    for (int v : off) nonzero += v != 0;
    if (nonzero > 0 && (!axis_only || nonzero == 1)) out.push_back(off);
    int k = 0;
    while (k < n && off[static_cast<std::size_t>(k)] == width) off[static_cast<std::size_t>(k++)] = -width;
    if (k == n) break;
    ++off[static_cast<std::size_t>(k)];
  }
  return out;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;

std::uint64_t fnv(std::uint64_t h, const void* data, std::size_t len) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < len; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

std::size_t GridDomain::linear(std::span<const int> index) const {
  std::size_t l = 0;
  for (std::size_t k = extent_.size(); k-- > 0;) l = l * static_cast<std::size_t>(extent_[k]) + static_cast<std::size_t>(index[k]);
  return l;
}

GridDomain GridDomain::build(const DomainSpec& spec) {
  const auto n = spec.lo.size();
  if (n < 1 || n > kMaxDim || spec.hi.size() != n || spec.spacing.size() != n)
    throw ContractError("domain: inconsistent dimensions");
  GridDomain d;
  d.shape_ = spec.shape;
  d.lo_ = spec.lo;
  d.spacing_ = spec.spacing;
  std::size_t total = 1;
  for (Eigen::Index k = 0; k < n; ++k) {
    if (!(spec.spacing(k) > 0.0)) throw ContractError("domain: spacing must be positive");
    if (!(spec.hi(k) > spec.lo(k))) throw ContractError("domain: degenerate bounding box");
    const int count = static_cast<int>(std::floor((spec.hi(k) - spec.lo(k)) / spec.spacing(k) + 1e-9)) + 1;
    d.extent_.push_back(count);
    total *= static_cast<std::size_t>(count);
  }
  if (total > (std::size_t{1} << 31)) throw ContractError("domain: lattice too large");

  if (spec.shape == ShapeKind::Disk || spec.shape == ShapeKind::SlitDisk) {
    if (spec.center.size() != n) throw ContractError("domain: disk center has wrong dimension");
    if (!(spec.radius > 0.0)) throw ContractError("domain: radius must be positive");
  }
  if (spec.shape == ShapeKind::SlitDisk) {
    if (n != 2) throw ContractError("domain: slit-disk is planar");
    d.barriers_.push_back({spec.center, spec.center + make_vec({spec.radius, 0.0})});
  }

  std::vector<char> member(total, 0);
  std::vector<int> index(static_cast<std::size_t>(n), 0);
  const double slit_eps = 1e-9 * spec.spacing.minCoeff();
  for (std::size_t l = 0; l < total; ++l) {
    std::size_t rest = l;
    Vec x(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      index[static_cast<std::size_t>(k)] = static_cast<int>(rest % static_cast<std::size_t>(d.extent_[static_cast<std::size_t>(k)]));
      rest /= static_cast<std::size_t>(d.extent_[static_cast<std::size_t>(k)]);
      x(k) = spec.lo(k) + index[static_cast<std::size_t>(k)] * spec.spacing(k);
    }
    bool in = true;
    switch (spec.shape) {
      case ShapeKind::Box: break;
      case ShapeKind::Disk:
        in = (x - spec.center).norm() <= spec.radius * (1.0 + 1e-12);
        break;
      case ShapeKind::SlitDisk: {
        const Vec rel = x - spec.center;
        const bool on_slit = std::fabs(rel(1)) <= slit_eps && rel(0) >= -slit_eps && rel(0) < spec.radius;
        in = rel.norm() <= spec.radius * (1.0 + 1e-12) && !on_slit;
        break;
      }
      case ShapeKind::Mask: in = false; break;
    }
    member[l] = in ? 1 : 0;
  }
  if (spec.shape == ShapeKind::Mask) {
    for (const auto& idx : spec.mask) {
      if (idx.size() != static_cast<std::size_t>(n)) throw ContractError("domain: mask index has wrong dimension");
      for (std::size_t k = 0; k < idx.size(); ++k)
        if (idx[k] < 0 || idx[k] >= d.extent_[k]) throw ContractError("domain: mask index outside box");
      member[d.linear(idx)] = 1;
    }
  }
  d.classify(std::move(member), {}, 1);
  for (std::size_t v = 0; v < d.parent_.size(); ++v) d.parent_[v] = static_cast<VertexId>(v);
  d.parent_fingerprint_ = d.fingerprint_;
  return d;
}

GridDomain GridDomain::restrict(const std::function<bool(const Vec&)>& keep, int frontier_width) const {
  if (frontier_width < 1) throw ContractError("restrict: frontier width must be >= 1");
  GridDomain d;
  d.shape_ = ShapeKind::Mask;
  d.lo_ = lo_;
  d.spacing_ = spacing_;
  d.extent_ = extent_;
  d.barriers_ = barriers_;
  std::vector<char> member(lattice_to_vertex_.size(), 0);
  std::vector<VertexId> parent_of_point(lattice_to_vertex_.size(), kNoVertex);
  for (std::size_t v = 0; v < size(); ++v) {
    const auto id = static_cast<VertexId>(v);
    const std::size_t l = linear(lattice_index(id));
    if (keep(coord(id))) {
      member[l] = 1;
      parent_of_point[l] = id;
    }
  }
  d.classify(std::move(member), parent_of_point, frontier_width);
  d.parent_fingerprint_ = fingerprint_;
  return d;
}

void GridDomain::classify(std::vector<char> member, const std::vector<VertexId>& parent_of_point,
                          int frontier_width) {
  const int n = dim();
  const std::size_t total = member.size();
  const auto frontier = chebyshev_offsets(n, frontier_width, false);
  const auto axis = chebyshev_offsets(n, 1, true);

  std::vector<int> idx(static_cast<std::size_t>(n));
  std::vector<int> nb(static_cast<std::size_t>(n));
  auto unpack = [&](std::size_t l, std::vector<int>& out) {
    for (int k = 0; k < n; ++k) {
      out[static_cast<std::size_t>(k)] = static_cast<int>(l % static_cast<std::size_t>(extent_[static_cast<std::size_t>(k)]));
      l /= static_cast<std::size_t>(extent_[static_cast<std::size_t>(k)]);
    }
  };
  auto point = [&](const std::vector<int>& i) {
    Vec x(n);
    for (int k = 0; k < n; ++k) x(k) = lo_(k) + i[static_cast<std::size_t>(k)] * spacing_(k);
    return x;
  };
  // Linear index of idx + off, or total if it leaves the lattice.
  auto step = [&](const std::vector<int>& off) -> std::size_t {
    for (int k = 0; k < n; ++k) {
      const int j = idx[static_cast<std::size_t>(k)] + off[static_cast<std::size_t>(k)];
      if (j < 0 || j >= extent_[static_cast<std::size_t>(k)]) return total;
      nb[static_cast<std::size_t>(k)] = j;
    }
    return linear(nb);
  };
  // Whether the segment from idx to the last stepped neighbour nb is clear.
  auto link_open = [&]() {
    return barriers_.empty() || !blocked(point(idx), point(nb));
  };

  std::vector<char> interior(total, 0);
  for (std::size_t l = 0; l < total; ++l) {
    if (!member[l]) continue;
    unpack(l, idx);
    bool inside = true;
    for (const auto& off : frontier) {
      const std::size_t o = step(off);
      if (o == total || !member[o] || !link_open()) {
        inside = false;
        break;
      }
    }
    interior[l] = inside ? 1 : 0;
  }
  // Boundary points out of frontier reach of the interior carry no
  // information; dropping them leaves every interior point's neighbourhood
  // intact.
  for (std::size_t l = 0; l < total; ++l) {
    if (!member[l] || interior[l]) continue;
    unpack(l, idx);
    bool touches = false;
    for (const auto& off : frontier) {
      const std::size_t o = step(off);
      if (o != total && interior[o] && link_open()) {
        touches = true;
        break;
      }
    }
    if (!touches) member[l] = 0;
  }

  // Single axis-connected interior component.
  std::size_t interior_count = 0, first = total;
  for (std::size_t l = 0; l < total; ++l) {
    if (interior[l]) {
      ++interior_count;
      if (first == total) first = l;
    }
  }
  if (interior_count == 0) throw ContractError("domain: empty interior");
  std::vector<char> seen(total, 0);
  std::deque<std::size_t> queue{first};
  seen[first] = 1;
  std::size_t reached = 1;
  while (!queue.empty()) {
    const std::size_t l = queue.front();
    queue.pop_front();
    unpack(l, idx);
    for (const auto& off : axis) {
      const std::size_t o = step(off);
      if (o == total || !interior[o] || seen[o] || !link_open()) continue;
      seen[o] = 1;
      ++reached;
      queue.push_back(o);
    }
  }
  if (reached != interior_count) throw ContractError("domain: disconnected interior");

  lattice_to_vertex_.assign(total, kNoVertex);
  indices_.clear();
  parent_.clear();
  boundary_flag_.clear();
  boundary_.clear();
  interior_.clear();
  for (std::size_t l = 0; l < total; ++l) {
    if (!member[l]) continue;
    const auto v = static_cast<VertexId>(parent_.size());
    lattice_to_vertex_[l] = v;
    unpack(l, idx);
    indices_.insert(indices_.end(), idx.begin(), idx.end());
    parent_.push_back(parent_of_point.empty() ? v : parent_of_point[l]);
    boundary_flag_.push_back(interior[l] ? 0 : 1);
    (interior[l] ? interior_ : boundary_).push_back(v);
  }
  boundary_slot_.assign(parent_.size(), -1);
  for (std::size_t i = 0; i < boundary_.size(); ++i)
    boundary_slot_[static_cast<std::size_t>(boundary_[i])] = static_cast<int>(i);

  std::uint64_t h = kFnvOffset;
  h = fnv(h, extent_.data(), extent_.size() * sizeof(int));
  h = fnv(h, lo_.data(), static_cast<std::size_t>(lo_.size()) * sizeof(double));
  h = fnv(h, spacing_.data(), static_cast<std::size_t>(spacing_.size()) * sizeof(double));
  h = fnv(h, indices_.data(), indices_.size() * sizeof(int));
  h = fnv(h, boundary_flag_.data(), boundary_flag_.size());
  fingerprint_ = h;
}

Vec GridDomain::coord(VertexId v) const {
  const int n = dim();
  Vec x(n);
  const int* idx = indices_.data() + static_cast<std::size_t>(v) * static_cast<std::size_t>(n);
  for (int k = 0; k < n; ++k) x(k) = lo_(k) + idx[k] * spacing_(k);
  return x;
}

std::span<const int> GridDomain::lattice_index(VertexId v) const {
  const auto n = static_cast<std::size_t>(dim());
  return {indices_.data() + static_cast<std::size_t>(v) * n, n};
}

VertexId GridDomain::vertex_at(std::span<const int> index) const {
  for (std::size_t k = 0; k < extent_.size(); ++k)
    if (index[k] < 0 || index[k] >= extent_[k]) return kNoVertex;
  return lattice_to_vertex_[linear(index)];
}

VertexId GridDomain::nearest_vertex(const Vec& x) const {
  if (x.size() != dim()) throw ContractError("domain: point has wrong dimension");
  int idx[kMaxDim];
  for (int k = 0; k < dim(); ++k) {
    const double t = std::round((x(k) - lo_(k)) / spacing_(k));
    if (t < 0 || t >= extent_[static_cast<std::size_t>(k)]) return kNoVertex;
    idx[k] = static_cast<int>(t);
  }
  return vertex_at({idx, static_cast<std::size_t>(dim())});
}

VertexId GridDomain::closest_vertex(const Vec& x) const {
  VertexId best = kNoVertex;
  double best_d = kInf;
  for (std::size_t v = 0; v < size(); ++v) {
    const double d = (coord(static_cast<VertexId>(v)) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<VertexId>(v);
    }
  }
  return best;
}

bool GridDomain::blocked(const Vec& a, const Vec& b) const {
  for (const auto& bar : barriers_)
    if (segments_intersect(a, b, bar.a, bar.b)) return true;
  return false;
}

ScalarField sample_field(const GridDomain& domain, const std::function<double(const Vec&)>& f,
                         std::string provenance) {
  ScalarField u;
  u.values.resize(domain.size());
  for (std::size_t v = 0; v < domain.size(); ++v) u.values[v] = f(domain.coord(static_cast<VertexId>(v)));
  u.domain_fingerprint = domain.fingerprint();
  u.provenance = std::move(provenance);
  return u;
}

BoundaryFunction BoundaryFunction::sample(const GridDomain& domain,
                                          const std::function<double(const Vec&)>& g) {
  BoundaryFunction b;
  b.domain_fingerprint = domain.fingerprint();
  for (VertexId v : domain.boundary()) {
    const double value = g(domain.coord(v));
    if (!std::isfinite(value)) throw ContractError("boundary data is not finite");
    b.values.push_back(value);
  }
  return b;
}

BoundaryFunction BoundaryFunction::trace(const GridDomain& domain, const ScalarField& u) {
  if (u.domain_fingerprint != domain.fingerprint() || u.size() != domain.size())
    throw ContractError("trace: field belongs to a different domain");
  BoundaryFunction b;
  b.domain_fingerprint = domain.fingerprint();
  for (VertexId v : domain.boundary()) b.values.push_back(u[v]);
  return b;
}

BoundaryFunction BoundaryFunction::from_points(const GridDomain& domain, std::span<const Vec> points,
                                               std::span<const double> values) {
  if (points.size() != values.size()) throw ContractError("boundary data: size mismatch");
  BoundaryFunction b;
  b.domain_fingerprint = domain.fingerprint();
  b.values.assign(domain.boundary().size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < points.size(); ++i) {
    const VertexId v = domain.nearest_vertex(points[i]);
    if (v == kNoVertex || !domain.is_boundary(v)) continue;
    if (!std::isfinite(values[i])) throw ContractError("boundary data is not finite");
    b.values[static_cast<std::size_t>(domain.boundary_slot(v))] = values[i];
  }
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    if (std::isnan(b.values[i])) {
      const Vec x = domain.coord(domain.boundary()[i]);
      std::string where;
      for (Eigen::Index k = 0; k < x.size(); ++k) where += (k ? "," : "") + std::to_string(x(k));
      throw ContractError("boundary data missing at boundary vertex (" + where + ")");
    }
  }
  return b;
}

}  // namespace linf
