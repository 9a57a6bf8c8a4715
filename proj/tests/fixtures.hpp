#pragma once

#include "linf/domain.hpp"
#include "linf/frame.hpp"
#include "linf/metric.hpp"

#include <memory>

namespace linf::testing {

inline std::shared_ptr<const GridDomain> box(Vec lo, Vec hi, double h) {
  DomainSpec spec;
  spec.lo = lo;
  spec.hi = hi;
  spec.spacing = Vec::Constant(lo.size(), h);
  return std::make_shared<const GridDomain>(GridDomain::build(spec));
}

inline std::shared_ptr<const GridDomain> unit_box(double h) {
  return box(make_vec({0.0, 0.0}), make_vec({1.0, 1.0}), h);
}

inline std::shared_ptr<const GridDomain> disk(double h, ShapeKind shape = ShapeKind::Disk) {
  DomainSpec spec;
  spec.shape = shape;
  spec.lo = make_vec({-1.0, -1.0});
  spec.hi = make_vec({1.0, 1.0});
  spec.spacing = make_vec({h, h});
  spec.center = make_vec({0.0, 0.0});
  spec.radius = 1.0;
  return std::make_shared<const GridDomain>(GridDomain::build(spec));
}

inline std::shared_ptr<const DirectedGraph> euclidean_graph(std::shared_ptr<const GridDomain> d, int s = 1) {
  const int n = d->dim();
  return std::make_shared<const DirectedGraph>(DirectedGraph::build(std::move(d), make_frame("euclidean", n),
                                                                    StencilSpec{s}));
}

inline Mat diag(double a, double b) {
  Mat m = Mat::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace linf::testing
