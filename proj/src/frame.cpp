#include "linf/frame.hpp"

#include <cmath>

namespace linf {

Vec Frame::lattice_spacing(double h) const { return Vec::Constant(n(), h); }

Vec Frame::horizontal_step(const Vec& x, const Vec& c, double h) const {
  if (x.size() != n() || c.size() != m()) throw ContractError(name() + ": horizontal step dimension mismatch");
  return x + h * (coeff(x).transpose() * c);
}

EuclideanFrame::EuclideanFrame(int n) : n_(n) {
  if (n < 1 || n > kMaxDim) throw ContractError("euclidean frame: unsupported dimension");
}

Mat EuclideanFrame::coeff(const Vec&) const { return Mat::Identity(n_, n_); }

Mat HeisenbergFrame::coeff(const Vec& x) const {
  Mat b(2, 3);
  b << 1.0, 0.0, -0.5 * x(1),
       0.0, 1.0, 0.5 * x(0);
  return b;
}

Vec HeisenbergFrame::lattice_spacing(double h) const { return make_vec({h, h, 0.5 * h * h}); }

Mat GrushinFrame::coeff(const Vec& x) const {
  Mat b(2, 2);
  b << 1.0, 0.0,
       0.0, x(0);
  return b;
}

FramePtr make_frame(const std::string& name, int dim) {
  if (name == "euclidean") return std::make_shared<EuclideanFrame>(dim);
  if (name == "heisenberg") {
    if (dim != 3) throw ConfigError("heisenberg frame needs a 3-dimensional domain");
    return std::make_shared<HeisenbergFrame>();
  }
  if (name == "grushin") {
    if (dim != 2) throw ConfigError("grushin frame needs a 2-dimensional domain");
    return std::make_shared<GrushinFrame>();
  }
  throw ConfigError("unknown frame '" + name + "'");
}

bool interpolate(const GridDomain& domain, const ScalarField& u, const Vec& x, double& out) {
  const int n = domain.dim();
  int base[kMaxDim];
  double frac[kMaxDim];
  for (int k = 0; k < n; ++k) {
    const double t = (x(k) - domain.lo()(k)) / domain.spacing()(k);
    const double r = std::round(t);
    // Points within round-off of a lattice plane are treated as on it so
    // that the neighbouring corner is not required.
    if (std::fabs(t - r) < 1e-9) {
      base[k] = static_cast<int>(r);
      frac[k] = 0.0;
    } else {
      base[k] = static_cast<int>(std::floor(t));
      frac[k] = t - base[k];
    }
  }
  double acc = 0.0;
  int idx[kMaxDim];
  for (int corner = 0; corner < (1 << n); ++corner) {
    double w = 1.0;
    for (int k = 0; k < n; ++k) {
      const bool up = (corner >> k) & 1;
      if (up && frac[k] == 0.0) {
        w = 0.0;
        break;
      }
      w *= up ? frac[k] : 1.0 - frac[k];
      idx[k] = base[k] + (up ? 1 : 0);
    }
    if (w == 0.0) continue;
    const VertexId v = domain.vertex_at({idx, static_cast<std::size_t>(n)});
    if (v == kNoVertex) return false;
    acc += w * u[v];
  }
  out = acc;
  return true;
}

HorizontalGradient horizontal_gradient(const Frame& frame, const GridDomain& domain,
                                       const ScalarField& u, VertexId v) {
  if (frame.n() != domain.dim()) throw ContractError("frame and domain dimensions differ");
  const int m = frame.m();
  const double h = domain.h();
  const Vec x = domain.coord(v);
  const double ux = u[v];
  HorizontalGradient g{Vec::Zero(m), false};
  for (int i = 0; i < m; ++i) {
    Vec c = Vec::Zero(m);
    c(i) = 1.0;
    double fwd = 0.0, bwd = 0.0;
    const bool has_fwd = interpolate(domain, u, frame.horizontal_step(x, c, h), fwd);
    const bool has_bwd = interpolate(domain, u, frame.horizontal_step(x, -c, h), bwd);
    if (has_fwd && has_bwd) {
      g.coeffs(i) = (fwd - bwd) / (2.0 * h);
    } else {
      g.one_sided = true;
      if (has_fwd) g.coeffs(i) = (fwd - ux) / h;
      else if (has_bwd) g.coeffs(i) = (ux - bwd) / h;
    }
  }
  return g;
}

}  // namespace linf
