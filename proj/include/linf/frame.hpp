#pragma once

#include "linf/domain.hpp"
#include "linf/types.hpp"

#include <memory>
#include <string>

namespace linf {

/// Horizontal frame X_1..X_m on R^n, X_i = sum_l b_il(x) d/dx_l.
class Frame {
 public:
  virtual ~Frame() = default;

  virtual std::string name() const = 0;
  /// Ambient dimension n.
  virtual int n() const = 0;
  /// Horizontal dimension m.
  virtual int m() const = 0;
  /// Declared Hoermander step.
  virtual int step() const = 0;
  /// m x n coefficient matrix; row i holds X_i(x).
  virtual Mat coeff(const Vec& x) const = 0;

  /// Lattice spacing matched to mesh size h. The Heisenberg frame scales
  /// the vertical axis by h^2/2 so that horizontal unit steps from lattice
  /// points land on lattice points.
  virtual Vec lattice_spacing(double h) const;

  /// x + h * c^T coeff(x).
  Vec horizontal_step(const Vec& x, const Vec& c, double h) const;
};

using FramePtr = std::shared_ptr<const Frame>;

class EuclideanFrame final : public Frame {
 public:
  explicit EuclideanFrame(int n);
  std::string name() const override { return "euclidean"; }
  int n() const override { return n_; }
  int m() const override { return n_; }
  int step() const override { return 1; }
  Mat coeff(const Vec& x) const override;

 private:
  int n_;
};

/// X_1 = d/dx - (y/2) d/dz, X_2 = d/dy + (x/2) d/dz.
class HeisenbergFrame final : public Frame {
 public:
  std::string name() const override { return "heisenberg"; }
  int n() const override { return 3; }
  int m() const override { return 2; }
  int step() const override { return 2; }
  Mat coeff(const Vec& x) const override;
  Vec lattice_spacing(double h) const override;
};

/// X_1 = d/dx, X_2 = x d/dy.
class GrushinFrame final : public Frame {
 public:
  std::string name() const override { return "grushin"; }
  int n() const override { return 2; }
  int m() const override { return 2; }
  int step() const override { return 2; }
  Mat coeff(const Vec& x) const override;
};

/// "euclidean" (n from `dim`), "heisenberg" or "grushin". Throws ConfigError.
FramePtr make_frame(const std::string& name, int dim);

struct HorizontalGradient {
  Vec coeffs;
  /// Some component fell back to a one-sided difference.
  bool one_sided = false;
};

/// Central differences (u(x + h X_i) - u(x - h X_i)) / 2h with h the domain
/// mesh size; off-lattice points are interpolated multilinearly. Components
/// whose stencil leaves the domain use a one-sided difference instead (or 0
/// when neither side is available) and set the flag.
HorizontalGradient horizontal_gradient(const Frame& frame, const GridDomain& domain,
                                       const ScalarField& u, VertexId v);

/// Multilinear interpolation of u at x. Returns false if a contributing
/// lattice corner is not a domain vertex.
bool interpolate(const GridDomain& domain, const ScalarField& u, const Vec& x, double& out);

}  // namespace linf
