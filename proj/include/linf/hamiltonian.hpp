#pragma once

#include "linf/types.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace linf {

/// Outer and inner radii of the level band of a Hamiltonian at `lambda`:
/// r_outer = sup{|p| : H(x,p) <= lambda}, r_inner = inf{|p| : H(x,p) >= lambda},
/// both taken over all x in the configured domain.
struct SublevelRadii {
  double lambda = 0.0;
  double r_outer = 0.0;
  double r_inner = 0.0;
};

/// A nonnegative quasiconvex energy density H(x, p) on position x and
/// horizontal momentum p in R^m, vanishing at p = 0.
///
/// Besides evaluation, a Hamiltonian provides the support function of the
/// closed sublevel set {p : H(x,p) <= lambda},
///
///   L_lambda(x, q) = sup { p . q : H(x,p) <= lambda },
///
/// which is the length density of the intrinsic pseudo-distance d_lambda.
/// Instances are immutable and may be shared between threads.
class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;

  virtual std::string name() const = 0;
  /// Horizontal dimension m.
  virtual int dim() const = 0;
  /// Declared lower semicontinuity in p. Not verified.
  virtual bool lower_semicontinuous() const { return true; }
  /// True when support(x, lambda, q) == lambda * support(x, 1, q).
  virtual bool level_homogeneous() const { return false; }
  virtual bool x_dependent() const { return false; }

  /// H(x, p). Throws ContractError if p does not have dimension m.
  double eval(const Vec& x, const Vec& p) const;
  /// Support function of the closed lambda-sublevel set in direction q.
  double support(const Vec& x, double lambda, const Vec& q) const;
  SublevelRadii radii(double lambda) const;

 protected:
  virtual double do_eval(const Vec& x, const Vec& p) const = 0;
  virtual double do_support(const Vec& x, double lambda, const Vec& q) const = 0;
  virtual SublevelRadii do_radii(double lambda) const = 0;
};

using HamiltonianPtr = std::shared_ptr<const Hamiltonian>;

/// H(p) = scale * |p|_exponent. exponent may be +infinity.
class PNormHamiltonian final : public Hamiltonian {
 public:
  explicit PNormHamiltonian(int m, double exponent = 2.0, double scale = 1.0);

  std::string name() const override;
  int dim() const override { return m_; }
  bool level_homogeneous() const override { return true; }

 protected:
  double do_eval(const Vec& x, const Vec& p) const override;
  double do_support(const Vec& x, double lambda, const Vec& q) const override;
  SublevelRadii do_radii(double lambda) const override;

 private:
  int m_;
  double exponent_;
  double dual_exponent_;
  double scale_;
};

/// H(x, p) = sqrt(p^T A(x) p) with A(x) symmetric positive definite.
class AnisotropicQuadratic final : public Hamiltonian {
 public:
  using MatrixField = std::function<Mat(const Vec&)>;

  explicit AnisotropicQuadratic(const Mat& a);
  /// `min_eig`/`max_eig` bound the spectrum of A(x) over the domain; they
  /// determine the level-band radii.
  AnisotropicQuadratic(int m, MatrixField a, double min_eig, double max_eig);

  std::string name() const override { return "anisotropic-quadratic"; }
  int dim() const override { return m_; }
  bool level_homogeneous() const override { return true; }
  bool x_dependent() const override { return static_cast<bool>(field_); }

 protected:
  double do_eval(const Vec& x, const Vec& p) const override;
  double do_support(const Vec& x, double lambda, const Vec& q) const override;
  SublevelRadii do_radii(double lambda) const override;

 private:
  Mat matrix_at(const Vec& x) const;

  int m_;
  Mat constant_;
  Mat constant_inverse_;
  MatrixField field_;
  double min_eig_;
  double max_eig_;
};

/// H(p) = floor(|p|). Quasiconvex and coercive but not lower semicontinuous.
class FloorNormHamiltonian final : public Hamiltonian {
 public:
  explicit FloorNormHamiltonian(int m = 2) : m_(m) {}

  std::string name() const override { return "floor-norm"; }
  int dim() const override { return m_; }
  bool lower_semicontinuous() const override { return false; }

 protected:
  double do_eval(const Vec& x, const Vec& p) const override;
  double do_support(const Vec& x, double lambda, const Vec& q) const override;
  SublevelRadii do_radii(double lambda) const override;

 private:
  int m_;
};

/// H(p) = max{|p|, 2} for p_1 < 0 and |p| for p_1 >= 0, on R^2. Below
/// level 2 the sublevel sets are closed half disks, so leftward motion
/// is free and the inner radius vanishes.
class HalfDiskHamiltonian final : public Hamiltonian {
 public:
  std::string name() const override { return "half-disk"; }
  int dim() const override { return 2; }

 protected:
  double do_eval(const Vec& x, const Vec& p) const override;
  double do_support(const Vec& x, double lambda, const Vec& q) const override;
  SublevelRadii do_radii(double lambda) const override;
};

/// Uniform partition of a bounding box into spatial cells. A default
/// constructed grid has a single cell covering everything.
struct CellGrid {
  Vec lo;
  Vec hi;
  std::vector<int> counts;

  int size() const;
  int cell_of(const Vec& x) const;
  Vec center(int cell) const;
};

struct MomentumSample {
  Vec p;
  double value = 0.0;
};

/// Hamiltonian given by sampled values on a momentum grid per spatial cell.
/// The support function maximizes p.q over the samples inside the sublevel
/// set (plus the origin); evaluation returns the value of the nearest sample.
class TabulatedHamiltonian final : public Hamiltonian {
 public:
  TabulatedHamiltonian(int m, CellGrid cells, std::vector<std::vector<MomentumSample>> samples);
  /// Moves the samples; the per-level cache starts empty.
  TabulatedHamiltonian(TabulatedHamiltonian&& other) noexcept
      : m_(other.m_),
        cells_(std::move(other.cells_)),
        samples_(std::move(other.samples_)),
        cloud_radius_(std::move(other.cloud_radius_)) {}

  /// Polar sampling of `source` on the disk of radius `radius_bound`
  /// (m = 2 only): `n_angular` angles over [0, 2pi] and `n_radial` rings.
  /// For multi-cell grids each cell is sampled at its center.
  static TabulatedHamiltonian sample_polar(const Hamiltonian& source, double radius_bound,
                                           int n_angular = 721, int n_radial = 200,
                                           CellGrid cells = {});

  /// Reads rows `cell,p1,...,pm,H` (header line optional).
  static TabulatedHamiltonian from_csv(const std::string& path, int m, CellGrid cells = {});

  std::string name() const override { return "tabulated"; }
  int dim() const override { return m_; }
  bool x_dependent() const override { return cells_.size() > 1; }

 protected:
  double do_eval(const Vec& x, const Vec& p) const override;
  double do_support(const Vec& x, double lambda, const Vec& q) const override;
  SublevelRadii do_radii(double lambda) const override;

 private:
  // Per-cell candidate maximizers of p.q for a fixed level: the convex hull
  // of the sublevel samples when m = 2, all of them otherwise.
  using Extremals = std::vector<std::vector<Vec>>;
  const Extremals& extremals(double lambda) const;

  int m_;
  CellGrid cells_;
  std::vector<std::vector<MomentumSample>> samples_;
  std::vector<double> cloud_radius_;

  mutable std::mutex cache_mutex_;
  mutable std::map<double, std::unique_ptr<Extremals>> cache_;
};

/// Infimum level at which the inner radius becomes positive, located by
/// doubling from 1 (capped at `cap`) followed by bisection to within `tol`.
double lambda_h(const Hamiltonian& h, double tol, double cap = 65536.0);

struct AssumptionSampleSpec {
  Vec x_lo;
  Vec x_hi;
  int x_samples = 8;
  double p_range = 3.0;
  int p_pairs = 64;
  int t_samples = 5;
  double lambda_max = 4.0;
  int lambda_samples = 9;
  std::uint64_t seed = 1;
};

struct AssumptionViolation {
  std::string kind;  // "H0", "H1", "H2", "support-monotone", "support-negative"
  std::string detail;
};

struct AssumptionReport {
  std::string hamiltonian;
  bool lsc_declared = true;
  std::size_t checks = 0;
  std::vector<AssumptionViolation> violations;

  bool ok() const { return violations.empty(); }
  std::size_t count(const std::string& kind) const;
};

/// Samples quasiconvexity, H(x,0) = 0 <= H, and monotonicity of the support
/// function in the level. Lower semicontinuity is reported from the
/// declaration only.
AssumptionReport check_assumptions(const Hamiltonian& h, const AssumptionSampleSpec& spec);

}  // namespace linf
