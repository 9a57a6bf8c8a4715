#include "linf/hamiltonian.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace linf {

namespace {

double lp_norm(const Vec& v, double r) {
  if (r == 2.0) return v.norm();
  if (std::isinf(r)) return v.cwiseAbs().maxCoeff();
  if (r == 1.0) return v.cwiseAbs().sum();
  double s = 0.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) s += std::pow(std::fabs(v(i)), r);
  return std::pow(s, 1.0 / r);
}

void require_dim(const Hamiltonian& h, const Vec& v, const char* what) {
  if (v.size() != h.dim()) {
    throw ContractError(h.name() + ": " + what + " has dimension " + std::to_string(v.size()) +
                        ", expected " + std::to_string(h.dim()));
  }
}

void require_level(double lambda) {
  if (!(lambda >= 0.0)) throw ContractError("level must be nonnegative");
}

}  // namespace

double Hamiltonian::eval(const Vec& x, const Vec& p) const {
  require_dim(*this, p, "momentum");
  return do_eval(x, p);
}

double Hamiltonian::support(const Vec& x, double lambda, const Vec& q) const {
  require_dim(*this, q, "covector");
  require_level(lambda);
  return do_support(x, lambda, q);
}

SublevelRadii Hamiltonian::radii(double lambda) const {
  require_level(lambda);
  return do_radii(lambda);
}

// ---------------------------------------------------------------- PNorm

PNormHamiltonian::PNormHamiltonian(int m, double exponent, double scale)
    : m_(m), exponent_(exponent), scale_(scale) {
  if (m < 1 || m > kMaxDim) throw ContractError("pnorm: unsupported dimension");
  if (!(exponent >= 1.0)) throw ContractError("pnorm: exponent must be >= 1");
  if (!(scale > 0.0)) throw ContractError("pnorm: scale must be positive");
  if (std::isinf(exponent)) dual_exponent_ = 1.0;
  else if (exponent == 1.0) dual_exponent_ = std::numeric_limits<double>::infinity();
  else dual_exponent_ = exponent / (exponent - 1.0);
}

std::string PNormHamiltonian::name() const {
  std::ostringstream os;
  os << "pnorm(" << exponent_ << "," << scale_ << ")";
  return os.str();
}

double PNormHamiltonian::do_eval(const Vec&, const Vec& p) const {
  return scale_ * lp_norm(p, exponent_);
}

double PNormHamiltonian::do_support(const Vec&, double lambda, const Vec& q) const {
  return (lambda / scale_) * lp_norm(q, dual_exponent_);
}

SublevelRadii PNormHamiltonian::do_radii(double lambda) const {
  // Euclidean extent of the l^r ball of radius rho in R^m.
  const double rho = lambda / scale_;
  const double inv_r = std::isinf(exponent_) ? 0.0 : 1.0 / exponent_;
  const double factor = std::pow(static_cast<double>(m_), 0.5 - inv_r);
  return {lambda, rho * std::max(1.0, factor), rho * std::min(1.0, factor)};
}

// ------------------------------------------------- AnisotropicQuadratic

AnisotropicQuadratic::AnisotropicQuadratic(const Mat& a)
    : m_(static_cast<int>(a.rows())), constant_(a) {
  if (a.rows() != a.cols() || a.rows() < 1) throw ContractError("anisotropic: matrix not square");
  if (!a.isApprox(a.transpose())) throw ContractError("anisotropic: matrix not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(Eigen::MatrixXd(a), Eigen::EigenvaluesOnly);
  min_eig_ = eig.eigenvalues().minCoeff();
  max_eig_ = eig.eigenvalues().maxCoeff();
  if (!(min_eig_ > 0.0)) throw ContractError("anisotropic: matrix not positive definite");
  constant_inverse_ = a.inverse();
}

AnisotropicQuadratic::AnisotropicQuadratic(int m, MatrixField a, double min_eig, double max_eig)
    : m_(m), field_(std::move(a)), min_eig_(min_eig), max_eig_(max_eig) {
  if (!(min_eig > 0.0) || max_eig < min_eig)
    throw ContractError("anisotropic: invalid eigenvalue bounds");
}

Mat AnisotropicQuadratic::matrix_at(const Vec& x) const {
  Mat a = field_(x);
  if (a.rows() != m_ || a.cols() != m_) throw ContractError("anisotropic: A(x) has wrong shape");
  return a;
}

double AnisotropicQuadratic::do_eval(const Vec& x, const Vec& p) const {
  if (!field_) return std::sqrt(p.dot(constant_ * p));
  return std::sqrt(p.dot(matrix_at(x) * p));
}

double AnisotropicQuadratic::do_support(const Vec& x, double lambda, const Vec& q) const {
  // Support of the ellipsoid p^T A p <= lambda^2 is lambda * sqrt(q^T A^-1 q).
  if (!field_) return lambda * std::sqrt(q.dot(constant_inverse_ * q));
  Eigen::LLT<Mat> llt(matrix_at(x));
  if (llt.info() != Eigen::Success) throw ContractError("anisotropic: A(x) not positive definite");
  return lambda * std::sqrt(q.dot(llt.solve(q)));
}

SublevelRadii AnisotropicQuadratic::do_radii(double lambda) const {
  return {lambda, lambda / std::sqrt(min_eig_), lambda / std::sqrt(max_eig_)};
}

// ------------------------------------------------------------ FloorNorm

double FloorNormHamiltonian::do_eval(const Vec&, const Vec& p) const {
  return std::floor(p.norm());
}

double FloorNormHamiltonian::do_support(const Vec&, double lambda, const Vec& q) const {
  // {floor|p| <= lambda} = {|p| < floor(lambda) + 1}; its closure is a ball.
  return (std::floor(lambda) + 1.0) * q.norm();
}

SublevelRadii FloorNormHamiltonian::do_radii(double lambda) const {
  return {lambda, std::floor(lambda) + 1.0, lambda > 0.0 ? std::ceil(lambda) : 0.0};
}

// ------------------------------------------------------------- HalfDisk

double HalfDiskHamiltonian::do_eval(const Vec&, const Vec& p) const {
  const double norm = p.norm();
  return p(0) < 0.0 ? std::max(norm, 2.0) : norm;
}

double HalfDiskHamiltonian::do_support(const Vec&, double lambda, const Vec& q) const {
  if (lambda >= 2.0 || q(0) >= 0.0) return lambda * q.norm();
  // Closed half disk {p_1 >= 0, |p| <= lambda}: the maximizer sits on the
  // flat edge p_1 = 0.
  return lambda * std::fabs(q(1));
}

SublevelRadii HalfDiskHamiltonian::do_radii(double lambda) const {
  // Any p with p_1 < 0 has H >= 2, however small |p| is.
  return {lambda, lambda, lambda > 2.0 ? lambda : 0.0};
}

// ------------------------------------------------------------ Tabulated

int CellGrid::size() const {
  int n = 1;
  for (int c : counts) n *= c;
  return n;
}

int CellGrid::cell_of(const Vec& x) const {
  if (counts.empty()) return 0;
  int index = 0;
  for (std::size_t k = counts.size(); k-- > 0;) {
    const auto i = static_cast<Eigen::Index>(k);
    double t = (x(i) - lo(i)) / (hi(i) - lo(i));
    int c = static_cast<int>(std::floor(t * counts[k]));
    c = std::clamp(c, 0, counts[k] - 1);
    index = index * counts[k] + c;
  }
  return index;
}

Vec CellGrid::center(int cell) const {
  Vec x(static_cast<Eigen::Index>(counts.size()));
  for (std::size_t k = 0; k < counts.size(); ++k) {
    const auto i = static_cast<Eigen::Index>(k);
    int c = cell % counts[k];
    cell /= counts[k];
    x(i) = lo(i) + (c + 0.5) * (hi(i) - lo(i)) / counts[k];
  }
  return x;
}

TabulatedHamiltonian::TabulatedHamiltonian(int m, CellGrid cells,
                                           std::vector<std::vector<MomentumSample>> samples)
    : m_(m), cells_(std::move(cells)), samples_(std::move(samples)) {
  if (static_cast<int>(samples_.size()) != cells_.size())
    throw ContractError("tabulated: sample table count does not match cell count");
  for (const auto& cell : samples_) {
    if (cell.empty()) throw ContractError("tabulated: empty sample table");
    double radius = 0.0;
    for (const auto& s : cell) {
      if (s.p.size() != m) throw ContractError("tabulated: sample has wrong dimension");
      if (!(s.value >= 0.0)) throw ContractError("tabulated: negative or NaN sample value");
      radius = std::max(radius, s.p.norm());
    }
    cloud_radius_.push_back(radius);
  }
}

TabulatedHamiltonian TabulatedHamiltonian::sample_polar(const Hamiltonian& source,
                                                        double radius_bound, int n_angular,
                                                        int n_radial, CellGrid cells) {
  if (source.dim() != 2) throw ContractError("tabulated: polar sampling needs m = 2");
  if (n_angular < 3 || n_radial < 1 || !(radius_bound > 0.0))
    throw ContractError("tabulated: invalid sampling resolution");
  std::vector<std::vector<MomentumSample>> tables(static_cast<std::size_t>(cells.size()));
  for (int c = 0; c < cells.size(); ++c) {
    const Vec x = cells.counts.empty() ? Vec::Zero(2) : cells.center(c);
    auto& table = tables[static_cast<std::size_t>(c)];
    table.reserve(static_cast<std::size_t>(n_angular * n_radial + 1));
    table.push_back({Vec::Zero(2), source.eval(x, Vec::Zero(2))});
    for (int k = 1; k <= n_radial; ++k) {
      const double r = radius_bound * k / n_radial;
      for (int j = 0; j < n_angular; ++j) {
        const double theta = 2.0 * std::numbers::pi * j / (n_angular - 1);
        Vec p = make_vec({r * std::cos(theta), r * std::sin(theta)});
        table.push_back({p, source.eval(x, p)});
      }
    }
  }
  return TabulatedHamiltonian(2, std::move(cells), std::move(tables));
}

TabulatedHamiltonian TabulatedHamiltonian::from_csv(const std::string& path, int m,
                                                    CellGrid cells) {
  std::ifstream in(path);
  if (!in) throw ConfigError("tabulated: cannot open " + path);
  std::vector<std::vector<MomentumSample>> tables(static_cast<std::size_t>(cells.size()));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double cell = 0.0;
    if (!(row >> cell)) {
      if (line_no == 1) continue;  // header
      throw ConfigError("tabulated: malformed row " + std::to_string(line_no));
    }
    MomentumSample s;
    s.p.resize(m);
    for (int i = 0; i < m; ++i) {
      if (!(row >> s.p(i))) throw ConfigError("tabulated: short row " + std::to_string(line_no));
    }
    if (!(row >> s.value)) throw ConfigError("tabulated: short row " + std::to_string(line_no));
    const int c = static_cast<int>(cell);
    if (c < 0 || c >= cells.size())
      throw ConfigError("tabulated: cell index out of range on row " + std::to_string(line_no));
    tables[static_cast<std::size_t>(c)].push_back(s);
  }
  try {
    return TabulatedHamiltonian(m, std::move(cells), std::move(tables));
  } catch (const ContractError& e) {
    throw ConfigError(e.what());
  }
}

double TabulatedHamiltonian::do_eval(const Vec& x, const Vec& p) const {
  const auto& table = samples_[static_cast<std::size_t>(cells_.cell_of(x))];
  double best = kInf;
  double value = 0.0;
  for (const auto& s : table) {
    const double d = (s.p - p).squaredNorm();
    if (d < best) {
      best = d;
      value = s.value;
    }
  }
  return value;
}

namespace {

double cross(const Vec& o, const Vec& a, const Vec& b) {
  return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

std::vector<Vec> convex_hull_2d(std::vector<Vec> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vec& a, const Vec& b) {
    return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
  });
  if (pts.size() < 3) return pts;
  std::vector<Vec> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

}  // namespace

const TabulatedHamiltonian::Extremals& TabulatedHamiltonian::extremals(double lambda) const {
  std::lock_guard lock(cache_mutex_);
  auto it = cache_.find(lambda);
  if (it != cache_.end()) return *it->second;
  auto result = std::make_unique<Extremals>();
  for (const auto& table : samples_) {
    std::vector<Vec> pts{Vec::Zero(m_)};
    for (const auto& s : table)
      if (s.value <= lambda) pts.push_back(s.p);
    result->push_back(m_ == 2 ? convex_hull_2d(std::move(pts)) : std::move(pts));
  }
  auto& ref = *result;
  cache_.emplace(lambda, std::move(result));
  return ref;
}

double TabulatedHamiltonian::do_support(const Vec& x, double lambda, const Vec& q) const {
  const auto& pts = extremals(lambda)[static_cast<std::size_t>(cells_.cell_of(x))];
  double best = 0.0;
  for (const auto& p : pts) best = std::max(best, p.dot(q));
  return best;
}

SublevelRadii TabulatedHamiltonian::do_radii(double lambda) const {
  SublevelRadii r{lambda, 0.0, kInf};
  for (std::size_t c = 0; c < samples_.size(); ++c) {
    for (const auto& s : samples_[c]) {
      const double norm = s.p.norm();
      if (s.value <= lambda) {
        if (norm >= cloud_radius_[c] * (1.0 - 1e-12) && norm > 0.0) {
          throw UnboundedSampleError("tabulated: sublevel set at level " + std::to_string(lambda) +
                                     " reaches the edge of the sample grid; R_lambda unbounded");
        }
        r.r_outer = std::max(r.r_outer, norm);
      }
      if (s.value >= lambda) r.r_inner = std::min(r.r_inner, norm);
    }
  }
  if (std::isinf(r.r_inner)) {
    throw UnboundedSampleError("tabulated: no sample reaches level " + std::to_string(lambda) +
                               "; R'_lambda unbounded");
  }
  return r;
}

// -------------------------------------------------------------- lambda_h

double lambda_h(const Hamiltonian& h, double tol, double cap) {
  if (!(tol > 0.0)) throw ContractError("lambda_h: tolerance must be positive");
  auto positive = [&](double lambda) { return h.radii(lambda).r_inner > 0.0; };
  double hi = 1.0;
  while (!positive(hi)) {
    hi *= 2.0;
    if (hi > cap) throw ContractError("lambda_h undetectable: R'_lambda = 0 up to cap");
  }
  double lo = 0.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (positive(mid) ? hi : lo) = mid;
  }
  return hi;
}

// ---------------------------------------------------- check_assumptions

std::size_t AssumptionReport::count(const std::string& kind) const {
  return static_cast<std::size_t>(std::count_if(
      violations.begin(), violations.end(), [&](const auto& v) { return v.kind == kind; }));
}

AssumptionReport check_assumptions(const Hamiltonian& h, const AssumptionSampleSpec& spec) {
  AssumptionReport report;
  report.hamiltonian = h.name();
  report.lsc_declared = h.lower_semicontinuous();
  if (!report.lsc_declared)
    report.violations.push_back({"H0", "lower semicontinuity not declared"});

  const int m = h.dim();
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_p = [&] {
    Vec p(m);
    for (int i = 0; i < m; ++i) p(i) = spec.p_range * (2.0 * unit(rng) - 1.0);
    return p;
  };
  auto describe = [](const Vec& v) {
    std::ostringstream os;
    os << "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v(i);
    os << ")";
    return os.str();
  };
  // Rounding in t*p + (1-t)*q can exceed max(|p|,|q|) by an ulp.
  constexpr double rel = 1e-12;

  for (int ix = 0; ix < spec.x_samples; ++ix) {
    Vec x(spec.x_lo.size());
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x(i) = spec.x_lo(i) + (spec.x_hi(i) - spec.x_lo(i)) * unit(rng);

    ++report.checks;
    if (h.eval(x, Vec::Zero(m)) != 0.0)
      report.violations.push_back({"H2", "H(x,0) != 0 at x=" + describe(x)});

    for (int k = 0; k < spec.p_pairs; ++k) {
      const Vec p = random_p();
      const Vec q = random_p();
      const double hp = h.eval(x, p);
      const double hq = h.eval(x, q);
      ++report.checks;
      if (hp < 0.0) report.violations.push_back({"H2", "negative value at p=" + describe(p)});
      for (int j = 0; j <= spec.t_samples; ++j) {
        const double t = spec.t_samples == 0 ? 0.5 : static_cast<double>(j) / spec.t_samples;
        const double hc = h.eval(x, t * p + (1.0 - t) * q);
        ++report.checks;
        if (hc > std::max(hp, hq) * (1.0 + rel) + rel) {
          report.violations.push_back(
              {"H1", "H(tp+(1-t)q) > max at p=" + describe(p) + " q=" + describe(q) +
                         " t=" + std::to_string(t)});
        }
      }

      double previous = -kInf;
      for (int j = 0; j < spec.lambda_samples; ++j) {
        const double lambda =
            spec.lambda_samples == 1 ? spec.lambda_max
                                     : spec.lambda_max * j / (spec.lambda_samples - 1);
        const double s = h.support(x, lambda, q);
        ++report.checks;
        if (s < 0.0) report.violations.push_back({"support-negative", "at q=" + describe(q)});
        if (s < previous * (1.0 - rel)) {
          report.violations.push_back({"support-monotone", "decrease at lambda=" +
                                                               std::to_string(lambda) +
                                                               " q=" + describe(q)});
        }
        previous = s;
      }
    }
  }
  return report;
}

}  // namespace linf
