#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace linf {

// Ambient and horizontal dimensions are small; fixed capacity keeps the
// vectors off the heap in the edge-cost and gradient loops.
inline constexpr int kMaxDim = 4;

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor,
                          kMaxDim, kMaxDim>;

using VertexId = std::int32_t;
inline constexpr VertexId kNoVertex = -1;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent run configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A numerical contract was violated: dimension mismatch, incompatible
/// boundary data, unreachable vertices (CLI exit code 3).
class ContractError : public Error {
 public:
  using Error::Error;
};

class UnboundedSampleError : public ContractError {
 public:
  using ContractError::ContractError;
};

class IncompatibleBoundaryError : public ContractError {
 public:
  using ContractError::ContractError;
};

inline Vec make_vec(std::initializer_list<double> values) {
  Vec v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

}  // namespace linf
