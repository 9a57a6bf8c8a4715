#pragma once

#include "linf/types.hpp"

#include <memory>
#include <string>

namespace linf {

/// Arithmetic expression over point coordinates, used for boundary data and
/// coordinate-dependent matrix entries in run configurations.
///
/// Variables: x1..x4 (aliases x, y, z, w), r (Euclidean norm of the point).
/// Constants: pi, e. Operators: + - * / ^ and unary minus.
/// Functions: abs sqrt exp log sin cos tan atan floor ceil sign,
/// and the binary min max atan2 pow.
class Expression {
 public:
  struct Node;

  /// Throws ConfigError on syntax errors or variables beyond `dim`.
  static Expression parse(const std::string& text, int dim);

  double operator()(const Vec& x) const;
  const std::string& text() const { return text_; }

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

}  // namespace linf
