#pragma once

#include <vector>

#include "datamarket/types.hpp"

namespace datamarket {

enum class ShapeKind { identity, log1p_normalized, table };

/// Value map H : [0,1] -> [0,1] applied to revealed information.
///
/// Every shape satisfies H(0) = 0, H nondecreasing with strictly positive
/// minimum slope, and concavity. The identity shape recovers the linear
/// utilities; evaluating it returns its argument bit-for-bit.
class UtilityShape {
 public:
  UtilityShape() = default;  // identity

  static UtilityShape identity();
  static UtilityShape log1p_normalized();

  /// Piecewise-linear shape from values on the uniform grid over [0,1].
  /// Throws InvalidParams unless the table is a valid member of the family.
  static UtilityShape table(std::vector<double> values);

  double operator()(double x) const;

  /// Inverse on [0, H(1)]; monotone, so well defined. Values above H(1)
  /// return +infinity (the shape cannot reach them).
  double inverse(double y) const;

  ShapeKind kind() const { return kind_; }
  bool is_identity() const { return kind_ == ShapeKind::identity; }
  const std::vector<double>& table_values() const { return table_; }

  bool operator==(const UtilityShape&) const = default;

 private:
  ShapeKind kind_ = ShapeKind::identity;
  std::vector<double> table_;
};

}  // namespace datamarket
