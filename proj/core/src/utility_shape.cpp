#include "datamarket/utility_shape.hpp"

#include <algorithm>
#include <cmath>

namespace datamarket {

namespace {
constexpr double kMinSlope = 1e-9;       // inf H' must be strictly positive
constexpr double kConcavitySlack = 1e-12;
const double kLog2 = std::log(2.0);
}  // namespace

UtilityShape UtilityShape::identity() { return UtilityShape{}; }

UtilityShape UtilityShape::log1p_normalized() {
  UtilityShape s;
  s.kind_ = ShapeKind::log1p_normalized;
  return s;
}

UtilityShape UtilityShape::table(std::vector<double> values) {
  const auto n = values.size();
  if (n < 2) throw InvalidParams("shape table needs at least two values");
  if (values.front() != 0.0) throw InvalidParams("shape table must start at H(0) = 0");
  const double step = 1.0 / static_cast<double>(n - 1);
  double prev_slope = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!std::isfinite(values[i + 1]) || values[i + 1] < 0.0 || values[i + 1] > 1.0)
      throw InvalidParams("shape table values must lie in [0,1]");
    const double slope = (values[i + 1] - values[i]) / step;
    if (slope < kMinSlope)
      throw InvalidParams("shape table must be increasing with positive slope");
    if (slope > prev_slope + kConcavitySlack)
      throw InvalidParams("shape table must be concave");
    prev_slope = slope;
  }
  UtilityShape s;
  s.kind_ = ShapeKind::table;
  s.table_ = std::move(values);
  return s;
}

double UtilityShape::operator()(double x) const {
  switch (kind_) {
    case ShapeKind::identity:
      return x;
    case ShapeKind::log1p_normalized:
      return std::log1p(x) / kLog2;
    case ShapeKind::table: {
      const double cx = std::clamp(x, 0.0, 1.0);
      const auto n = table_.size();
      const double pos = cx * static_cast<double>(n - 1);
      const auto lo = std::min(static_cast<std::size_t>(pos), n - 2);
      const double frac = pos - static_cast<double>(lo);
      return table_[lo] + frac * (table_[lo + 1] - table_[lo]);
    }
  }
  return x;
}

double UtilityShape::inverse(double y) const {
  if (y <= 0.0) return 0.0;
  switch (kind_) {
    case ShapeKind::identity:
      return y > 1.0 ? std::numeric_limits<double>::infinity() : y;
    case ShapeKind::log1p_normalized:
      return y > 1.0 ? std::numeric_limits<double>::infinity() : std::exp2(y) - 1.0;
    case ShapeKind::table: {
      if (y > table_.back()) return std::numeric_limits<double>::infinity();
      const auto it = std::lower_bound(table_.begin(), table_.end(), y);
      const auto hi = static_cast<std::size_t>(
          std::max<std::ptrdiff_t>(1, it - table_.begin()));
      const double step = 1.0 / static_cast<double>(table_.size() - 1);
      const double seg = table_[hi] - table_[hi - 1];
      const double frac = seg > 0.0 ? (y - table_[hi - 1]) / seg : 0.0;
      return (static_cast<double>(hi - 1) + frac) * step;
    }
  }
  return y;
}

}  // namespace datamarket
