#pragma once

#include <vector>

#include "datamarket/types.hpp"
#include "datamarket/utility_shape.hpp"

namespace datamarket {

/// Full description of a three-layer data market with K platforms, one user
/// and one data buyer.
struct MarketParams {
  int K = 1;
  double alpha = 1.0;          // user's weight on privacy loss, > 0
  double beta = 0.0;           // buyer's valuation of information, >= 0
  std::vector<double> gamma;   // per-platform correlation with the buyer, in [0,1]
  std::vector<double> cost;    // per-platform service cost, >= 0
  UtilityShape h_user;         // shape on the user's privacy-loss term
  UtilityShape h_buyer;        // shape on the buyer's information gain

  /// Throws InvalidParams naming the offending field.
  void validate() const;

  /// Low-cost platform: service gain alone covers the cost (c <= 1/2; the
  /// boundary case counts as low-cost, since entry utility is nonnegative).
  bool low_cost(int i) const { return cost[static_cast<std::size_t>(i)] <= 0.5; }
};

/// Per-platform noise standard deviations; kInfiniteNoise means the platform
/// passes nothing to the buyer.
struct NoiseProfile {
  std::vector<double> sigma;

  static NoiseProfile zeros(int k);
  static NoiseProfile uniform(int k, double s);
  static NoiseProfile silent(int k);  // everything at +infinity

  void validate(int k) const;

  double sigma_sq(int i) const;
  bool operator==(const NoiseProfile&) const = default;
};

}  // namespace datamarket
