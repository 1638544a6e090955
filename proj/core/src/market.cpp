#include "datamarket/market.hpp"

#include <cmath>
#include <sstream>

namespace datamarket {

void MarketParams::validate() const {
  if (K < 1 || K > kMaxPlatforms) {
    std::ostringstream os;
    os << "K must be in [1, " << kMaxPlatforms << "], got " << K;
    throw InvalidParams(os.str());
  }
  if (!(std::isfinite(alpha) && alpha > 0.0))
    throw InvalidParams("alpha must be a positive finite real");
  if (!(std::isfinite(beta) && beta >= 0.0))
    throw InvalidParams("beta must be a nonnegative finite real");
  if (gamma.size() != static_cast<std::size_t>(K))
    throw InvalidParams("gamma must have exactly K entries");
  if (cost.size() != static_cast<std::size_t>(K))
    throw InvalidParams("cost must have exactly K entries");
  for (int i = 0; i < K; ++i) {
    const double g = gamma[static_cast<std::size_t>(i)];
    if (!(std::isfinite(g) && g >= 0.0 && g <= 1.0)) {
      std::ostringstream os;
      os << "gamma[" << i << "] must lie in [0,1], got " << g;
      throw InvalidParams(os.str());
    }
    const double c = cost[static_cast<std::size_t>(i)];
    if (!(std::isfinite(c) && c >= 0.0)) {
      std::ostringstream os;
      os << "cost[" << i << "] must be nonnegative, got " << c;
      throw InvalidParams(os.str());
    }
  }
}

NoiseProfile NoiseProfile::zeros(int k) {
  return {std::vector<double>(static_cast<std::size_t>(k), 0.0)};
}

NoiseProfile NoiseProfile::uniform(int k, double s) {
  return {std::vector<double>(static_cast<std::size_t>(k), s)};
}

NoiseProfile NoiseProfile::silent(int k) {
  return {std::vector<double>(static_cast<std::size_t>(k), kInfiniteNoise)};
}

void NoiseProfile::validate(int k) const {
  if (sigma.size() != static_cast<std::size_t>(k))
    throw InvalidParams("noise profile must have exactly K entries");
  for (int i = 0; i < k; ++i) {
    const double s = sigma[static_cast<std::size_t>(i)];
    if (std::isnan(s) || s < 0.0) {
      std::ostringstream os;
      os << "sigma[" << i << "] must be >= 0 or infinite, got " << s;
      throw InvalidParams(os.str());
    }
  }
}

double NoiseProfile::sigma_sq(int i) const {
  const double s = sigma[static_cast<std::size_t>(i)];
  return s == kInfiniteNoise ? kInfiniteNoise : s * s;
}

}  // namespace datamarket
