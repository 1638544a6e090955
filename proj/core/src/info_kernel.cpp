#include "datamarket/info_kernel.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <sstream>

namespace datamarket {

double noise_to_ratio(double gamma, double sigma) {
  if (sigma == kInfiniteNoise || gamma == 0.0) return 0.0;
  const double den = 2.0 + sigma * sigma;
  if (!std::isfinite(den)) return 0.0;
  return gamma * gamma / den;
}

double ratio_to_sigma_sq(double gamma, double t) {
  if (t <= 0.0) return kInfiniteNoise;
  return gamma * gamma / t - 2.0;
}

namespace {

void check_inputs(const MarketParams& params, const NoiseProfile& noise,
                  PlatformSet active) {
  if (params.gamma.size() != static_cast<std::size_t>(params.K) ||
      noise.sigma.size() != static_cast<std::size_t>(params.K))
    throw InvalidParams("gamma and sigma must have exactly K entries");
  if (active & ~full_set(params.K))
    throw IndexError("active set references platforms beyond K");
  for (int i = 0; i < params.K; ++i) {
    if (!contains(active, i)) continue;
    const double g = params.gamma[static_cast<std::size_t>(i)];
    const double s = noise.sigma[static_cast<std::size_t>(i)];
    if (!(g >= 0.0 && g <= 1.0)) {
      std::ostringstream os;
      os << "gamma[" << i << "] outside [0,1]: " << g;
      throw InvalidParams(os.str());
    }
    if (std::isnan(s) || s < 0.0) {
      std::ostringstream os;
      os << "sigma[" << i << "] negative: " << s;
      throw InvalidParams(os.str());
    }
  }
}

double pair_from_ratios(double t1, double t2) {
  return (t1 + t2 - 2.0 * t1 * t2) / (1.0 - t1 * t2);
}

}  // namespace

double revealed_info(const MarketParams& params, const NoiseProfile& noise,
                     PlatformSet active) {
  check_inputs(params, noise, active);

  // Platforms whose signal carries nothing drop out of the assembly.
  std::vector<int> members;
  for (int i = 0; i < params.K; ++i) {
    if (!contains(active, i)) continue;
    if (noise_to_ratio(params.gamma[static_cast<std::size_t>(i)],
                       noise.sigma[static_cast<std::size_t>(i)]) > 0.0)
      members.push_back(i);
  }
  const auto n = members.size();
  if (n == 0) return 0.0;

  Eigen::MatrixXd m(n, n);
  Eigen::VectorXd rhs(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double gr = params.gamma[static_cast<std::size_t>(members[r])];
    rhs(static_cast<Eigen::Index>(r)) = gr;
    for (std::size_t c = 0; c < n; ++c) {
      const double gc = params.gamma[static_cast<std::size_t>(members[c])];
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          r == c ? 2.0 + noise.sigma_sq(members[r]) : gr * gc;
    }
  }
  const Eigen::VectorXd x = m.ldlt().solve(rhs);
  return rhs.dot(x);
}

double revealed_info_pair(double gamma1, double gamma2, double sigma1,
                          double sigma2) {
  if (!(gamma1 >= 0.0 && gamma1 <= 1.0 && gamma2 >= 0.0 && gamma2 <= 1.0))
    throw InvalidParams("pair correlations must lie in [0,1]");
  if (std::isnan(sigma1) || sigma1 < 0.0 || std::isnan(sigma2) || sigma2 < 0.0)
    throw InvalidParams("pair noise levels must be >= 0");
  return pair_from_ratios(noise_to_ratio(gamma1, sigma1),
                          noise_to_ratio(gamma2, sigma2));
}

double revealed_info_symmetric(int k, double t) {
  if (k < 1) throw InvalidParams("symmetric form needs K >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidParams("t must lie in [0,1]");
  const double kk = static_cast<double>(k);
  return kk * t / (1.0 + (kk - 1.0) * t);
}

double revealed_info_symmetric(int k, double t, double t_prime) {
  if (k < 1) throw InvalidParams("symmetric form needs K >= 1");
  if (!(t >= 0.0 && t <= 1.0)) throw InvalidParams("t must lie in [0,1]");
  if (!(t_prime >= 0.0 && t_prime <= 1.0))
    throw InvalidParams("t' must lie in [0,1]");
  if (t >= 1.0 || t_prime >= 1.0) return 1.0;
  const double s = t_prime / (1.0 - t_prime) +
                   static_cast<double>(k - 1) * t / (1.0 - t);
  return s / (1.0 + s);
}

double revealed_info_from_ratios(std::span<const double> ratios) {
  double s = 0.0;
  for (const double t : ratios) {
    if (!(t >= 0.0 && t <= 1.0)) throw InvalidParams("ratios must lie in [0,1]");
    if (t >= 1.0) return 1.0;
    s += t / (1.0 - t);
  }
  return s / (1.0 + s);
}

double marginal_info(const MarketParams& params, const NoiseProfile& noise,
                     PlatformSet active, int i) {
  if (i < 0 || i >= params.K)
    throw IndexError("marginal platform index out of range");
  if (contains(active, i))
    throw IndexError("marginal platform already in the active set");
  const double with = revealed_info(params, noise, active | platform_bit(i));
  const double without = revealed_info(params, noise, active);
  return std::max(0.0, with - without);
}

std::vector<double> gammas_from_vectors(
    const std::vector<std::vector<double>>& x, const std::vector<double>& y,
    double tol) {
  const auto dim = y.size();
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  };
  if (std::fabs(dot(y, y) - 1.0) > tol)
    throw InvalidParams("buyer vector y must have unit norm");
  std::vector<double> gammas;
  gammas.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i].size() != dim)
      throw InvalidParams("all characteristic vectors must share y's dimension");
    if (std::fabs(dot(x[i], x[i]) - 1.0) > tol) {
      std::ostringstream os;
      os << "platform vector " << i << " must have unit norm";
      throw InvalidParams(os.str());
    }
    gammas.push_back(dot(x[i], y));
  }
  // Residual orthogonality: (x_i - g_i y) . (x_j - g_j y) = x_i.x_j - g_i g_j.
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double residual = dot(x[i], x[j]) - gammas[i] * gammas[j];
      if (std::fabs(residual) > tol)
        throw SubstitutesViolated(static_cast<int>(i), static_cast<int>(j),
                                  residual);
    }
  }
  return gammas;
}

}  // namespace datamarket
