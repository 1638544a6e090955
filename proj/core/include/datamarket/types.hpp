#pragma once

#include <bit>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace datamarket {

/// Subset of platform indices packed as a bitmask; platform i maps to bit i.
using PlatformSet = std::uint32_t;

/// Noise level encoding "the buyer receives nothing from this platform".
inline constexpr double kInfiniteNoise = std::numeric_limits<double>::infinity();

/// Hard cap on K so every subset fits in a PlatformSet with headroom.
inline constexpr int kMaxPlatforms = 24;

inline constexpr PlatformSet platform_bit(int i) { return PlatformSet{1} << i; }
inline constexpr PlatformSet full_set(int k) { return (PlatformSet{1} << k) - 1; }
inline constexpr bool contains(PlatformSet s, int i) { return (s >> i) & 1u; }
inline constexpr int set_size(PlatformSet s) { return std::popcount(s); }

std::vector<int> set_members(PlatformSet s, int k);
std::string set_to_string(PlatformSet s, int k);

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParams : Error {
  using Error::Error;
};

struct IndexError : Error {
  using Error::Error;
};

/// Residual-orthogonality violation between a pair of platform vectors.
struct SubstitutesViolated : Error {
  SubstitutesViolated(int i_, int j_, double residual_);
  int i;
  int j;
  double residual;
};

struct SearchLimitExceeded : Error {
  using Error::Error;
};

/// Symmetric equilibrium candidate would need a negative noise variance.
struct InfeasibleCandidate : Error {
  InfeasibleCandidate(int platform_, double sigma_sq_);
  int platform;
  double sigma_sq;
};

/// The minimum-privacy assumption on alpha fails for some entry set.
struct AssumptionViolated : Error {
  AssumptionViolated(PlatformSet entry_, double margin_);
  PlatformSet entry;
  double margin;
};

struct DegenerateMandate : Error {
  using Error::Error;
};

/// Numeric knobs shared across the solver stack.
struct SolverSettings {
  double lin_tol = 1e-9;   // linear-algebra and property tolerance
  double tie_tol = 1e-9;   // user indifference band; ties resolve toward sharing
  double gain_tol = 1e-7;  // deviation-gain tolerance in verification

  int exhaustive_limit = 16;  // cap on K for 2^K subset enumeration
  int sweep_points = 200;     // grid points per deviation sweep
  double sweep_t_floor = 1e-6;

  double refine_step = 1e-3;  // t' step for the threshold refinement scan
  int refine_window = 25;     // scan half-width in steps

  int policy_grid_points = 32;   // log-spaced sigma-bar^2 grid
  double policy_grid_lo = 1e-2;  // grid endpoints, in sigma^2
  double policy_grid_hi = 1e4;
  double mandate_beta_cap = 1e12;

  std::uint64_t seed = 42;  // randomized-suite defaults
  int trials = 10000;

  bool operator==(const SolverSettings&) const = default;
};

}  // namespace datamarket
