#include "datamarket/types.hpp"

#include <sstream>

namespace datamarket {

std::vector<int> set_members(PlatformSet s, int k) {
  std::vector<int> out;
  for (int i = 0; i < k; ++i) {
    if (contains(s, i)) out.push_back(i);
  }
  return out;
}

std::string set_to_string(PlatformSet s, int k) {
  std::string out(static_cast<std::size_t>(k), '0');
  for (int i = 0; i < k; ++i) {
    if (contains(s, i)) out[static_cast<std::size_t>(i)] = '1';
  }
  return out;
}

namespace {
std::string pair_message(int i, int j, double residual) {
  std::ostringstream os;
  os << "substitutes condition violated for platforms (" << i << ", " << j
     << "): residual inner product " << residual;
  return os.str();
}

std::string candidate_message(int platform, double sigma_sq) {
  std::ostringstream os;
  os << "candidate profile infeasible: platform " << platform
     << " would need sigma^2 = " << sigma_sq;
  return os.str();
}

std::string assumption_message(PlatformSet entry, double margin) {
  std::ostringstream os;
  os << "minimum-privacy assumption fails: at zero noise the user shares with "
        "entry set mask "
     << entry << " (utility " << margin << ")";
  return os.str();
}
}  // namespace

SubstitutesViolated::SubstitutesViolated(int i_, int j_, double residual_)
    : Error(pair_message(i_, j_, residual_)), i(i_), j(j_), residual(residual_) {}

InfeasibleCandidate::InfeasibleCandidate(int platform_, double sigma_sq_)
    : Error(candidate_message(platform_, sigma_sq_)),
      platform(platform_),
      sigma_sq(sigma_sq_) {}

AssumptionViolated::AssumptionViolated(PlatformSet entry_, double margin_)
    : Error(assumption_message(entry_, margin_)),
      entry(entry_),
      margin(margin_) {}

}  // namespace datamarket
