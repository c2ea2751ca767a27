#pragma once

#include <span>
#include <vector>

namespace sep::oracle {

/// W_Lambda(mu, nu) for laws on {0,1}^sites with the Hamming cost; state
/// index bit i is the occupation of site i. Solved exactly as a min-cost
/// transportation problem. At most 8 sites (ResourceLimit otherwise).
double exact_wasserstein(std::span<const double> mu, std::span<const double> nu, int sites);

/// Marginal of a law on {0,1}^sites onto the listed sites (in that order).
std::vector<double> marginalize(std::span<const double> law, int sites, std::span<const int> keep);

}  // namespace sep::oracle
