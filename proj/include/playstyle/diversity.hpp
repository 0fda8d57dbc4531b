#pragma once

#include <functional>
#include <vector>

#include "playstyle/core.hpp"
#include "playstyle/encoders.hpp"
#include "playstyle/measures.hpp"

namespace playstyle {

struct DiversityConfig {
  Measure measure = Measure::similarity;
  MeasureConfig config;
  MultiscaleEncoder encoder{{identity_encoder()}};
  /// Similarity cutoff: a trajectory at least this similar to any earlier one
  /// is not novel. Distinct from the intersection sample threshold.
  double threshold = 0.2;
};

struct DiversityResult {
  std::size_t diverse_count = 0;            // d
  std::size_t total = 0;                    // N
  std::vector<bool> diverse;                // per trajectory, in input order
};

/// Sequential novelty count: trajectory i is diverse iff no earlier
/// trajectory reaches the similarity threshold against it. Every trajectory
/// is stored for later comparisons whether or not it was diverse, so the
/// result is order-sensitive. O(N^2) comparisons.
DiversityResult diverse_count(const std::vector<Trajectory>& trajectories,
                              const DiversityConfig& cfg);

/// Same loop over an abstract pairwise similarity, for callers that already
/// have similarity values. sim(i, j) is only evaluated for j < i.
DiversityResult diverse_count_with(
    std::size_t n, const std::function<double(std::size_t, std::size_t)>& sim,
    double threshold);

}  // namespace playstyle
