#include "playstyle/diversity.hpp"

#include <algorithm>

#include "playstyle/errors.hpp"

namespace playstyle {

DiversityResult diverse_count_with(
    std::size_t n, const std::function<double(std::size_t, std::size_t)>& sim,
    double threshold) {
  DiversityResult result;
  result.total = n;
  result.diverse.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    bool is_diverse = true;
    for (std::size_t j = 0; j < i; ++j) {
      if (sim(i, j) >= threshold) {
        is_diverse = false;
        break;
      }
    }
    result.diverse[i] = is_diverse;
    if (is_diverse) ++result.diverse_count;
    // every trajectory joins the stored set regardless of novelty
  }
  return result;
}

DiversityResult diverse_count(const std::vector<Trajectory>& trajectories,
                              const DiversityConfig& cfg) {
  if (trajectories.empty()) throw ValidationError("diversity needs at least one trajectory");
  const double threshold = std::clamp(cfg.threshold, 0.0, 1.0);

  std::vector<EncodedDataset> encoded;
  encoded.reserve(trajectories.size());
  for (const Trajectory& t : trajectories) {
    encoded.push_back(encode_dataset(cfg.encoder, trajectory_dataset(t)));
  }

  const auto sim = [&](std::size_t i, std::size_t j) -> double {
    const EncodedDataset* candidate[] = {&encoded[j]};
    const auto reports = evaluate_batch(encoded[i], candidate, cfg.measure, cfg.config);
    // incomparable trajectories share no state at all: similarity 0
    return reports.front() ? reports.front()->value : 0.0;
  };
  return diverse_count_with(trajectories.size(), sim, threshold);
}

}  // namespace playstyle
