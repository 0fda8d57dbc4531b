#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "playstyle/distributions.hpp"
#include "playstyle/encoders.hpp"

namespace playstyle {

/// Probability-of-similarity kernel: P(0) = 1, strictly decreasing, unit mass
/// over distances with unit mean.
inline double perceptual_kernel(double distance) { return std::exp(-distance); }

enum class PolicyMetric { w2, bhattacharyya_distance, bhattacharyya_coefficient };

enum class StateWeighting {
  frequency,  // weight states by the conditioning dataset's sample counts
  uniform,    // plain per-state average
};

struct MeasureConfig {
  /// Per-state policy metric for the distance measure. The similarity
  /// measures carry their metric in their own names.
  PolicyMetric metric = PolicyMetric::w2;
  /// Minimum per-dataset sample count for a state to enter the distance
  /// measure's comparable set. Set membership for the Jaccard and similarity
  /// measures is never filtered.
  int threshold_t = 1;
  GroundMetric ground = GroundMetric::zero_one;
  StateWeighting distance_weighting = StateWeighting::frequency;
  StateWeighting similarity_weighting = StateWeighting::uniform;
};

enum class Measure {
  distance,                     // pd
  intersection_similarity,      // ps-int
  intersection_similarity_bd,   // ps-int-bd
  intersection_similarity_bc,   // ps-int-bc
  jaccard,                      // jaccard
  similarity,                   // ps-union
  similarity_bc,                // ps-union-bc
};

std::string measure_name(Measure m);
Measure parse_measure(const std::string& name);
/// Similarity measures that rescale per-state distances by the batch mean.
bool measure_uses_scaling(Measure m);

struct EncoderPairStats {
  std::size_t states_a = 0;
  std::size_t states_b = 0;
  std::size_t intersection_states = 0;  // unfiltered
  std::size_t union_states = 0;
  std::size_t comparable_states = 0;  // after the distance measure's threshold
  /// Per intersection state: hex-encoded code -> distance or affinity.
  std::vector<std::pair<std::string, double>> per_state;
};

struct ComparisonReport {
  std::string measure_name;
  double value = 0.0;  // similarity in [0,1], or negated distance (<= 0)
  std::optional<double> dbar;
  std::size_t intersection_states = 0;  // pooled over encoders (namespaced)
  std::size_t union_states = 0;
  std::map<std::string, EncoderPairStats> per_encoder;
};

/// States with at least t samples in both datasets, per encoder, codes
/// sorted. Throws EncoderMismatch when the encoded views disagree on the
/// multiscale encoder.
std::map<std::string, std::vector<std::string>> intersection_states(const EncodedDataset& a,
                                                                    const EncodedDataset& b,
                                                                    int t);

/// Mean of the observed per-state distances of one measurement batch; every
/// candidate compared against a query shares this scale.
double scaling_constant(std::span<const double> distances);

/// Evaluates one measure for a query against every candidate of a batch.
/// A disengaged result marks a pair with no comparable states (defined only
/// for the distance and intersection-similarity families, which are partial
/// functions); such candidates rank strictly below every defined value.
std::vector<std::optional<ComparisonReport>> evaluate_batch(
    const EncodedDataset& query, std::span<const EncodedDataset* const> candidates, Measure m,
    const MeasureConfig& cfg = {}, bool detailed = false);

/// Single-pair convenience; throws NoComparableStates where the batch API
/// returns a disengaged result.
ComparisonReport evaluate_pair(const EncodedDataset& a, const EncodedDataset& b, Measure m,
                               const MeasureConfig& cfg = {}, bool detailed = false);

}  // namespace playstyle
