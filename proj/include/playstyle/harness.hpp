#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "playstyle/core.hpp"
#include "playstyle/encoders.hpp"
#include "playstyle/measures.hpp"

namespace playstyle {

/// Static partition of [0, count) over a small thread pool. Results must be
/// written to per-index slots, so output never depends on the worker count.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

/// Worker count from PLAYSTYLE_WORKERS (default 1).
int env_workers();

struct StylePool {
  std::string label;
  StyleDataset data;
};

/// Zero-shot playstyle classification task. When `queries` is empty each
/// style pool doubles as its own query pool and the query subsample is drawn
/// disjointly from the candidate subsample whenever the pool is large enough.
struct ClassificationTask {
  std::vector<StylePool> styles;
  std::vector<StylePool> queries;
  Measure measure = Measure::similarity;
  MeasureConfig config;
  MultiscaleEncoder encoder{{identity_encoder()}};
  int rounds = 100;
  std::size_t sample_size = 512;
  std::uint64_t seed = 0;
  bool disjoint_query = true;
  bool replacement = false;
};

/// Index of the best defined value; candidates without comparable states rank
/// strictly below every defined value, ties go to the first position.
std::size_t argmax_prediction(std::span<const std::optional<double>> values);

/// One round of subsample-and-classify. Returns (true label, predicted label)
/// per query, deterministic in (task, round_seed).
std::vector<std::pair<std::string, std::string>> classify_round(const ClassificationTask& task,
                                                                std::uint64_t round_seed);

/// Per-round accuracies over task.rounds rounds (round i uses seed XOR i).
std::vector<double> classification_accuracies(const ClassificationTask& task, int workers = 1);

struct AccuracyStats {
  std::size_t sample_size = 0;
  double mean = 0.0;
  double stddev = 0.0;  // population
  double min = 0.0;
  double max = 0.0;
};

AccuracyStats accuracy_stats(std::span<const double> accuracies, std::size_t sample_size);

/// Accuracy statistics per dataset size, deterministic for a fixed seed.
std::vector<AccuracyStats> accuracy_sweep(ClassificationTask task,
                                          std::span<const std::size_t> sizes, int workers = 1);

/// Continuous-spectrum consistency over a rectangular style grid.
struct SpectrumTask {
  std::vector<std::vector<StyleDataset>> grid;  // [row][col], rectangular
  std::size_t target_row = 0;
  std::size_t target_col = 0;
  Measure measure = Measure::similarity;
  MeasureConfig config;
  MultiscaleEncoder encoder{{identity_encoder()}};
  int rounds = 100;
  std::size_t sample_size = 512;
  std::uint64_t seed = 0;
};

struct SpectrumResult {
  std::vector<std::vector<double>> mean_values;  // NaN where undefined
  std::vector<bool> row_consistent;
  std::vector<bool> col_consistent;
  int consistency_count = 0;
};

/// A line is consistent iff its values strictly decrease moving away from the
/// target along both directions; equal adjacent values break consistency.
/// Returns consistent rows + consistent columns.
int count_consistent_lines(const std::vector<std::vector<double>>& values,
                           std::size_t target_row, std::size_t target_col,
                           std::vector<bool>* row_flags = nullptr,
                           std::vector<bool>* col_flags = nullptr);

SpectrumResult spectrum_consistency(const SpectrumTask& task, int workers = 1);

/// Paired-outcome cells for comparing two classifiers on the same trials.
struct ContingencyTable {
  std::uint64_t both_correct = 0;
  std::uint64_t a_only = 0;  // discordant: A right, B wrong
  std::uint64_t b_only = 0;  // discordant: B right, A wrong
  std::uint64_t both_wrong = 0;
};

ContingencyTable paired_outcomes(const std::vector<bool>& a_correct,
                                 const std::vector<bool>& b_correct);

/// Exact two-sided binomial McNemar test on the discordant pairs:
/// p = min(1, 2 * sum_{i<=min(a,b)} C(n,i) / 2^n), with p = 1 when n = 0.
double mcnemar_exact(const ContingencyTable& table);

/// Continuity-corrected chi-square variant, for cross-checking.
double mcnemar_chi2(const ContingencyTable& table);

}  // namespace playstyle
