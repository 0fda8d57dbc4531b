#include "playstyle/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <mutex>
#include <thread>

#include "playstyle/errors.hpp"
#include "playstyle/rng.hpp"

namespace playstyle {

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  const std::size_t n_threads = std::min<std::size_t>(workers, count);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (std::size_t t = 0; t < n_threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

int env_workers() {
  const char* env = std::getenv("PLAYSTYLE_WORKERS");
  if (env == nullptr) return 1;
  const int n = std::atoi(env);
  return n > 0 ? n : 1;
}

std::size_t argmax_prediction(std::span<const std::optional<double>> values) {
  std::size_t best = 0;
  bool have_defined = false;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!values[i]) continue;
    if (!have_defined || *values[i] > best_value) {
      have_defined = true;
      best_value = *values[i];
      best = i;
    }
  }
  return best;
}

namespace {

struct RoundDraws {
  std::vector<EncodedDataset> candidates;
  std::vector<std::pair<std::string, EncodedDataset>> queries;  // (true label, data)
};

RoundDraws draw_round(const ClassificationTask& task, std::uint64_t rseed) {
  RoundDraws draws;
  draws.candidates.reserve(task.styles.size());

  const bool self_protocol = task.queries.empty();
  for (std::size_t i = 0; i < task.styles.size(); ++i) {
    const StylePool& pool = task.styles[i];
    const std::uint64_t pool_seed = mix_seed(rseed, i + 1);
    if (self_protocol) {
      const bool can_split = !task.replacement && task.disjoint_query &&
                             2 * task.sample_size <= pool.data.records.size();
      if (can_split) {
        auto [candidate, query] = subsample_disjoint(pool.data, task.sample_size, pool_seed);
        draws.candidates.push_back(encode_dataset(task.encoder, candidate));
        draws.queries.emplace_back(pool.label, encode_dataset(task.encoder, query));
      } else {
        const StyleDataset candidate =
            subsample(pool.data, task.sample_size, pool_seed, task.replacement);
        const StyleDataset query = subsample(pool.data, task.sample_size,
                                             mix_seed(pool_seed, 0x71), task.replacement);
        draws.candidates.push_back(encode_dataset(task.encoder, candidate));
        draws.queries.emplace_back(pool.label, encode_dataset(task.encoder, query));
      }
    } else {
      const StyleDataset candidate =
          subsample(pool.data, task.sample_size, pool_seed, task.replacement);
      draws.candidates.push_back(encode_dataset(task.encoder, candidate));
    }
  }
  if (!self_protocol) {
    for (std::size_t j = 0; j < task.queries.size(); ++j) {
      const StylePool& pool = task.queries[j];
      const std::uint64_t pool_seed = mix_seed(rseed, task.styles.size() + j + 1);
      const StyleDataset query =
          subsample(pool.data, task.sample_size, pool_seed, task.replacement);
      draws.queries.emplace_back(pool.label, encode_dataset(task.encoder, query));
    }
  }
  return draws;
}

}  // namespace

std::vector<std::pair<std::string, std::string>> classify_round(const ClassificationTask& task,
                                                                std::uint64_t rseed) {
  if (task.styles.size() < 2) throw ValidationError("classification needs at least 2 styles");
  const RoundDraws draws = draw_round(task, rseed);

  std::vector<const EncodedDataset*> candidates;
  candidates.reserve(draws.candidates.size());
  for (const EncodedDataset& c : draws.candidates) candidates.push_back(&c);

  std::vector<std::pair<std::string, std::string>> outcomes;
  outcomes.reserve(draws.queries.size());
  for (const auto& [true_label, query] : draws.queries) {
    const auto reports = evaluate_batch(query, candidates, task.measure, task.config);
    std::vector<std::optional<double>> values;
    values.reserve(reports.size());
    for (const auto& r : reports) {
      values.push_back(r ? std::optional<double>(r->value) : std::nullopt);
    }
    const std::size_t best = argmax_prediction(values);
    outcomes.emplace_back(true_label, task.styles[best].label);
  }
  return outcomes;
}

std::vector<double> classification_accuracies(const ClassificationTask& task, int workers) {
  std::vector<double> accuracies(static_cast<std::size_t>(task.rounds), 0.0);
  parallel_for(accuracies.size(), workers, [&](std::size_t round) {
    const auto outcomes = classify_round(task, round_seed(task.seed, round));
    std::size_t correct = 0;
    for (const auto& [truth, predicted] : outcomes) {
      if (truth == predicted) ++correct;
    }
    accuracies[round] = outcomes.empty()
                            ? 0.0
                            : static_cast<double>(correct) / static_cast<double>(outcomes.size());
  });
  return accuracies;
}

AccuracyStats accuracy_stats(std::span<const double> accuracies, std::size_t sample_size) {
  AccuracyStats stats;
  stats.sample_size = sample_size;
  if (accuracies.empty()) return stats;
  double sum = 0.0;
  stats.min = accuracies[0];
  stats.max = accuracies[0];
  for (double a : accuracies) {
    sum += a;
    stats.min = std::min(stats.min, a);
    stats.max = std::max(stats.max, a);
  }
  stats.mean = sum / static_cast<double>(accuracies.size());
  double sq = 0.0;
  for (double a : accuracies) sq += (a - stats.mean) * (a - stats.mean);
  stats.stddev = std::sqrt(sq / static_cast<double>(accuracies.size()));
  return stats;
}

std::vector<AccuracyStats> accuracy_sweep(ClassificationTask task,
                                          std::span<const std::size_t> sizes, int workers) {
  std::vector<AccuracyStats> out;
  out.reserve(sizes.size());
  for (std::size_t size : sizes) {
    task.sample_size = size;
    const auto accuracies = classification_accuracies(task, workers);
    out.push_back(accuracy_stats(accuracies, size));
  }
  return out;
}

int count_consistent_lines(const std::vector<std::vector<double>>& values,
                           std::size_t target_row, std::size_t target_col,
                           std::vector<bool>* row_flags, std::vector<bool>* col_flags) {
  const std::size_t rows = values.size();
  if (rows == 0) throw ShapeError("empty spectrum grid");
  const std::size_t cols = values[0].size();
  for (const auto& row : values) {
    if (row.size() != cols) throw ShapeError("spectrum grid is not rectangular");
  }
  if (target_row >= rows || target_col >= cols) throw ShapeError("target outside grid");

  // Strictly decreasing away from the anchor; NaN never compares, so an
  // undefined cell makes its line inconsistent.
  const auto monotone = [](auto value_at, std::size_t n, std::size_t anchor) {
    for (std::size_t i = anchor; i + 1 < n; ++i) {
      if (!(value_at(i) > value_at(i + 1))) return false;
    }
    for (std::size_t i = anchor; i > 0; --i) {
      if (!(value_at(i) > value_at(i - 1))) return false;
    }
    return true;
  };

  int count = 0;
  std::vector<bool> rflags(rows, false), cflags(cols, false);
  for (std::size_t r = 0; r < rows; ++r) {
    rflags[r] = monotone([&](std::size_t c) { return values[r][c]; }, cols, target_col);
    if (rflags[r]) ++count;
  }
  for (std::size_t c = 0; c < cols; ++c) {
    cflags[c] = monotone([&](std::size_t r) { return values[r][c]; }, rows, target_row);
    if (cflags[c]) ++count;
  }
  if (row_flags) *row_flags = std::move(rflags);
  if (col_flags) *col_flags = std::move(cflags);
  return count;
}

SpectrumResult spectrum_consistency(const SpectrumTask& task, int workers) {
  const std::size_t rows = task.grid.size();
  if (rows == 0) throw ShapeError("empty spectrum grid");
  const std::size_t cols = task.grid[0].size();
  for (const auto& row : task.grid) {
    if (row.size() != cols) throw ShapeError("spectrum grid is not rectangular");
  }
  if (task.target_row >= rows || task.target_col >= cols) {
    throw ShapeError("target outside grid");
  }

  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<std::vector<std::vector<double>>> per_round(
      static_cast<std::size_t>(task.rounds),
      std::vector<std::vector<double>>(rows, std::vector<double>(cols, nan)));

  parallel_for(per_round.size(), workers, [&](std::size_t round) {
    const std::uint64_t rseed = round_seed(task.seed, round);
    std::vector<EncodedDataset> candidates;
    candidates.reserve(rows * cols);
    std::optional<EncodedDataset> query;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const std::uint64_t cell_seed = mix_seed(rseed, r * cols + c + 1);
        if (r == task.target_row && c == task.target_col &&
            2 * task.sample_size <= task.grid[r][c].records.size()) {
          auto [candidate, q] = subsample_disjoint(task.grid[r][c], task.sample_size, cell_seed);
          candidates.push_back(encode_dataset(task.encoder, candidate));
          query = encode_dataset(task.encoder, q);
        } else {
          candidates.push_back(encode_dataset(
              task.encoder, subsample(task.grid[r][c], task.sample_size, cell_seed)));
          if (r == task.target_row && c == task.target_col) {
            query = encode_dataset(
                task.encoder,
                subsample(task.grid[r][c], task.sample_size, mix_seed(cell_seed, 0x71)));
          }
        }
      }
    }
    std::vector<const EncodedDataset*> refs;
    refs.reserve(candidates.size());
    for (const EncodedDataset& c : candidates) refs.push_back(&c);
    const auto reports = evaluate_batch(*query, refs, task.measure, task.config);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t c = 0; c < cols; ++c) {
        const auto& report = reports[r * cols + c];
        if (report) per_round[round][r][c] = report->value;
      }
    }
  });

  SpectrumResult result;
  result.mean_values.assign(rows, std::vector<double>(cols, 0.0));
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double sum = 0.0;
      for (int round = 0; round < task.rounds; ++round) sum += per_round[round][r][c];
      result.mean_values[r][c] = sum / task.rounds;  // NaN if any round was undefined
    }
  }
  result.consistency_count =
      count_consistent_lines(result.mean_values, task.target_row, task.target_col,
                             &result.row_consistent, &result.col_consistent);
  return result;
}

ContingencyTable paired_outcomes(const std::vector<bool>& a_correct,
                                 const std::vector<bool>& b_correct) {
  if (a_correct.size() != b_correct.size()) {
    throw ValidationError("paired outcomes need equal-length trials");
  }
  ContingencyTable t;
  for (std::size_t i = 0; i < a_correct.size(); ++i) {
    if (a_correct[i] && b_correct[i]) ++t.both_correct;
    else if (a_correct[i]) ++t.a_only;
    else if (b_correct[i]) ++t.b_only;
    else ++t.both_wrong;
  }
  return t;
}

double mcnemar_exact(const ContingencyTable& table) {
  const std::uint64_t n = table.a_only + table.b_only;
  if (n == 0) return 1.0;
  const std::uint64_t k = std::min(table.a_only, table.b_only);

  double tail;
  if (n <= 512) {
    // term_i = C(n, i) / 2^n via the multiplicative recurrence
    double term = std::pow(0.5, static_cast<double>(n));
    double sum = term;
    for (std::uint64_t i = 1; i <= k; ++i) {
      term *= static_cast<double>(n - i + 1) / static_cast<double>(i);
      sum += term;
    }
    tail = sum;
  } else {
    const double log_half = std::log(0.5);
    double log_sum = -std::numeric_limits<double>::infinity();
    for (std::uint64_t i = 0; i <= k; ++i) {
      const double lt = std::lgamma(static_cast<double>(n) + 1.0) -
                        std::lgamma(static_cast<double>(i) + 1.0) -
                        std::lgamma(static_cast<double>(n - i) + 1.0) +
                        static_cast<double>(n) * log_half;
      if (lt > log_sum) {
        log_sum = lt + std::log1p(std::exp(log_sum - lt));
      } else {
        log_sum = log_sum + std::log1p(std::exp(lt - log_sum));
      }
    }
    tail = std::exp(log_sum);
  }
  return std::min(1.0, 2.0 * tail);
}

double mcnemar_chi2(const ContingencyTable& table) {
  const std::uint64_t n = table.a_only + table.b_only;
  if (n == 0) return 1.0;
  const double diff = table.a_only > table.b_only
                          ? static_cast<double>(table.a_only - table.b_only)
                          : static_cast<double>(table.b_only - table.a_only);
  const double adjusted = std::max(0.0, diff - 1.0);
  const double chi2 = adjusted * adjusted / static_cast<double>(n);
  return std::erfc(std::sqrt(chi2 / 2.0));
}

}  // namespace playstyle
