#include <doctest.h>

#include <cmath>

#include "playstyle/errors.hpp"
#include "playstyle/harness.hpp"
#include "playstyle/rng.hpp"
#include "playstyle/synth.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace playstyle;
using testutil::tagged_dataset;

namespace {

StyleDataset replicated(const std::vector<std::pair<int, int>>& pairs, int copies) {
  StyleDataset ds;
  for (int c = 0; c < copies; ++c) {
    for (const auto& [tag, action] : pairs) {
      ds.records.push_back(testutil::discrete_step(tag, action));
    }
  }
  return ds;
}

}  // namespace

TEST_CASE("argmax prediction ranks undefined candidates last and breaks ties first") {
  using V = std::optional<double>;
  CHECK(argmax_prediction(std::vector<V>{0.2, 0.8, 0.5}) == 1);
  CHECK(argmax_prediction(std::vector<V>{0.5, 0.5, 0.5}) == 0);
  CHECK(argmax_prediction(std::vector<V>{std::nullopt, -3.0, -1.0}) == 2);
  CHECK(argmax_prediction(std::vector<V>{std::nullopt, std::nullopt}) == 0);
  CHECK(argmax_prediction(std::vector<V>{-0.5, std::nullopt, 0.0}) == 2);
}

TEST_CASE("scaling all defined values by a positive constant keeps predictions") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::optional<double>> values;
    const std::size_t n = 2 + rng.uniform_below(6);
    for (std::size_t i = 0; i < n; ++i) {
      if (rng.uniform() < 0.2) values.push_back(std::nullopt);
      else values.push_back(rng.uniform());
    }
    const double scale = 0.01 + 10.0 * rng.uniform();
    std::vector<std::optional<double>> scaled;
    for (const auto& v : values) {
      scaled.push_back(v ? std::optional<double>(*v * scale) : std::nullopt);
    }
    CHECK(argmax_prediction(values) == argmax_prediction(scaled));
  }
}

TEST_CASE("classify_round predicts the identical candidate") {
  ClassificationTask task;
  task.encoder = MultiscaleEncoder({passthrough_encoder()});
  // three styles with disjoint passthrough states
  task.styles.push_back({"a", replicated({{0, 0}, {1, 1}}, 8)});
  task.styles.push_back({"b", replicated({{10, 0}, {11, 1}}, 8)});
  task.styles.push_back({"c", replicated({{20, 0}, {21, 1}}, 8)});
  task.queries.push_back({"b", replicated({{10, 0}, {11, 1}}, 8)});
  task.sample_size = 8;
  const auto outcomes = classify_round(task, 1);
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].first == "b");
  CHECK(outcomes[0].second == "b");
}

TEST_CASE("ties between identical candidates go to the first declared style") {
  const StyleDataset shared = replicated({{0, 0}, {1, 1}}, 8);
  ClassificationTask task;
  task.encoder = MultiscaleEncoder({passthrough_encoder()});
  task.styles.push_back({"first", shared});
  task.styles.push_back({"second", shared});
  task.styles.push_back({"third", shared});
  task.queries.push_back({"second", shared});
  task.sample_size = shared.records.size();
  task.replacement = false;
  const auto outcomes = classify_round(task, 3);
  REQUIRE(outcomes.size() == 1);
  CHECK(outcomes[0].second == "first");  // tie rule, not correctness
}

TEST_CASE("two separable styles classify perfectly at full size") {
  ClassificationTask task;
  task.encoder = MultiscaleEncoder({passthrough_encoder()});
  task.styles.push_back({"a", replicated({{0, 0}, {1, 1}}, 16)});
  task.styles.push_back({"b", replicated({{10, 1}, {11, 0}}, 16)});
  task.sample_size = 16;
  task.rounds = 3;
  task.seed = 5;
  const auto accuracies = classification_accuracies(task);
  const auto stats = accuracy_stats(accuracies, task.sample_size);
  CHECK(stats.mean == 1.0);
  CHECK(stats.stddev == 0.0);
}

TEST_CASE("accuracy_sweep is deterministic and worker-count independent") {
  GridStyles styles = generate_grid_styles(std::vector<double>{1.0, 0.0},
                                           std::vector<double>{0.0, 0.4}, 24, 77, 6, 16);
  ClassificationTask task;
  task.encoder = parse_encoder_spec("identity,passthrough");
  for (auto& row : styles.grid) {
    for (auto& ds : row) task.styles.push_back({*ds.label, ds});
  }
  task.rounds = 4;
  task.seed = 9;
  const std::vector<std::size_t> sizes = {32, 64};
  const auto serial = accuracy_sweep(task, sizes, 1);
  const auto parallel = accuracy_sweep(task, sizes, 3);
  const auto again = accuracy_sweep(task, sizes, 1);
  REQUIRE(serial.size() == 2);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].mean == parallel[i].mean);
    CHECK(serial[i].stddev == parallel[i].stddev);
    CHECK(serial[i].min == parallel[i].min);
    CHECK(serial[i].max == parallel[i].max);
    CHECK(serial[i].mean == again[i].mean);
  }
}

TEST_CASE("single round at full size with a separable pair gives accuracy 1, std 0") {
  ClassificationTask task;
  task.encoder = MultiscaleEncoder({passthrough_encoder()});
  task.styles.push_back({"a", replicated({{0, 0}}, 32)});
  task.styles.push_back({"b", replicated({{9, 0}}, 32)});
  task.rounds = 1;
  const std::vector<std::size_t> sizes = {32};
  const auto rows = accuracy_sweep(task, sizes);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].mean == 1.0);
  CHECK(rows[0].stddev == 0.0);
  CHECK(rows[0].min == 1.0);
  CHECK(rows[0].max == 1.0);
}

TEST_CASE("clone styles stay at chance level") {
  // Six i.i.d. copies of one generating policy: long-run accuracy must sit
  // inside the binomial band around 1/6.
  ClassificationTask task;
  task.encoder = parse_encoder_spec("identity,down:1x4x4:4,passthrough");
  for (int k = 0; k < 6; ++k) {
    GridworldStyle style;
    style.grid_size = 10;
    style.target_bias = 0.5;
    style.noise_level = 0.38;
    style.seed = mix_seed(1234, k + 1);
    task.styles.push_back({"clone" + std::to_string(k), generate_gridworld(style, 128, 20)});
  }
  task.rounds = 50;
  task.sample_size = 64;
  task.seed = 4321;
  const auto stats = accuracy_stats(classification_accuracies(task, 2), 64);
  const double p = 1.0 / 6.0;
  const double sigma = std::sqrt(p * (1.0 - p) / (50.0 * 6.0));
  CHECK(stats.mean > p - 3.0 * sigma);
  CHECK(stats.mean < p + 3.0 * sigma);
}

TEST_CASE("count_consistent_lines on hand-seeded grids") {
  // strictly decreasing away from the top-left target in every line
  std::vector<std::vector<double>> mono = {
      {9.0, 8.0, 7.0}, {6.0, 5.0, 4.0}, {3.0, 2.0, 1.0}};
  CHECK(count_consistent_lines(mono, 0, 0) == 6);

  auto broken = mono;
  broken[1] = {4.0, 5.0, 4.5};  // one row made non-monotone
  CHECK(count_consistent_lines(broken, 0, 0) == 5);

  // equal adjacent values break consistency
  auto flat = mono;
  flat[0][1] = 9.0;
  CHECK(count_consistent_lines(flat, 0, 0) == 5);

  // center target: decreasing away from the middle on both sides
  std::vector<std::vector<double>> center = {
      {1.0, 2.0, 1.5}, {2.5, 9.0, 2.0}, {1.2, 3.0, 1.1}};
  std::vector<bool> rows, cols;
  CHECK(count_consistent_lines(center, 1, 1, &rows, &cols) == 6);
  CHECK(rows == std::vector<bool>{true, true, true});
  CHECK(cols == std::vector<bool>{true, true, true});

  CHECK_THROWS_AS(count_consistent_lines({{1.0}, {1.0, 2.0}}, 0, 0), ShapeError);
  CHECK_THROWS_AS(count_consistent_lines(mono, 5, 0), ShapeError);
}

TEST_CASE("undefined cells make their lines inconsistent") {
  std::vector<std::vector<double>> values = {
      {9.0, 8.0, 7.0}, {6.0, std::nan(""), 4.0}, {3.0, 2.0, 1.0}};
  // row 1 and column 1 both contain the NaN
  CHECK(count_consistent_lines(values, 0, 0) == 4);
}

TEST_CASE("spectrum_consistency runs deterministically on a small grid") {
  GridStyles styles = generate_grid_styles(std::vector<double>{1.0, 0.5, 0.0},
                                           std::vector<double>{0.0, 0.38}, 48, 21, 8, 16);
  SpectrumTask task;
  task.grid = styles.grid;
  task.target_row = 0;
  task.target_col = 0;
  task.measure = Measure::similarity;
  task.encoder = parse_encoder_spec("identity,passthrough");
  task.rounds = 6;
  task.sample_size = 96;
  task.seed = 5;
  const auto first = spectrum_consistency(task, 1);
  const auto second = spectrum_consistency(task, 3);
  CHECK(first.consistency_count == second.consistency_count);
  REQUIRE(first.mean_values.size() == 2);
  REQUIRE(first.mean_values[0].size() == 3);
  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(first.mean_values[r][c] == doctest::Approx(second.mean_values[r][c]));
    }
  }
  CHECK(first.consistency_count ==
        count_consistent_lines(first.mean_values, 0, 0));
}

TEST_CASE("mcnemar exact test matches its closed cases") {
  CHECK(mcnemar_exact({12, 0, 0, 3}) == 1.0);
  CHECK(mcnemar_exact({0, 1, 9, 0}) == doctest::Approx(22.0 / 1024.0).epsilon(1e-12));
  CHECK(mcnemar_exact({0, 5, 5, 0}) == 1.0);  // two-sided doubling capped
}

TEST_CASE("mcnemar exact test equals full enumeration for n <= 30") {
  for (std::uint64_t a = 0; a <= 30; ++a) {
    for (std::uint64_t b = 0; a + b <= 30; ++b) {
      const double via_library = mcnemar_exact({0, a, b, 0});
      const double via_enum = oracles::mcnemar_by_enumeration(a, b);
      CHECK(via_library == doctest::Approx(via_enum).epsilon(1e-12));
    }
  }
}

TEST_CASE("mcnemar handles large discordant counts") {
  const double p = mcnemar_exact({0, 400, 600, 0});
  CHECK(p > 0.0);
  CHECK(p < 1e-9);
  const double p2 = mcnemar_exact({0, 500, 500, 0});
  CHECK(p2 == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("chi-square variant agrees with the exact test in direction") {
  CHECK(mcnemar_chi2({0, 0, 0, 0}) == 1.0);
  CHECK(mcnemar_chi2({0, 1, 1, 0}) == 1.0);  // continuity correction zeroes it
  const double skew = mcnemar_chi2({0, 2, 28, 0});
  CHECK(skew < 0.05);
  // asymptotics track the exact test at moderate n
  const double exact = mcnemar_exact({0, 10, 30, 0});
  const double chi2 = mcnemar_chi2({0, 10, 30, 0});
  CHECK(std::abs(exact - chi2) < 0.01);
}

TEST_CASE("paired_outcomes builds the contingency cells") {
  const std::vector<bool> a = {true, true, false, false, true};
  const std::vector<bool> b = {true, false, true, false, false};
  const auto t = paired_outcomes(a, b);
  CHECK(t.both_correct == 1);
  CHECK(t.a_only == 2);
  CHECK(t.b_only == 1);
  CHECK(t.both_wrong == 1);
  CHECK_THROWS_AS(paired_outcomes(std::vector<bool>{true}, std::vector<bool>{}),
                  ValidationError);
}
