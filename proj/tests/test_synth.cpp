#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "playstyle/diversity.hpp"
#include "playstyle/errors.hpp"
#include "playstyle/rng.hpp"
#include "playstyle/synth.hpp"

using namespace playstyle;

namespace {

std::string dataset_fingerprint(const StyleDataset& ds) {
  std::string out;
  for (const auto& rec : ds.records) {
    out += rec.observation.canonical_bytes();
    for (double v : std::get<ContinuousAction>(rec.action).values) {
      out += std::to_string(v);
    }
  }
  return out;
}

/// Recovers the agent cell from the newest observation frame.
int cell_of(const ObservationTensor& obs) {
  const int size = obs.shape[2];
  const std::size_t frame = 2u * size * size;  // newest of the three frames
  for (int i = 0; i < size * size; ++i) {
    if (obs.values[frame + i] == 1.0f) return i;
  }
  return -1;
}

/// Full-data nearest-centroid classification against the analytic mean-action
/// tables: the separability ceiling the measures are tested against.
int ceiling_correct(const std::vector<std::vector<StyleDataset>>& grid,
                    const std::vector<GridworldStyle>& styles, int grid_size) {
  std::vector<std::vector<std::array<double, 2>>> tables;
  for (const auto& style : styles) tables.push_back(gridworld_mean_table(style));

  int correct = 0;
  int index = 0;
  for (const auto& row : grid) {
    for (const auto& ds : row) {
      // empirical per-cell mean action over the full pool
      std::map<int, std::array<double, 3>> sums;  // cell -> (sx, sy, n)
      for (const auto& rec : ds.records) {
        const int cell = cell_of(rec.observation);
        const auto& a = std::get<ContinuousAction>(rec.action).values;
        auto& acc = sums[cell];
        acc[0] += a[0];
        acc[1] += a[1];
        acc[2] += 1.0;
      }
      double best_score = 0.0;
      int best = -1;
      for (std::size_t cand = 0; cand < tables.size(); ++cand) {
        double score = 0.0, weight = 0.0;
        for (const auto& [cell, acc] : sums) {
          const double mx = acc[0] / acc[2], my = acc[1] / acc[2];
          const double dx = mx - tables[cand][cell][0];
          const double dy = my - tables[cand][cell][1];
          score += acc[2] * (dx * dx + dy * dy);
          weight += acc[2];
        }
        score /= weight;
        if (best < 0 || score < best_score) {
          best_score = score;
          best = static_cast<int>(cand);
        }
      }
      if (best == index) ++correct;
      ++index;
    }
  }
  return correct;
}

}  // namespace

TEST_CASE("gridworld generation is deterministic under its seed") {
  GridworldStyle style;
  style.grid_size = 8;
  style.target_bias = 0.7;
  style.noise_level = 0.3;
  style.seed = 42;
  const auto a = generate_gridworld(style, 8, 16);
  const auto b = generate_gridworld(style, 8, 16);
  CHECK(dataset_fingerprint(a) == dataset_fingerprint(b));
  style.seed = 43;
  CHECK(dataset_fingerprint(generate_gridworld(style, 8, 16)) != dataset_fingerprint(a));
}

TEST_CASE("a 5x5 level grid yields 25 labeled datasets") {
  const std::vector<double> biases = {1.0, 0.75, 0.5, 0.25, 0.0};
  const std::vector<double> noises = {0.0, 0.19, 0.38, 0.57, 0.76};
  const GridStyles styles = generate_grid_styles(biases, noises, 4, 7, 10, 20);
  REQUIRE(styles.grid.size() == 5);
  std::set<std::string> labels;
  for (const auto& row : styles.grid) {
    REQUIRE(row.size() == 5);
    for (const auto& ds : row) {
      REQUIRE(ds.label.has_value());
      labels.insert(*ds.label);
      CHECK(ds.records.size() == 4 * 20);
    }
  }
  CHECK(labels.size() == 25);
}

TEST_CASE("full-noise styles have indistinguishable action marginals") {
  GridworldStyle a, b;
  a.grid_size = b.grid_size = 8;
  a.noise_level = b.noise_level = 1.0;
  a.target_bias = 0.9;
  b.target_bias = 0.1;
  a.seed = 1;
  b.seed = 2;
  const auto da = generate_gridworld(a, 500, 20);
  const auto db = generate_gridworld(b, 500, 20);

  // bin the 2-D actions into a 4x4 histogram over [-1,1]^2
  const auto histogram = [](const StyleDataset& ds) {
    std::vector<double> h(16, 0.0);
    for (const auto& rec : ds.records) {
      const auto& v = std::get<ContinuousAction>(rec.action).values;
      const int bx = std::clamp(static_cast<int>((v[0] + 1.0) * 2.0), 0, 3);
      const int by = std::clamp(static_cast<int>((v[1] + 1.0) * 2.0), 0, 3);
      h[by * 4 + bx] += 1.0;
    }
    for (double& x : h) x /= static_cast<double>(ds.records.size());
    return h;
  };
  const auto ha = histogram(da);
  const auto hb = histogram(db);
  double tv = 0.0;
  for (int i = 0; i < 16; ++i) tv += std::abs(ha[i] - hb[i]);
  CHECK(tv / 2.0 < 0.05);
}

TEST_CASE("a fully biased noise-free style is essentially deterministic") {
  GridworldStyle style;
  style.grid_size = 10;
  style.target_bias = 1.0;
  style.noise_level = 0.0;
  style.seed = 3;
  const auto ds = generate_gridworld(style, 64, 20);

  // group position sequences per episode
  std::map<std::string, std::vector<int>> episodes;
  for (const auto& rec : ds.records) episodes[*rec.trajectory_id].push_back(cell_of(rec.observation));
  REQUIRE(episodes.size() == 64);
  std::map<std::vector<int>, int> sequences;
  for (const auto& [id, cells] : episodes) {
    // each step advances right or down until the walk parks at its line's end
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const int dr = cells[i] / 10 - cells[i - 1] / 10;
      const int dc = cells[i] % 10 - cells[i - 1] % 10;
      CHECK(dr + dc <= 1);
      CHECK(dr >= 0);
      CHECK(dc >= 0);
    }
    ++sequences[cells];
  }
  int modal = 0;
  for (const auto& [seq, count] : sequences) modal = std::max(modal, count);
  CHECK(modal >= 60);  // snap jitter flips the move order only rarely
}

TEST_CASE("mean actions follow the analytic form") {
  GridworldStyle style;
  style.grid_size = 10;
  style.target_bias = 1.0;
  style.noise_level = 0.0;
  const auto at_start = gridworld_mean_action(style, 0, 0);
  CHECK(at_start[0] == doctest::Approx(0.75));
  CHECK(at_start[1] == doctest::Approx(0.25));

  style.noise_level = 0.4;
  const auto scaled = gridworld_mean_action(style, 0, 0);
  CHECK(scaled[0] == doctest::Approx(0.6 * 0.75));
  CHECK(scaled[1] == doctest::Approx(0.6 * 0.25));

  const auto table = gridworld_mean_table(style);
  CHECK(table.size() == 100);
  CHECK(table[0][0] == doctest::Approx(scaled[0]));
}

TEST_CASE("exact mean-action tables separate the full 25-style grid") {
  const std::vector<double> biases = {1.0, 0.75, 0.5, 0.25, 0.0};
  const std::vector<double> noises = {0.0, 0.19, 0.38, 0.57, 0.76};
  const int grid_size = 10;
  const GridStyles styles = generate_grid_styles(biases, noises, 88, 13, grid_size, 20);
  std::vector<GridworldStyle> params;
  for (std::size_t j = 0; j < noises.size(); ++j) {
    for (std::size_t i = 0; i < biases.size(); ++i) {
      GridworldStyle s;
      s.grid_size = grid_size;
      s.target_bias = biases[i];
      s.noise_level = noises[j];
      params.push_back(s);
    }
  }
  CHECK(ceiling_correct(styles.grid, params, grid_size) == 25);
}

TEST_CASE("bandit datasets share one constant observation") {
  const BanditStyle style{2, {0.7, 0.3}};
  const auto ds = generate_bandit(style, 2000, 11);
  REQUIRE(ds.records.size() == 2000);
  const std::string first = ds.records[0].observation.canonical_bytes();
  double ones = 0.0;
  for (const auto& rec : ds.records) {
    CHECK(rec.observation.canonical_bytes() == first);
    if (std::get<DiscreteAction>(rec.action).index == 1) ones += 1.0;
  }
  CHECK(ones / 2000.0 == doctest::Approx(0.3).epsilon(0.15));

  const auto again = generate_bandit(style, 2000, 11);
  for (std::size_t i = 0; i < 50; ++i) {
    CHECK(std::get<DiscreteAction>(again.records[i].action).index ==
          std::get<DiscreteAction>(ds.records[i].action).index);
  }
}

TEST_CASE("bandit rejects malformed styles") {
  CHECK_THROWS_AS(generate_bandit({2, {0.7, 0.7}}, 10, 0), ValidationError);
  CHECK_THROWS_AS(generate_bandit({3, {0.5, 0.5}}, 10, 0), ValidationError);
}

TEST_CASE("softmax policies are normalized and sharpen as z drops") {
  Rng rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> adv(4);
    for (double& a : adv) a = rng.uniform();
    for (double z : {1e-6, 1e-3, 0.1, 10.0}) {
      const auto probs = softmax_policy(adv, z);
      double total = 0.0;
      for (double p : probs) {
        total += p;
        CHECK(p >= 0.0);
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    const auto greedy = softmax_policy(adv, 1e-9);
    const std::size_t best =
        std::max_element(adv.begin(), adv.end()) - adv.begin();
    CHECK(greedy[best] == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(softmax_policy(std::vector<double>{1.0}, 0.0), ValidationError);
}

TEST_CASE("zero-temperature board game rollouts are identical") {
  const auto rollouts = generate_board_game(std::vector<double>{1e-6}, 10, 21, 5, 24);
  REQUIRE(rollouts.size() == 1);
  const auto& trajectories = rollouts[0].trajectories;
  REQUIRE(trajectories.size() == 10);
  const auto key = [](const Trajectory& t) {
    std::string out;
    for (const auto& rec : t.steps) {
      out += rec.observation.canonical_bytes();
      out += static_cast<char>('0' + std::get<DiscreteAction>(rec.action).index);
    }
    return out;
  };
  const std::string first = key(trajectories[0]);
  for (const auto& t : trajectories) CHECK(key(t) == first);
}

TEST_CASE("board game diversity grows with temperature") {
  const std::vector<double> temps = {0.0001, 0.001, 0.01, 0.1};
  const auto rollouts = generate_board_game(temps, 12, 5, 5, 24);
  DiversityConfig cfg;
  cfg.encoder = parse_encoder_spec("identity,passthrough");
  cfg.threshold = 0.2;
  std::vector<std::size_t> counts;
  for (const auto& r : rollouts) counts.push_back(diverse_count(r.trajectories, cfg).diverse_count);
  for (std::size_t i = 1; i < counts.size(); ++i) CHECK(counts[i] >= counts[i - 1]);
  CHECK(counts.back() > counts.front());
}
