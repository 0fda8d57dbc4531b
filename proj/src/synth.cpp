#include "playstyle/synth.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "playstyle/errors.hpp"
#include "playstyle/rng.hpp"

namespace playstyle {

namespace {

enum GridAction { kUp = 0, kDown = 1, kLeft = 2, kRight = 3 };

/// Board view with a short movement history: a phase stripe marking the
/// episode-progress bucket (oldest frame), then one-hot boards of the
/// previous and current positions. The newest frame alone identifies the
/// current cell, which is what the frame-dropping downsample encoders keep.
ObservationTensor history_view(int size, std::span<const std::pair<int, int>> history,
                               int phase) {
  constexpr int kFrames = 3;
  ObservationTensor obs;
  obs.shape = {kFrames, 1, size, size};
  obs.values.assign(static_cast<std::size_t>(kFrames) * size * size, 0.0f);
  const std::size_t stripe = static_cast<std::size_t>(std::min(phase, size - 1)) * size;
  for (int x = 0; x < size; ++x) obs.values[stripe + x] = 1.0f;
  const int pad = 2 - static_cast<int>(history.size());
  for (std::size_t h = 0; h < history.size(); ++h) {
    const auto [row, col] = history[h];
    const std::size_t frame = static_cast<std::size_t>(1 + pad) + h;
    obs.values[(frame * size + row) * size + col] = 1.0f;
  }
  obs.value_kind = ValueKind::unit_float;
  return obs;
}

/// Goal-ward preferred/secondary move pair for a cell; the goal sits in the
/// bottom-right corner. Both moves always point right or down, so up/left
/// actions can only come from the noise mixture. The bias also tilts the
/// route: high-bias walks hug the right wall first, low-bias walks dive
/// down first, so each style follows its own line toward the goal.
std::pair<int, int> preferred_moves(int size, int row, int col, double bias) {
  const double dx = size - 1 - col;
  const double dy = size - 1 - row;
  const double tilt = 0.2 + 0.6 * bias;
  if ((dx + 0.5) * tilt >= (dy + 0.5) * (1.0 - tilt)) return {kRight, kDown};
  return {kDown, kRight};
}

int sample_index(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return static_cast<int>(i);
  }
  return static_cast<int>(probs.size()) - 1;
}

void apply_move_clamped(int size, int action, int& row, int& col) {
  switch (action) {
    case kUp: row = std::max(0, row - 1); break;
    case kDown: row = std::min(size - 1, row + 1); break;
    case kLeft: col = std::max(0, col - 1); break;
    case kRight: col = std::min(size - 1, col + 1); break;
    default: break;
  }
}

void apply_move_torus(int size, int action, int& row, int& col) {
  switch (action) {
    case kUp: row = (row + size - 1) % size; break;
    case kDown: row = (row + 1) % size; break;
    case kLeft: col = (col + size - 1) % size; break;
    case kRight: col = (col + 1) % size; break;
    default: break;
  }
}

/// Unit vectors of the four grid moves in (x right, y down) coordinates.
constexpr double kMoveX[4] = {0.0, 0.0, -1.0, 1.0};
constexpr double kMoveY[4] = {-1.0, 1.0, 0.0, 0.0};

/// Jitter of the deliberate move vector; keeps per-state fits non-singular.
constexpr double kMoveJitter = 0.1;

std::array<double, 2> blend_direction(const GridworldStyle& style, int row, int col) {
  const auto [pref, sec] = preferred_moves(style.grid_size, row, col, style.target_bias);
  // The route choice expresses most of the bias; the mass split varies only
  // mildly so that styles differ more in where they go than in how they
  // steer at shared cells.
  const double w = 0.65 + 0.1 * style.target_bias;
  return {w * kMoveX[pref] + (1.0 - w) * kMoveX[sec],
          w * kMoveY[pref] + (1.0 - w) * kMoveY[sec]};
}

int snap_to_move(double x, double y) {
  if (std::abs(x) >= std::abs(y)) return x >= 0.0 ? kRight : kLeft;
  return y >= 0.0 ? kDown : kUp;
}

}  // namespace

std::array<double, 2> gridworld_mean_action(const GridworldStyle& style, int row, int col) {
  const auto dir = blend_direction(style, row, col);
  // The uniform noise component has zero mean, so it only rescales.
  return {(1.0 - style.noise_level) * dir[0], (1.0 - style.noise_level) * dir[1]};
}

std::vector<std::array<double, 2>> gridworld_mean_table(const GridworldStyle& style) {
  std::vector<std::array<double, 2>> table;
  table.reserve(static_cast<std::size_t>(style.grid_size) * style.grid_size);
  for (int row = 0; row < style.grid_size; ++row) {
    for (int col = 0; col < style.grid_size; ++col) {
      table.push_back(gridworld_mean_action(style, row, col));
    }
  }
  return table;
}

StyleDataset generate_gridworld(const GridworldStyle& style, int episodes, int episode_length) {
  if (style.grid_size < 2) throw ValidationError("grid size must be at least 2");
  if (style.target_bias < 0.0 || style.target_bias > 1.0 || style.noise_level < 0.0 ||
      style.noise_level > 1.0) {
    throw ValidationError("bias and noise levels must lie in [0, 1]");
  }
  StyleDataset ds;
  ds.records.reserve(static_cast<std::size_t>(episodes) * episode_length);
  Rng rng(style.seed);
  const int phase_len = std::max(1, episode_length / 4);
  for (int e = 0; e < episodes; ++e) {
    // Every episode starts at the corner opposite the goal, so visitation
    // forms a style-dependent corridor instead of covering the whole board.
    int row = 0;
    int col = 0;
    for (int t = 0; t < episode_length; ++t) {
      const std::pair<int, int> here{row, col};
      double ax, ay;
      if (rng.uniform() < style.noise_level) {
        ax = 2.0 * rng.uniform() - 1.0;
        ay = 2.0 * rng.uniform() - 1.0;
      } else {
        const auto dir = blend_direction(style, row, col);
        ax = dir[0] + kMoveJitter * rng.normal();
        ay = dir[1] + kMoveJitter * rng.normal();
      }
      StepRecord rec;
      rec.observation = history_view(style.grid_size, {&here, 1}, t / phase_len);
      rec.action = ContinuousAction{{ax, ay}};
      rec.trajectory_id = "e" + std::to_string(e);
      rec.step_index = t;
      ds.records.push_back(std::move(rec));
      apply_move_clamped(style.grid_size, snap_to_move(ax, ay), row, col);
    }
  }
  return ds;
}

GridStyles generate_grid_styles(std::span<const double> bias_levels,
                                std::span<const double> noise_levels, int episodes,
                                std::uint64_t seed, int grid_size, int episode_length) {
  if (bias_levels.empty() || noise_levels.empty()) {
    throw ValidationError("level lists must be non-empty");
  }
  GridStyles out;
  out.bias_levels.assign(bias_levels.begin(), bias_levels.end());
  out.noise_levels.assign(noise_levels.begin(), noise_levels.end());
  out.grid.resize(noise_levels.size());
  for (std::size_t j = 0; j < noise_levels.size(); ++j) {
    out.grid[j].reserve(bias_levels.size());
    for (std::size_t i = 0; i < bias_levels.size(); ++i) {
      GridworldStyle style;
      style.grid_size = grid_size;
      style.target_bias = bias_levels[i];
      style.noise_level = noise_levels[j];
      style.seed = mix_seed(seed, j * bias_levels.size() + i + 1);
      StyleDataset ds = generate_gridworld(style, episodes, episode_length);
      ds.label = "b" + std::to_string(i) + "n" + std::to_string(j);
      out.grid[j].push_back(std::move(ds));
    }
  }
  return out;
}

StyleDataset generate_bandit(const BanditStyle& style, std::size_t n, std::uint64_t seed) {
  if (style.arms < 1 || static_cast<int>(style.probs.size()) != style.arms) {
    throw ValidationError("bandit needs one probability per arm");
  }
  double total = 0.0;
  for (double p : style.probs) {
    if (p < 0.0) throw ValidationError("bandit probabilities must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ValidationError("bandit probabilities must sum to 1");

  ObservationTensor constant;
  constant.shape = {1, 1, 1, 1};
  constant.values = {0.0f};
  constant.value_kind = ValueKind::byte;

  StyleDataset ds;
  ds.records.reserve(n);
  Rng rng(seed);
  for (std::size_t i = 0; i < n; ++i) {
    StepRecord rec;
    rec.observation = constant;
    rec.action = DiscreteAction{sample_index(style.probs, rng), style.arms};
    rec.step_index = static_cast<int>(i);
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

std::vector<double> softmax_policy(std::span<const double> advantages, double temperature) {
  if (advantages.empty()) throw ValidationError("softmax needs at least one advantage");
  if (temperature <= 0.0) throw ValidationError("softmax temperature must be positive");
  const double top = *std::max_element(advantages.begin(), advantages.end());
  std::vector<double> probs(advantages.size());
  double total = 0.0;
  for (std::size_t i = 0; i < advantages.size(); ++i) {
    probs[i] = std::exp((advantages[i] - top) / temperature);
    total += probs[i];
  }
  for (double& p : probs) p /= total;
  return probs;
}

std::vector<BoardGameRollouts> generate_board_game(std::span<const double> temperatures,
                                                   int episodes, std::uint64_t seed,
                                                   int board_size, int episode_length) {
  if (board_size < 2) throw ValidationError("board size must be at least 2");
  // One advantage table shared by every temperature; value spread chosen so
  // the preset temperatures range from greedy to near-uniform behavior.
  const std::size_t cells = static_cast<std::size_t>(board_size) * board_size;
  std::vector<std::vector<double>> advantages(cells, std::vector<double>(4));
  Rng table_rng(mix_seed(seed, 0xAD));
  for (auto& row : advantages) {
    for (double& a : row) a = 0.1 * table_rng.uniform();
  }

  std::vector<BoardGameRollouts> out;
  out.reserve(temperatures.size());
  for (std::size_t zi = 0; zi < temperatures.size(); ++zi) {
    BoardGameRollouts rollouts;
    rollouts.temperature = temperatures[zi];
    Rng rng(mix_seed(seed, 0x1000 + zi));
    const int phase_len = std::max(1, episode_length / 4);
    for (int e = 0; e < episodes; ++e) {
      Trajectory traj;
      traj.id = "z" + std::to_string(zi) + "e" + std::to_string(e);
      int row = 0, col = 0;
      std::vector<std::pair<int, int>> history;
      for (int t = 0; t < episode_length; ++t) {
        history.emplace_back(row, col);
        if (history.size() > 2) history.erase(history.begin());
        const std::size_t cell = static_cast<std::size_t>(row) * board_size + col;
        const std::vector<double> probs = softmax_policy(advantages[cell], temperatures[zi]);
        const int action = sample_index(probs, rng);
        StepRecord rec;
        rec.observation = history_view(board_size, history, t / phase_len);
        rec.action = DiscreteAction{action, 4};
        rec.trajectory_id = traj.id;
        rec.step_index = t;
        traj.steps.push_back(std::move(rec));
        apply_move_torus(board_size, action, row, col);
      }
      rollouts.trajectories.push_back(std::move(traj));
    }
    out.push_back(std::move(rollouts));
  }
  return out;
}

}  // namespace playstyle
