#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "playstyle/core.hpp"

namespace playstyle {

/// Goal-seeking walk on a square gridworld with continuous 2-D move
/// vectors, the analog of a racing controller with a target line and
/// action noise. target_bias sets both the route (which diagonal the walk
/// hugs) and how much of the move vector points along the preferred axis;
/// noise_level is the probability of replacing the move with a uniform
/// random vector. Movement snaps to the dominant axis of the sampled
/// vector. Observations stack a progress stripe with the previous and
/// current one-hot positions.
struct GridworldStyle {
  int grid_size = 8;
  double target_bias = 0.8;  // in [0,1]
  double noise_level = 0.0;  // in [0,1]
  std::uint64_t seed = 0;
};

/// Analytic mean move vector of the style at one cell.
std::array<double, 2> gridworld_mean_action(const GridworldStyle& style, int row, int col);

/// Mean-action table, row-major G*G x 2: the analytic ground truth the
/// classification ceiling is checked against.
std::vector<std::array<double, 2>> gridworld_mean_table(const GridworldStyle& style);

StyleDataset generate_gridworld(const GridworldStyle& style, int episodes,
                                int episode_length = 64);

struct GridStyles {
  std::vector<double> bias_levels;
  std::vector<double> noise_levels;
  /// Datasets indexed [noise_level][bias_level]; labels "b{i}n{j}".
  std::vector<std::vector<StyleDataset>> grid;
};

/// One dataset per (bias, noise) combination, all derived from one seed.
GridStyles generate_grid_styles(std::span<const double> bias_levels,
                                std::span<const double> noise_levels, int episodes,
                                std::uint64_t seed, int grid_size = 8,
                                int episode_length = 64);

/// Single-state K-armed bandit: every record shares one constant observation.
struct BanditStyle {
  int arms = 2;
  std::vector<double> probs;  // valid simplex over arms
};

StyleDataset generate_bandit(const BanditStyle& style, std::size_t n, std::uint64_t seed);

/// Numerically stable softmax of advantages / temperature.
std::vector<double> softmax_policy(std::span<const double> advantages, double temperature);

/// Deterministic puzzle walk on a small torus board with a fixed per-state
/// advantage table; policies differ only by softmax temperature. In the
/// zero-temperature limit every episode is identical.
struct BoardGameRollouts {
  double temperature = 0.0;
  std::vector<Trajectory> trajectories;
};

std::vector<BoardGameRollouts> generate_board_game(std::span<const double> temperatures,
                                                   int episodes, std::uint64_t seed,
                                                   int board_size = 5,
                                                   int episode_length = 24);

}  // namespace playstyle
