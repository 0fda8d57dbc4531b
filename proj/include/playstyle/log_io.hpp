#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "playstyle/core.hpp"

namespace playstyle {

/// Line-delimited step records. One JSON object per line with fields
/// `traj`, `t`, `obs_shape`, `obs`, `obs_kind`, `action`, `action_space`.
/// Byte observations are written as base64, unit_float ones as float arrays.
void write_trajectory_log(const std::filesystem::path& path,
                          const std::vector<StepRecord>& records);
std::vector<StepRecord> read_trajectory_log(const std::filesystem::path& path);

/// Dataset manifest: {"label": ..., "files": [...]}. File paths are resolved
/// relative to the manifest location.
void write_dataset_manifest(const std::filesystem::path& path, const std::string& label,
                            const std::vector<std::string>& files);

/// Loads a dataset from a manifest, or directly from a .jsonl log file.
StyleDataset load_dataset(const std::filesystem::path& path);

struct StyleEntry {
  std::string label;
  std::vector<std::string> files;
};

/// Styles manifest: {"styles": [{"label": ..., "files": [...]}, ...]}.
void write_styles_manifest(const std::filesystem::path& path,
                           const std::vector<StyleEntry>& styles);
std::vector<std::pair<std::string, StyleDataset>> load_styles(const std::filesystem::path& path);

/// Grid manifest for spectrum runs: {"cells": [[dataset path, ...], ...]},
/// row-major, rectangular. Each cell names a dataset manifest or log file.
void write_grid_manifest(const std::filesystem::path& path,
                         const std::vector<std::vector<std::string>>& cells);
std::vector<std::vector<StyleDataset>> load_grid(const std::filesystem::path& path);

/// Splits a log into trajectories by `traj` id, in order of first appearance.
std::vector<Trajectory> load_trajectories(const std::filesystem::path& path);

/// Loads trajectories from every *.jsonl file in a directory (sorted by
/// name), or from a single log file.
std::vector<Trajectory> load_trajectories_any(const std::filesystem::path& path);

}  // namespace playstyle
