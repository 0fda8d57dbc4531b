#include "playstyle/log_io.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <map>

#include <json.hpp>

#include "playstyle/bytes.hpp"
#include "playstyle/errors.hpp"

namespace playstyle {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json record_to_json(const StepRecord& rec) {
  json j;
  if (rec.trajectory_id) j["traj"] = *rec.trajectory_id;
  if (rec.step_index) j["t"] = *rec.step_index;
  j["obs_shape"] = rec.observation.shape;
  j["obs_kind"] = rec.observation.value_kind == ValueKind::byte ? "byte" : "unit_float";
  if (rec.observation.value_kind == ValueKind::byte) {
    j["obs"] = base64_encode(rec.observation.value_bytes());
  } else {
    j["obs"] = rec.observation.values;
  }
  if (const auto* d = std::get_if<DiscreteAction>(&rec.action)) {
    j["action"] = d->index;
    j["action_space"] = d->space_size;
  } else {
    const auto& c = std::get<ContinuousAction>(rec.action);
    j["action"] = c.values;
    j["action_space"] = "continuous:" + std::to_string(c.values.size());
  }
  return j;
}

StepRecord record_from_json(const json& j, const fs::path& where, std::size_t line_no) {
  const auto fail = [&](const std::string& msg) -> void {
    throw IoError(where.string() + ":" + std::to_string(line_no) + ": " + msg);
  };
  StepRecord rec;
  if (j.contains("traj")) rec.trajectory_id = j.at("traj").get<std::string>();
  if (j.contains("t")) rec.step_index = j.at("t").get<int>();
  if (!j.contains("obs_shape") || !j.contains("obs") || !j.contains("action") ||
      !j.contains("action_space")) {
    fail("missing required field");
  }
  rec.observation.shape = j.at("obs_shape").get<std::vector<int>>();
  const std::string kind = j.value("obs_kind", "unit_float");
  if (kind == "byte") {
    rec.observation.value_kind = ValueKind::byte;
  } else if (kind == "unit_float") {
    rec.observation.value_kind = ValueKind::unit_float;
  } else {
    fail("unknown obs_kind '" + kind + "'");
  }

  const json& obs = j.at("obs");
  if (obs.is_string()) {
    const std::string bytes = base64_decode(obs.get<std::string>());
    if (rec.observation.value_kind == ValueKind::byte) {
      rec.observation.values.reserve(bytes.size());
      for (unsigned char c : bytes) rec.observation.values.push_back(static_cast<float>(c));
    } else {
      if (bytes.size() % 4 != 0) fail("float observation bytes not a multiple of 4");
      rec.observation.values.resize(bytes.size() / 4);
      for (std::size_t i = 0; i < rec.observation.values.size(); ++i) {
        std::uint32_t bits = 0;
        for (int k = 3; k >= 0; --k) {
          bits = (bits << 8) | static_cast<unsigned char>(bytes[4 * i + k]);
        }
        float v;
        std::memcpy(&v, &bits, 4);
        rec.observation.values[i] = v;
      }
    }
  } else if (obs.is_array()) {
    rec.observation.values = obs.get<std::vector<float>>();
  } else {
    fail("obs must be base64 text or a float array");
  }
  if (rec.observation.element_count() != rec.observation.values.size()) {
    fail("obs length does not match obs_shape");
  }

  const json& space = j.at("action_space");
  if (space.is_string()) {
    const std::string s = space.get<std::string>();
    if (s.rfind("continuous:", 0) != 0) fail("bad action_space '" + s + "'");
    int dim = 0;
    try {
      dim = std::stoi(s.substr(11));
    } catch (const std::exception&) {
      fail("bad action_space '" + s + "'");
    }
    ContinuousAction act;
    act.values = j.at("action").get<std::vector<double>>();
    if (static_cast<int>(act.values.size()) != dim) fail("action length does not match dim");
    rec.action = std::move(act);
  } else {
    DiscreteAction act;
    act.space_size = space.get<int>();
    act.index = j.at("action").get<int>();
    if (act.space_size <= 0 || act.index < 0 || act.index >= act.space_size) {
      fail("action index out of declared space");
    }
    rec.action = act;
  }
  return rec;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError(path.string() + ": " + e.what());
  }
  return j;
}

}  // namespace

void write_trajectory_log(const fs::path& path, const std::vector<StepRecord>& records) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  for (const StepRecord& rec : records) out << record_to_json(rec).dump() << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<StepRecord> read_trajectory_log(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<StepRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    records.push_back(record_from_json(j, path, line_no));
  }
  return records;
}

void write_dataset_manifest(const fs::path& path, const std::string& label,
                            const std::vector<std::string>& files) {
  json j;
  j["label"] = label;
  j["files"] = files;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

StyleDataset load_dataset(const fs::path& path) {
  StyleDataset ds;
  if (path.extension() == ".jsonl") {
    ds.records = read_trajectory_log(path);
    return ds;
  }
  const json j = read_json_file(path);
  if (!j.contains("files")) throw IoError(path.string() + ": dataset manifest needs 'files'");
  if (j.contains("label")) ds.label = j.at("label").get<std::string>();
  const fs::path base = path.parent_path();
  for (const auto& f : j.at("files")) {
    const auto records = read_trajectory_log(base / f.get<std::string>());
    ds.records.insert(ds.records.end(), records.begin(), records.end());
  }
  return ds;
}

void write_styles_manifest(const fs::path& path, const std::vector<StyleEntry>& styles) {
  json j;
  j["styles"] = json::array();
  for (const StyleEntry& s : styles) {
    j["styles"].push_back({{"label", s.label}, {"files", s.files}});
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::pair<std::string, StyleDataset>> load_styles(const fs::path& path) {
  const json j = read_json_file(path);
  if (!j.contains("styles")) throw IoError(path.string() + ": styles manifest needs 'styles'");
  const fs::path base = path.parent_path();
  std::vector<std::pair<std::string, StyleDataset>> out;
  for (const auto& entry : j.at("styles")) {
    StyleDataset ds;
    ds.label = entry.at("label").get<std::string>();
    for (const auto& f : entry.at("files")) {
      const auto records = read_trajectory_log(base / f.get<std::string>());
      ds.records.insert(ds.records.end(), records.begin(), records.end());
    }
    out.emplace_back(*ds.label, std::move(ds));
  }
  return out;
}

void write_grid_manifest(const fs::path& path,
                         const std::vector<std::vector<std::string>>& cells) {
  json j;
  j["cells"] = cells;
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

std::vector<std::vector<StyleDataset>> load_grid(const fs::path& path) {
  const json j = read_json_file(path);
  if (!j.contains("cells")) throw IoError(path.string() + ": grid manifest needs 'cells'");
  const fs::path base = path.parent_path();
  std::vector<std::vector<StyleDataset>> grid;
  for (const auto& row : j.at("cells")) {
    std::vector<StyleDataset> cells;
    for (const auto& cell : row) {
      fs::path p = cell.get<std::string>();
      if (p.is_relative()) p = base / p;
      cells.push_back(load_dataset(p));
    }
    grid.push_back(std::move(cells));
  }
  return grid;
}

std::vector<Trajectory> load_trajectories(const fs::path& path) {
  const auto records = read_trajectory_log(path);
  std::vector<Trajectory> out;
  std::map<std::string, std::size_t> index;
  for (const StepRecord& rec : records) {
    const std::string id = rec.trajectory_id.value_or(path.stem().string());
    auto [it, fresh] = index.emplace(id, out.size());
    if (fresh) out.push_back(Trajectory{id, {}});
    Trajectory& traj = out[it->second];
    if (!traj.steps.empty() && rec.step_index && traj.steps.back().step_index &&
        *rec.step_index <= *traj.steps.back().step_index) {
      throw IoError(path.string() + ": step indexes of trajectory '" + id +
                    "' are not strictly increasing");
    }
    traj.steps.push_back(rec);
  }
  return out;
}

std::vector<Trajectory> load_trajectories_any(const fs::path& path) {
  if (!fs::is_directory(path)) return load_trajectories(path);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  std::vector<Trajectory> out;
  for (const fs::path& f : files) {
    auto trajectories = load_trajectories(f);
    for (auto& t : trajectories) out.push_back(std::move(t));
  }
  return out;
}

}  // namespace playstyle
