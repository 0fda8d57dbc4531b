// playstyle: measure similarity and diversity of decision-making styles from
// observation-action logs. Subcommands cover ingestion checks, encoding,
// pairwise measurement, zero-shot classification, spectrum consistency,
// trajectory diversity, synthetic data generation, and McNemar tests.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "playstyle/bytes.hpp"
#include "playstyle/core.hpp"
#include "playstyle/diversity.hpp"
#include "playstyle/encoders.hpp"
#include "playstyle/errors.hpp"
#include "playstyle/harness.hpp"
#include "playstyle/log_io.hpp"
#include "playstyle/measures.hpp"
#include "playstyle/report_json.hpp"
#include "playstyle/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace playstyle;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int kExitOk = 0;
constexpr int kExitIo = 2;
constexpr int kExitNoComparableStates = 3;
constexpr int kExitValidation = 4;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::stringstream ss(text);
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<std::size_t> parse_sizes(const std::string& text) {
  std::vector<std::size_t> out;
  try {
    for (const std::string& s : split_list(text)) out.push_back(std::stoull(s));
  } catch (const std::exception&) {
    throw ValidationError("bad size list '" + text + "'");
  }
  if (out.empty()) throw ValidationError("empty size list");
  return out;
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  try {
    for (const std::string& s : split_list(text)) out.push_back(std::stod(s));
  } catch (const std::exception&) {
    throw ValidationError("bad number list '" + text + "'");
  }
  return out;
}

std::string file_digest(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return sha256_hex(bytes);
}

json input_digests(const std::vector<fs::path>& paths) {
  json out = json::object();
  for (const fs::path& p : paths) {
    if (fs::is_directory(p)) {
      for (const auto& entry : fs::directory_iterator(p)) {
        if (entry.is_regular_file() && entry.path().extension() == ".jsonl") {
          out[entry.path().string()] = file_digest(entry.path());
        }
      }
    } else {
      out[p.string()] = file_digest(p);
    }
  }
  return out;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

void write_manifest(const std::string& subcommand, const json& config,
                    const std::vector<fs::path>& inputs, const std::string& manifest_out,
                    const std::string& default_near) {
  std::string path = manifest_out;
  if (path.empty()) {
    if (default_near.empty()) return;
    path = default_near + ".manifest.json";
  }
  json m;
  m["tool"] = "playstyle";
  m["version"] = kVersion;
  m["subcommand"] = subcommand;
  m["config"] = config;
  m["inputs"] = input_digests(inputs);
  m["wall_clock_utc"] = utc_now();
  m["tie_break"] = "first-declared";
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  out << m.dump(2) << '\n';
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw IoError("cannot write " + out_path);
  out << text;
}

// Shared measure/encoder options.
struct MeasureOpts {
  std::string encoder = "identity";
  std::string measure = "ps-union";
  int threshold_t = 1;
  std::string ground = "01";
  int pad_actions = 0;
};

void add_measure_opts(CLI::App* cmd, MeasureOpts& opts, bool multi_measure = false) {
  cmd->add_option("--encoder", opts.encoder,
                  "comma-joined encoder spec: identity | passthrough | down:FxHxW:L | pre:<file>");
  cmd->add_option("--measure", opts.measure,
                  multi_measure
                      ? "comma list of {pd,ps-int,ps-int-bc,ps-int-bd,jaccard,ps-union,ps-union-bc}"
                      : "one of {pd,ps-int,ps-int-bc,ps-int-bd,jaccard,ps-union,ps-union-bc}");
  cmd->add_option("--t", opts.threshold_t, "intersection sample threshold (distance measure)");
  cmd->add_option("--ground-metric", opts.ground, "discrete W2 ground metric: 01 | onehot");
  cmd->add_option("--pad-actions", opts.pad_actions,
                  "re-declare the discrete action space to this size before measuring");
}

MeasureConfig make_config(const MeasureOpts& opts) {
  MeasureConfig cfg;
  cfg.threshold_t = opts.threshold_t;
  if (opts.ground == "01") {
    cfg.ground = GroundMetric::zero_one;
  } else if (opts.ground == "onehot") {
    cfg.ground = GroundMetric::one_hot;
  } else {
    throw ValidationError("unknown ground metric '" + opts.ground + "'");
  }
  return cfg;
}

json opts_to_json(const MeasureOpts& opts) {
  return json{{"encoder", opts.encoder},
              {"measure", opts.measure},
              {"t", opts.threshold_t},
              {"ground_metric", opts.ground},
              {"pad_actions", opts.pad_actions}};
}

MeasureOpts opts_from_json(const json& j) {
  MeasureOpts opts;
  opts.encoder = j.at("encoder").get<std::string>();
  opts.measure = j.at("measure").get<std::string>();
  opts.threshold_t = j.at("t").get<int>();
  opts.ground = j.at("ground_metric").get<std::string>();
  opts.pad_actions = j.at("pad_actions").get<int>();
  return opts;
}

StyleDataset load_padded(const fs::path& path, int pad_actions) {
  StyleDataset ds = load_dataset(path);
  if (pad_actions > 0) ds = pad_action_space(ds, pad_actions);
  return ds;
}

// ---- measure ----

struct MeasureCmd {
  std::string a, b;
  MeasureOpts opts;
  std::string out, manifest_out;
};

json measure_cmd_config(const MeasureCmd& c) {
  json j = opts_to_json(c.opts);
  j["a"] = c.a;
  j["b"] = c.b;
  j["out"] = c.out;
  return j;
}

MeasureCmd measure_cmd_from_config(const json& j) {
  MeasureCmd c;
  c.opts = opts_from_json(j);
  c.a = j.at("a").get<std::string>();
  c.b = j.at("b").get<std::string>();
  c.out = j.value("out", "");
  return c;
}

int run_measure(const MeasureCmd& c) {
  const MultiscaleEncoder encoder = parse_encoder_spec(c.opts.encoder);
  const Measure measure = parse_measure(c.opts.measure);
  const MeasureConfig cfg = make_config(c.opts);
  const EncodedDataset enc_a = encode_dataset(encoder, load_padded(c.a, c.opts.pad_actions));
  const EncodedDataset enc_b = encode_dataset(encoder, load_padded(c.b, c.opts.pad_actions));

  write_manifest("measure", measure_cmd_config(c), {c.a, c.b}, c.manifest_out, "");
  try {
    const ComparisonReport report = evaluate_pair(enc_a, enc_b, measure, cfg, /*detailed=*/true);
    emit(report_to_json(report).dump(2) + "\n", c.out);
  } catch (const NoComparableStates& e) {
    json err;
    err["error"] = "no_comparable_states";
    err["detail"] = e.what();
    err["measure"] = c.opts.measure;
    emit(err.dump(2) + "\n", c.out);
    return kExitNoComparableStates;
  }
  return kExitOk;
}

// ---- classify ----

struct ClassifyCmd {
  std::string styles;
  std::string queries;  // optional separate query pools
  MeasureOpts opts;
  std::string sizes = "512";
  int rounds = 100;
  std::uint64_t seed = 0;
  bool overlap = false;
  bool replacement = false;
  std::string out, manifest_out;
  int workers = 0;  // 0 = env / 1
};

json classify_cmd_config(const ClassifyCmd& c) {
  json j = opts_to_json(c.opts);
  j["styles"] = c.styles;
  j["queries"] = c.queries;
  j["sizes"] = c.sizes;
  j["rounds"] = c.rounds;
  j["seed"] = c.seed;
  j["overlap"] = c.overlap;
  j["replacement"] = c.replacement;
  j["out"] = c.out;
  return j;
}

ClassifyCmd classify_cmd_from_config(const json& j) {
  ClassifyCmd c;
  c.opts = opts_from_json(j);
  c.styles = j.at("styles").get<std::string>();
  c.queries = j.value("queries", "");
  c.sizes = j.at("sizes").get<std::string>();
  c.rounds = j.at("rounds").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.overlap = j.value("overlap", false);
  c.replacement = j.value("replacement", false);
  c.out = j.value("out", "");
  return c;
}

int run_classify(const ClassifyCmd& c) {
  ClassificationTask task;
  task.encoder = parse_encoder_spec(c.opts.encoder);
  task.config = make_config(c.opts);
  task.rounds = c.rounds;
  task.seed = c.seed;
  task.disjoint_query = !c.overlap;
  task.replacement = c.replacement;
  for (auto& [label, ds] : load_styles(c.styles)) {
    StyleDataset data = c.opts.pad_actions > 0 ? pad_action_space(ds, c.opts.pad_actions)
                                               : std::move(ds);
    task.styles.push_back({label, std::move(data)});
  }
  if (!c.queries.empty()) {
    for (auto& [label, ds] : load_styles(c.queries)) {
      StyleDataset data = c.opts.pad_actions > 0 ? pad_action_space(ds, c.opts.pad_actions)
                                                 : std::move(ds);
      task.queries.push_back({label, std::move(data)});
    }
  }

  const std::vector<std::size_t> sizes = parse_sizes(c.sizes);
  const int workers = c.workers > 0 ? c.workers : env_workers();

  std::string csv = "measure,size,mean,std,min,max\n";
  for (const std::string& name : split_list(c.opts.measure)) {
    task.measure = parse_measure(name);
    for (const AccuracyStats& row : accuracy_sweep(task, sizes, workers)) {
      csv += name + "," + std::to_string(row.sample_size) + "," + fmt17(row.mean) + "," +
             fmt17(row.stddev) + "," + fmt17(row.min) + "," + fmt17(row.max) + "\n";
    }
  }
  std::vector<fs::path> inputs = {c.styles};
  if (!c.queries.empty()) inputs.push_back(c.queries);
  write_manifest("classify", classify_cmd_config(c), inputs, c.manifest_out, c.out);
  emit(csv, c.out);
  return kExitOk;
}

// ---- spectrum ----

struct SpectrumCmd {
  std::string grid;
  std::string target = "0,0";
  MeasureOpts opts;
  int rounds = 100;
  std::size_t size = 512;
  std::uint64_t seed = 0;
  std::string out, manifest_out;
  int workers = 0;
};

json spectrum_cmd_config(const SpectrumCmd& c) {
  json j = opts_to_json(c.opts);
  j["grid"] = c.grid;
  j["target"] = c.target;
  j["rounds"] = c.rounds;
  j["size"] = c.size;
  j["seed"] = c.seed;
  j["out"] = c.out;
  return j;
}

SpectrumCmd spectrum_cmd_from_config(const json& j) {
  SpectrumCmd c;
  c.opts = opts_from_json(j);
  c.grid = j.at("grid").get<std::string>();
  c.target = j.at("target").get<std::string>();
  c.rounds = j.at("rounds").get<int>();
  c.size = j.at("size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.out = j.value("out", "");
  return c;
}

int run_spectrum(const SpectrumCmd& c) {
  SpectrumTask task;
  task.grid = load_grid(c.grid);
  const auto target = split_list(c.target);
  if (target.size() != 2) throw ValidationError("--target must be 'row,col'");
  try {
    task.target_row = std::stoull(target[0]);
    task.target_col = std::stoull(target[1]);
  } catch (const std::exception&) {
    throw ValidationError("--target must be 'row,col'");
  }
  task.measure = parse_measure(c.opts.measure);
  task.config = make_config(c.opts);
  task.encoder = parse_encoder_spec(c.opts.encoder);
  task.rounds = c.rounds;
  task.sample_size = c.size;
  task.seed = c.seed;

  const int workers = c.workers > 0 ? c.workers : env_workers();
  const SpectrumResult result = spectrum_consistency(task, workers);

  json j;
  j["consistency_count"] = result.consistency_count;
  j["row_consistent"] = result.row_consistent;
  j["col_consistent"] = result.col_consistent;
  json rows = json::array();
  for (const auto& row : result.mean_values) {
    json cells = json::array();
    for (double v : row) {
      if (std::isnan(v)) cells.push_back(nullptr);
      else cells.push_back(v);
    }
    rows.push_back(std::move(cells));
  }
  j["mean_values"] = std::move(rows);
  write_manifest("spectrum", spectrum_cmd_config(c), {c.grid}, c.manifest_out, c.out);
  emit(j.dump(2) + "\n", c.out);
  return kExitOk;
}

// ---- diversity ----

struct DiversityCmd {
  std::string input;
  MeasureOpts opts;
  double threshold = 0.2;
  std::string out, manifest_out;
};

json diversity_cmd_config(const DiversityCmd& c) {
  json j = opts_to_json(c.opts);
  j["input"] = c.input;
  j["threshold"] = c.threshold;
  j["out"] = c.out;
  return j;
}

DiversityCmd diversity_cmd_from_config(const json& j) {
  DiversityCmd c;
  c.opts = opts_from_json(j);
  c.input = j.at("input").get<std::string>();
  c.threshold = j.at("threshold").get<double>();
  c.out = j.value("out", "");
  return c;
}

int run_diversity(const DiversityCmd& c) {
  DiversityConfig cfg;
  cfg.measure = parse_measure(c.opts.measure);
  cfg.config = make_config(c.opts);
  cfg.encoder = parse_encoder_spec(c.opts.encoder);
  cfg.threshold = c.threshold;

  const std::vector<Trajectory> trajectories = load_trajectories_any(c.input);
  const DiversityResult result = diverse_count(trajectories, cfg);

  json j;
  j["d"] = result.diverse_count;
  j["n"] = result.total;
  json flags = json::array();
  for (std::size_t i = 0; i < result.diverse.size(); ++i) {
    flags.push_back({{"trajectory", trajectories[i].id},
                     {"diverse", static_cast<bool>(result.diverse[i])}});
  }
  j["flags"] = std::move(flags);
  write_manifest("diversity", diversity_cmd_config(c), {c.input}, c.manifest_out, c.out);
  emit(j.dump(2) + "\n", c.out);
  return kExitOk;
}

// ---- synth ----

struct SynthCmd {
  std::string kind;  // grid | bandit | board
  std::string out_dir;
  std::string bias_levels = "1.0,0.75,0.5,0.25,0.0";
  std::string noise_levels = "0.0,0.19,0.38,0.57,0.76";
  int episodes = 352;
  int episode_length = 20;
  int grid_size = 10;
  std::string probs = "0.5,0.5";
  std::size_t n = 1000;
  std::string temperatures = "0.0001,0.001,0.01,0.1";
  int board_size = 5;
  std::uint64_t seed = 0;
  std::string manifest_out;
};

json synth_cmd_config(const SynthCmd& c) {
  return json{{"kind", c.kind},
              {"out", c.out_dir},
              {"bias_levels", c.bias_levels},
              {"noise_levels", c.noise_levels},
              {"episodes", c.episodes},
              {"episode_length", c.episode_length},
              {"grid_size", c.grid_size},
              {"probs", c.probs},
              {"n", c.n},
              {"temperatures", c.temperatures},
              {"board_size", c.board_size},
              {"seed", c.seed}};
}

SynthCmd synth_cmd_from_config(const json& j) {
  SynthCmd c;
  c.kind = j.at("kind").get<std::string>();
  c.out_dir = j.at("out").get<std::string>();
  c.bias_levels = j.at("bias_levels").get<std::string>();
  c.noise_levels = j.at("noise_levels").get<std::string>();
  c.episodes = j.at("episodes").get<int>();
  c.episode_length = j.at("episode_length").get<int>();
  c.grid_size = j.at("grid_size").get<int>();
  c.probs = j.at("probs").get<std::string>();
  c.n = j.at("n").get<std::size_t>();
  c.temperatures = j.at("temperatures").get<std::string>();
  c.board_size = j.at("board_size").get<int>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

int run_synth(const SynthCmd& c) {
  const fs::path dir = c.out_dir;
  fs::create_directories(dir);

  if (c.kind == "grid") {
    const std::vector<double> bias = parse_doubles(c.bias_levels);
    const std::vector<double> noise = parse_doubles(c.noise_levels);
    const GridStyles styles =
        generate_grid_styles(bias, noise, c.episodes, c.seed, c.grid_size, c.episode_length);
    std::vector<StyleEntry> entries;
    std::vector<std::vector<std::string>> grid_cells;
    for (std::size_t j = 0; j < styles.grid.size(); ++j) {
      std::vector<std::string> row;
      for (std::size_t i = 0; i < styles.grid[j].size(); ++i) {
        const std::string name = *styles.grid[j][i].label + ".jsonl";
        write_trajectory_log(dir / name, styles.grid[j][i].records);
        entries.push_back({*styles.grid[j][i].label, {name}});
        row.push_back(name);
      }
      grid_cells.push_back(std::move(row));
    }
    write_styles_manifest(dir / "styles.json", entries);
    write_grid_manifest(dir / "grid.json", grid_cells);
  } else if (c.kind == "bandit") {
    BanditStyle style;
    style.probs = parse_doubles(c.probs);
    style.arms = static_cast<int>(style.probs.size());
    const StyleDataset ds = generate_bandit(style, c.n, c.seed);
    write_trajectory_log(dir / "bandit.jsonl", ds.records);
    write_dataset_manifest(dir / "dataset.json", "bandit", {"bandit.jsonl"});
  } else if (c.kind == "board") {
    const std::vector<double> temps = parse_doubles(c.temperatures);
    const auto rollouts =
        generate_board_game(temps, c.episodes, c.seed, c.board_size, c.episode_length);
    for (const BoardGameRollouts& r : rollouts) {
      std::vector<StepRecord> records;
      for (const Trajectory& t : r.trajectories) {
        records.insert(records.end(), t.steps.begin(), t.steps.end());
      }
      char ztag[32];
      std::snprintf(ztag, sizeof(ztag), "z%g", r.temperature);
      std::string name = std::string(ztag) + ".jsonl";
      write_trajectory_log(dir / name, records);
    }
  } else {
    throw ValidationError("unknown synth kind '" + c.kind + "'");
  }
  write_manifest("synth", synth_cmd_config(c), {}, c.manifest_out,
                 (dir / "synth").string());
  return kExitOk;
}

// ---- mcnemar ----

struct McnemarCmd {
  std::uint64_t both_correct = 0, a_only = 0, b_only = 0, both_wrong = 0;
  bool chi2 = false;
  std::string out, manifest_out;
};

json mcnemar_cmd_config(const McnemarCmd& c) {
  return json{{"both_correct", c.both_correct}, {"a_only", c.a_only},
              {"b_only", c.b_only},             {"both_wrong", c.both_wrong},
              {"chi2", c.chi2},                 {"out", c.out}};
}

McnemarCmd mcnemar_cmd_from_config(const json& j) {
  McnemarCmd c;
  c.both_correct = j.at("both_correct").get<std::uint64_t>();
  c.a_only = j.at("a_only").get<std::uint64_t>();
  c.b_only = j.at("b_only").get<std::uint64_t>();
  c.both_wrong = j.at("both_wrong").get<std::uint64_t>();
  c.chi2 = j.at("chi2").get<bool>();
  c.out = j.value("out", "");
  return c;
}

int run_mcnemar(const McnemarCmd& c) {
  const ContingencyTable table{c.both_correct, c.a_only, c.b_only, c.both_wrong};
  const double p = c.chi2 ? mcnemar_chi2(table) : mcnemar_exact(table);
  json j;
  j["method"] = c.chi2 ? "chi2" : "exact";
  j["discordant"] = c.a_only + c.b_only;
  j["p_value"] = p;
  write_manifest("mcnemar", mcnemar_cmd_config(c), {}, c.manifest_out, c.out);
  emit(j.dump(2) + "\n", c.out);
  return kExitOk;
}

// ---- encode / validate ----

struct EncodeCmd {
  std::string data;
  std::string encoder = "passthrough";
  std::string out, manifest_out;
};

json encode_cmd_config(const EncodeCmd& c) {
  return json{{"data", c.data}, {"encoder", c.encoder}, {"out", c.out}};
}

EncodeCmd encode_cmd_from_config(const json& j) {
  EncodeCmd c;
  c.data = j.at("data").get<std::string>();
  c.encoder = j.at("encoder").get<std::string>();
  c.out = j.value("out", "");
  return c;
}

int run_encode(const EncodeCmd& c) {
  const MultiscaleEncoder encoder = parse_encoder_spec(c.encoder);
  if (encoder.size() != 1) {
    throw ValidationError("encode expects exactly one encoder, got a multiscale spec");
  }
  const StyleDataset ds = load_dataset(c.data);
  if (c.out.empty()) throw ValidationError("encode needs --out");
  write_preencoded_table(c.out, *encoder.encoders().front(), ds);
  write_manifest("encode", encode_cmd_config(c), {c.data}, c.manifest_out, c.out);
  return kExitOk;
}

int run_validate(const std::string& data) {
  const StyleDataset ds = load_dataset(data);
  const ValidationReport report = validate_dataset(ds);
  json j;
  j["record_count"] = report.record_count;
  if (report.kind) j["action_kind"] = *report.kind == ActionKind::discrete ? "discrete" : "continuous";
  if (report.space) j["action_space"] = *report.space;
  j["violations"] = report.violations;
  std::cout << j.dump(2) << '\n';
  return report.ok() ? kExitOk : kExitValidation;
}

// ---- rerun ----

int run_rerun(const std::string& manifest_path, const std::string& out_override) {
  std::ifstream in(manifest_path);
  if (!in) throw IoError("cannot open " + manifest_path);
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw IoError(manifest_path + std::string(": ") + e.what());
  }
  const std::string sub = m.at("subcommand").get<std::string>();
  const json& config = m.at("config");
  if (sub == "measure") {
    MeasureCmd c = measure_cmd_from_config(config);
    if (!out_override.empty()) c.out = out_override;
    return run_measure(c);
  }
  if (sub == "classify") {
    ClassifyCmd c = classify_cmd_from_config(config);
    if (!out_override.empty()) c.out = out_override;
    return run_classify(c);
  }
  if (sub == "spectrum") {
    SpectrumCmd c = spectrum_cmd_from_config(config);
    if (!out_override.empty()) c.out = out_override;
    return run_spectrum(c);
  }
  if (sub == "diversity") {
    DiversityCmd c = diversity_cmd_from_config(config);
    if (!out_override.empty()) c.out = out_override;
    return run_diversity(c);
  }
  if (sub == "synth") {
    SynthCmd c = synth_cmd_from_config(config);
    if (!out_override.empty()) c.out_dir = out_override;
    return run_synth(c);
  }
  if (sub == "mcnemar") {
    McnemarCmd c = mcnemar_cmd_from_config(config);
    if (!out_override.empty()) c.out = out_override;
    return run_mcnemar(c);
  }
  if (sub == "encode") {
    EncodeCmd c = encode_cmd_from_config(config);
    if (!out_override.empty()) c.out = out_override;
    return run_encode(c);
  }
  throw ValidationError("manifest names unknown subcommand '" + sub + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"discrete playstyle measures over observation-action logs"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  MeasureCmd measure_cmd;
  auto* measure = app.add_subcommand("measure", "compare two datasets with one measure");
  measure->add_option("--a", measure_cmd.a, "first dataset (manifest or .jsonl)")->required();
  measure->add_option("--b", measure_cmd.b, "second dataset")->required();
  add_measure_opts(measure, measure_cmd.opts);
  measure->add_option("--out", measure_cmd.out, "report path (default stdout)");
  measure->add_option("--manifest-out", measure_cmd.manifest_out, "run manifest path");

  ClassifyCmd classify_cmd;
  auto* classify = app.add_subcommand("classify", "zero-shot style classification sweep");
  classify->add_option("--styles", classify_cmd.styles, "styles manifest")->required();
  classify->add_option("--queries", classify_cmd.queries,
                       "optional separate query-pool styles manifest");
  add_measure_opts(classify, classify_cmd.opts, /*multi_measure=*/true);
  classify->add_option("--sizes", classify_cmd.sizes, "comma list of subsample sizes");
  classify->add_option("--rounds", classify_cmd.rounds, "subsampling rounds per size");
  classify->add_option("--seed", classify_cmd.seed, "experiment seed");
  classify->add_flag("--overlap", classify_cmd.overlap,
                     "allow query and candidate subsamples to overlap");
  classify->add_flag("--replacement", classify_cmd.replacement, "sample with replacement");
  classify->add_option("--out", classify_cmd.out, "CSV path (default stdout)");
  classify->add_option("--manifest-out", classify_cmd.manifest_out, "run manifest path");
  classify->add_option("--workers", classify_cmd.workers,
                       "worker threads (default PLAYSTYLE_WORKERS or 1)");

  SpectrumCmd spectrum_cmd;
  auto* spectrum = app.add_subcommand("spectrum", "spectrum consistency over a style grid");
  spectrum->add_option("--grid", spectrum_cmd.grid, "grid manifest")->required();
  spectrum->add_option("--target", spectrum_cmd.target, "target cell as 'row,col'");
  add_measure_opts(spectrum, spectrum_cmd.opts);
  spectrum->add_option("--rounds", spectrum_cmd.rounds, "subsampling rounds");
  spectrum->add_option("--size", spectrum_cmd.size, "subsample size");
  spectrum->add_option("--seed", spectrum_cmd.seed, "experiment seed");
  spectrum->add_option("--out", spectrum_cmd.out, "result path (default stdout)");
  spectrum->add_option("--manifest-out", spectrum_cmd.manifest_out, "run manifest path");
  spectrum->add_option("--workers", spectrum_cmd.workers, "worker threads");

  DiversityCmd diversity_cmd;
  auto* diversity = app.add_subcommand("diversity", "diverse trajectory count");
  diversity->add_option("--input", diversity_cmd.input, "trajectory log file or directory")
      ->required();
  add_measure_opts(diversity, diversity_cmd.opts);
  diversity->add_option("--threshold", diversity_cmd.threshold, "similarity threshold");
  diversity->add_option("--out", diversity_cmd.out, "result path (default stdout)");
  diversity->add_option("--manifest-out", diversity_cmd.manifest_out, "run manifest path");

  SynthCmd synth_cmd;
  auto* synth = app.add_subcommand("synth", "generate synthetic style datasets");
  synth->add_option("kind", synth_cmd.kind, "grid | bandit | board")->required();
  synth->add_option("--out", synth_cmd.out_dir, "output directory")->required();
  synth->add_option("--bias-levels", synth_cmd.bias_levels, "grid: comma list of biases");
  synth->add_option("--noise-levels", synth_cmd.noise_levels, "grid: comma list of noise levels");
  synth->add_option("--episodes", synth_cmd.episodes, "episodes per style");
  synth->add_option("--episode-length", synth_cmd.episode_length, "steps per episode");
  synth->add_option("--grid-size", synth_cmd.grid_size, "gridworld side length");
  synth->add_option("--probs", synth_cmd.probs, "bandit: arm probabilities");
  synth->add_option("--n", synth_cmd.n, "bandit: sample count");
  synth->add_option("--temperatures", synth_cmd.temperatures, "board: softmax temperatures");
  synth->add_option("--board-size", synth_cmd.board_size, "board side length");
  synth->add_option("--seed", synth_cmd.seed, "generation seed");
  synth->add_option("--manifest-out", synth_cmd.manifest_out, "run manifest path");

  McnemarCmd mcnemar_cmd;
  auto* mcnemar = app.add_subcommand("mcnemar", "paired significance test");
  mcnemar->add_option("--both-correct", mcnemar_cmd.both_correct, "both classifiers correct");
  mcnemar->add_option("--a-only", mcnemar_cmd.a_only, "only A correct")->required();
  mcnemar->add_option("--b-only", mcnemar_cmd.b_only, "only B correct")->required();
  mcnemar->add_option("--both-wrong", mcnemar_cmd.both_wrong, "both classifiers wrong");
  mcnemar->add_flag("--chi2", mcnemar_cmd.chi2, "continuity-corrected chi-square variant");
  mcnemar->add_option("--out", mcnemar_cmd.out, "result path (default stdout)");
  mcnemar->add_option("--manifest-out", mcnemar_cmd.manifest_out, "run manifest path");

  EncodeCmd encode_cmd;
  auto* encode = app.add_subcommand("encode", "write a pre-encoded state table");
  encode->add_option("--data", encode_cmd.data, "dataset to encode")->required();
  encode->add_option("--encoder", encode_cmd.encoder, "single encoder spec");
  encode->add_option("--out", encode_cmd.out, "table path")->required();
  encode->add_option("--manifest-out", encode_cmd.manifest_out, "run manifest path");

  std::string validate_data;
  auto* validate = app.add_subcommand("validate", "check a dataset and report violations");
  validate->add_option("--data", validate_data, "dataset to check")->required();

  std::string rerun_manifest, rerun_out;
  auto* rerun = app.add_subcommand("rerun", "re-run a subcommand from its manifest");
  rerun->add_option("--manifest", rerun_manifest, "run manifest path")->required();
  rerun->add_option("--out", rerun_out, "override the output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (measure->parsed()) return run_measure(measure_cmd);
    if (classify->parsed()) return run_classify(classify_cmd);
    if (spectrum->parsed()) return run_spectrum(spectrum_cmd);
    if (diversity->parsed()) return run_diversity(diversity_cmd);
    if (synth->parsed()) return run_synth(synth_cmd);
    if (mcnemar->parsed()) return run_mcnemar(mcnemar_cmd);
    if (encode->parsed()) return run_encode(encode_cmd);
    if (validate->parsed()) return run_validate(validate_data);
    if (rerun->parsed()) return run_rerun(rerun_manifest, rerun_out);
  } catch (const NoComparableStates& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNoComparableStates;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const MissingCode& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}
