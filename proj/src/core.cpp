#include "playstyle/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "playstyle/bytes.hpp"
#include "playstyle/errors.hpp"
#include "playstyle/rng.hpp"

namespace playstyle {

std::size_t ObservationTensor::element_count() const {
  std::size_t n = 1;
  for (int d : shape) n *= static_cast<std::size_t>(d);
  return shape.empty() ? 0 : n;
}

std::string ObservationTensor::value_bytes() const {
  std::string out;
  if (value_kind == ValueKind::byte) {
    out.reserve(values.size());
    for (float v : values) out.push_back(static_cast<char>(static_cast<unsigned char>(v)));
  } else {
    out.resize(values.size() * 4);
    for (std::size_t i = 0; i < values.size(); ++i) {
      std::uint32_t bits;
      static_assert(sizeof(bits) == sizeof(float));
      std::memcpy(&bits, &values[i], 4);
      out[4 * i] = static_cast<char>(bits & 0xff);
      out[4 * i + 1] = static_cast<char>((bits >> 8) & 0xff);
      out[4 * i + 2] = static_cast<char>((bits >> 16) & 0xff);
      out[4 * i + 3] = static_cast<char>((bits >> 24) & 0xff);
    }
  }
  return out;
}

std::string ObservationTensor::canonical_bytes() const {
  std::string out;
  out.push_back(value_kind == ValueKind::byte ? 'b' : 'f');
  out.push_back(static_cast<char>(shape.size()));
  for (int d : shape) {
    for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((d >> (8 * k)) & 0xff));
  }
  out += value_bytes();
  return out;
}

std::string observation_digest(const ObservationTensor& obs) {
  return sha256_hex(obs.canonical_bytes());
}

ActionKind action_kind(const Action& a) {
  return std::holds_alternative<DiscreteAction>(a) ? ActionKind::discrete
                                                   : ActionKind::continuous;
}

int action_space(const Action& a) {
  if (const auto* d = std::get_if<DiscreteAction>(&a)) return d->space_size;
  return static_cast<int>(std::get<ContinuousAction>(a).values.size());
}

ValidationReport validate_dataset(const StyleDataset& ds) {
  ValidationReport report;
  report.record_count = ds.records.size();
  if (ds.records.empty()) {
    report.violations.push_back("empty");
    return report;
  }

  const ActionKind kind = action_kind(ds.records.front().action);
  const int space = action_space(ds.records.front().action);
  const std::vector<int>& shape = ds.records.front().observation.shape;
  report.kind = kind;
  report.space = space;

  bool hetero_kind = false, hetero_space = false, hetero_shape = false;
  bool bad_index = false, bad_length = false, bad_range = false;
  for (const StepRecord& rec : ds.records) {
    if (action_kind(rec.action) != kind) hetero_kind = true;
    else if (action_space(rec.action) != space) hetero_space = true;
    if (const auto* d = std::get_if<DiscreteAction>(&rec.action)) {
      if (d->index < 0 || d->index >= d->space_size) bad_index = true;
    }
    const ObservationTensor& obs = rec.observation;
    if (obs.shape != shape) hetero_shape = true;
    if (obs.element_count() != obs.values.size()) bad_length = true;
    for (float v : obs.values) {
      if (obs.value_kind == ValueKind::byte) {
        if (!(v >= 0.0f && v <= 255.0f) || v != std::floor(v)) bad_range = true;
      } else if (!(v >= 0.0f && v <= 1.0f)) {
        bad_range = true;
      }
    }
  }
  if (hetero_kind) report.violations.push_back("heterogeneous action kind");
  if (hetero_space) report.violations.push_back("heterogeneous action space");
  if (hetero_shape) report.violations.push_back("heterogeneous observation shape");
  if (bad_index) report.violations.push_back("action index out of range");
  if (bad_length) report.violations.push_back("observation length does not match shape");
  if (bad_range) report.violations.push_back("observation value out of range");
  return report;
}

void require_valid(const StyleDataset& ds) {
  const ValidationReport report = validate_dataset(ds);
  if (!report.ok()) {
    std::string what = "invalid dataset";
    if (ds.label) what += " '" + *ds.label + "'";
    what += ":";
    for (const std::string& v : report.violations) what += " " + v + ";";
    throw ValidationError(what);
  }
}

StyleDataset subsample(const StyleDataset& ds, std::size_t n, std::uint64_t seed,
                       bool replacement) {
  StyleDataset out;
  out.label = ds.label;
  out.records.reserve(n);
  Rng rng(seed);
  if (replacement) {
    for (std::size_t i = 0; i < n; ++i) {
      out.records.push_back(ds.records[rng.uniform_below(ds.records.size())]);
    }
    return out;
  }
  if (n > ds.records.size()) {
    throw SampleExhausted("requested " + std::to_string(n) + " of " +
                          std::to_string(ds.records.size()) + " records without replacement");
  }
  std::vector<std::size_t> idx(ds.records.size());
  std::iota(idx.begin(), idx.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = i + rng.uniform_below(idx.size() - i);
    std::swap(idx[i], idx[j]);
    out.records.push_back(ds.records[idx[i]]);
  }
  return out;
}

std::pair<StyleDataset, StyleDataset> subsample_disjoint(const StyleDataset& ds, std::size_t n,
                                                         std::uint64_t seed) {
  const StyleDataset both = subsample(ds, 2 * n, seed, false);
  StyleDataset a, b;
  a.label = ds.label;
  b.label = ds.label;
  a.records.assign(both.records.begin(), both.records.begin() + n);
  b.records.assign(both.records.begin() + n, both.records.end());
  return {a, b};
}

StyleDataset pad_action_space(const StyleDataset& ds, int new_space_size) {
  StyleDataset out;
  out.label = ds.label;
  out.records.reserve(ds.records.size());
  for (const StepRecord& rec : ds.records) {
    const auto* d = std::get_if<DiscreteAction>(&rec.action);
    if (d == nullptr) throw ValidationError("cannot pad a continuous action space");
    if (d->index >= new_space_size) {
      throw ValidationError("action index " + std::to_string(d->index) +
                            " does not fit in space " + std::to_string(new_space_size));
    }
    StepRecord copy = rec;
    copy.action = DiscreteAction{d->index, new_space_size};
    out.records.push_back(std::move(copy));
  }
  return out;
}

StyleDataset trajectory_dataset(const Trajectory& t) {
  StyleDataset ds;
  ds.label = t.id;
  ds.records = t.steps;
  return ds;
}

}  // namespace playstyle
