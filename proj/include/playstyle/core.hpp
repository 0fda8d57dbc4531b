#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace playstyle {

enum class ValueKind { unit_float, byte };

/// A raw observation: flat value buffer plus an explicit shape header.
/// No image-library semantics; ingestion stays format-agnostic.
struct ObservationTensor {
  std::vector<int> shape;     // e.g. {4, 3, 64, 64}
  std::vector<float> values;  // row-major, product(shape) entries
  ValueKind value_kind = ValueKind::unit_float;

  std::size_t element_count() const;
  /// Canonical byte serialization (kind tag, shape header, values).
  /// Equality of observations is equality of these bytes.
  std::string canonical_bytes() const;
  /// Value buffer alone as bytes (uint8 per value for byte kind,
  /// little-endian float32 for unit_float). Used by the passthrough encoder.
  std::string value_bytes() const;
};

/// SHA-256 hex digest of the canonical bytes; the key used by pre-encoded
/// state tables.
std::string observation_digest(const ObservationTensor& obs);

struct DiscreteAction {
  int index = 0;       // < space_size
  int space_size = 1;  // declared per dataset, never inferred
};

struct ContinuousAction {
  std::vector<double> values;
};

using Action = std::variant<DiscreteAction, ContinuousAction>;

enum class ActionKind { discrete, continuous };

ActionKind action_kind(const Action& a);
/// Space size K for discrete actions, dimension D for continuous ones.
int action_space(const Action& a);

/// One observation-action sample.
struct StepRecord {
  ObservationTensor observation;
  Action action;
  std::optional<std::string> trajectory_id;
  std::optional<int> step_index;
};

struct Trajectory {
  std::string id;
  std::vector<StepRecord> steps;  // non-empty, step_index increasing when present
};

/// A bag of samples drawn from one style.
struct StyleDataset {
  std::optional<std::string> label;
  std::vector<StepRecord> records;
};

/// Discrete state identifier. Equality is bitwise on both fields, so states
/// from different encoders can never collide when pooled into one set.
struct StateId {
  std::string encoder_id;
  std::string code;

  bool operator==(const StateId&) const = default;
};

struct ValidationReport {
  std::size_t record_count = 0;
  std::optional<ActionKind> kind;
  std::optional<int> space;  // K or D once homogeneous
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
};

/// Reports action-kind/space and shape homogeneity plus the record count.
/// Violations are listed, never thrown.
ValidationReport validate_dataset(const StyleDataset& ds);

/// Throws ValidationError when the dataset is unusable for measurement.
void require_valid(const StyleDataset& ds);

/// Deterministic subsample of n records. Without replacement the result is a
/// sub-multiset of the input; n == size gives a permutation.
StyleDataset subsample(const StyleDataset& ds, std::size_t n, std::uint64_t seed,
                       bool replacement = false);

/// Draws two disjoint subsamples of n records each from one pool (requires
/// 2n <= size). Used when query and candidate come from the same style pool.
std::pair<StyleDataset, StyleDataset> subsample_disjoint(const StyleDataset& ds, std::size_t n,
                                                         std::uint64_t seed);

/// Re-declares the discrete action space (padding to a shared, larger space).
/// Throws ValidationError if any action index does not fit or actions are
/// continuous.
StyleDataset pad_action_space(const StyleDataset& ds, int new_space_size);

/// Flattens a trajectory into a dataset of its own steps.
StyleDataset trajectory_dataset(const Trajectory& t);

}  // namespace playstyle
