#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "playstyle/core.hpp"

namespace playstyle {

/// A pure mapping from observations to discrete state codes. Encoders must be
/// deterministic: identical observation bytes always give identical codes.
class StateEncoder {
 public:
  virtual ~StateEncoder() = default;

  virtual const std::string& id() const = 0;
  /// Human-readable cardinality tag such as "1" or "16^(8*8)".
  /// Documentation only; no behavior depends on it.
  virtual const std::string& space_descriptor() const = 0;
  virtual std::string encode(const ObservationTensor& obs) const = 0;

  StateId encode_id(const ObservationTensor& obs) const { return {id(), encode(obs)}; }
};

using EncoderPtr = std::shared_ptr<const StateEncoder>;

/// An ordered set of encoders at different granularities, applied jointly.
class MultiscaleEncoder {
 public:
  explicit MultiscaleEncoder(std::vector<EncoderPtr> encoders);

  const std::vector<EncoderPtr>& encoders() const { return encoders_; }
  std::size_t size() const { return encoders_.size(); }
  std::vector<std::string> ids() const;

 private:
  std::vector<EncoderPtr> encoders_;
};

struct DownsampleSpec {
  int out_frames = 1;
  int out_height = 8;
  int out_width = 8;
  int intensity_levels = 16;  // in [2, 256]
};

/// Maps every observation to the single "unit" state.
EncoderPtr identity_encoder();

/// Gray conversion, block-average pooling, most-recent frame selection, then
/// equal-width intensity quantization. Expects [frames, channels, H, W].
EncoderPtr downsample_encoder(const DownsampleSpec& spec);

/// The observation's own value bytes are the code (injective).
EncoderPtr passthrough_encoder();

/// Lookup encoder backed by an externally produced table of
/// `digest_hex, encoder_id, code_hex` lines. Every observation that will be
/// encoded must be present; unknown digests raise MissingCode.
EncoderPtr preencoded_loader(const std::filesystem::path& path);

/// Writes the pre-encoded table for a dataset under a concrete encoder, in
/// the format preencoded_loader reads.
void write_preencoded_table(const std::filesystem::path& path, const StateEncoder& encoder,
                            const StyleDataset& ds);

/// Per-encoder view of a dataset: state code -> action samples (with
/// multiplicity).
struct EncoderStates {
  std::string encoder_id;
  std::unordered_map<std::string, std::vector<Action>> by_code;
};

/// Immutable result of pushing a dataset through a multiscale encoder.
struct EncodedDataset {
  std::optional<std::string> label;
  std::vector<std::string> encoder_ids;
  std::vector<EncoderStates> per_encoder;  // parallel to encoder_ids
  ActionKind kind = ActionKind::discrete;
  int space = 0;  // K for discrete, D for continuous
  std::size_t record_count = 0;

  /// Total distinct states pooled over encoders (ids are namespaced, so this
  /// is simply the sum of the per-encoder counts).
  std::size_t multiscale_state_count() const;
};

EncodedDataset encode_dataset(const MultiscaleEncoder& phi, const StyleDataset& ds);

/// Parses a compact encoder spec: comma-joined components out of
/// `identity`, `passthrough`, `down:FxHxW:L`, `pre:<file>`.
MultiscaleEncoder parse_encoder_spec(const std::string& spec);

}  // namespace playstyle
