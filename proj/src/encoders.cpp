#include "playstyle/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "playstyle/bytes.hpp"
#include "playstyle/errors.hpp"

namespace playstyle {

MultiscaleEncoder::MultiscaleEncoder(std::vector<EncoderPtr> encoders)
    : encoders_(std::move(encoders)) {
  if (encoders_.empty()) throw ValidationError("multiscale encoder needs at least one member");
  std::set<std::string> seen;
  for (const EncoderPtr& e : encoders_) {
    if (!e) throw ValidationError("null encoder in multiscale set");
    if (!seen.insert(e->id()).second) {
      throw ValidationError("duplicate encoder id '" + e->id() + "'");
    }
  }
}

std::vector<std::string> MultiscaleEncoder::ids() const {
  std::vector<std::string> out;
  out.reserve(encoders_.size());
  for (const EncoderPtr& e : encoders_) out.push_back(e->id());
  return out;
}

namespace {

class IdentityEncoder final : public StateEncoder {
 public:
  const std::string& id() const override {
    static const std::string kId = "identity";
    return kId;
  }
  const std::string& space_descriptor() const override {
    static const std::string kTag = "1";
    return kTag;
  }
  std::string encode(const ObservationTensor&) const override { return "unit"; }
};

class PassthroughEncoder final : public StateEncoder {
 public:
  const std::string& id() const override {
    static const std::string kId = "passthrough";
    return kId;
  }
  const std::string& space_descriptor() const override {
    static const std::string kTag = "raw";
    return kTag;
  }
  std::string encode(const ObservationTensor& obs) const override { return obs.value_bytes(); }
};

class DownsampleEncoder final : public StateEncoder {
 public:
  explicit DownsampleEncoder(const DownsampleSpec& spec) : spec_(spec) {
    if (spec.out_frames < 1 || spec.out_height < 1 || spec.out_width < 1) {
      throw ValidationError("downsample output dims must be positive");
    }
    if (spec.intensity_levels < 2 || spec.intensity_levels > 256) {
      throw ValidationError("intensity levels must be in [2, 256]");
    }
    std::ostringstream os;
    os << "down:" << spec.out_frames << "x" << spec.out_height << "x" << spec.out_width << ":"
       << spec.intensity_levels;
    id_ = os.str();
    std::ostringstream tag;
    tag << spec.intensity_levels << "^(" << spec.out_height << "*" << spec.out_width;
    if (spec.out_frames > 1) tag << "*" << spec.out_frames;
    tag << ")";
    descriptor_ = tag.str();
  }

  const std::string& id() const override { return id_; }
  const std::string& space_descriptor() const override { return descriptor_; }

  std::string encode(const ObservationTensor& obs) const override {
    if (obs.shape.size() != 4) {
      throw EncodeShapeError(id_ + ": expected [frames, channels, H, W], got rank " +
                             std::to_string(obs.shape.size()));
    }
    const int frames = obs.shape[0], channels = obs.shape[1];
    const int height = obs.shape[2], width = obs.shape[3];
    if (frames < spec_.out_frames || height < spec_.out_height || width < spec_.out_width) {
      throw EncodeShapeError(id_ + ": observation smaller than output dims");
    }
    if (obs.values.size() != obs.element_count()) {
      throw EncodeShapeError(id_ + ": observation length does not match shape");
    }

    // Pooling blocks: floor-sized, remainder rows/cols folded into the last one.
    const int block_h = height / spec_.out_height;
    const int block_w = width / spec_.out_width;
    const double range = obs.value_kind == ValueKind::byte ? 256.0 : 1.0;
    const int first_frame = frames - spec_.out_frames;  // keep the most recent frames

    std::string code;
    code.reserve(static_cast<std::size_t>(spec_.out_frames) * spec_.out_height * spec_.out_width);
    const auto value_at = [&](int f, int c, int y, int x) -> double {
      const std::size_t idx =
          ((static_cast<std::size_t>(f) * channels + c) * height + y) * width + x;
      return obs.values[idx];
    };
    for (int f = first_frame; f < frames; ++f) {
      for (int by = 0; by < spec_.out_height; ++by) {
        const int y0 = by * block_h;
        const int y1 = (by + 1 == spec_.out_height) ? height : y0 + block_h;
        for (int bx = 0; bx < spec_.out_width; ++bx) {
          const int x0 = bx * block_w;
          const int x1 = (bx + 1 == spec_.out_width) ? width : x0 + block_w;
          double sum = 0.0;
          for (int y = y0; y < y1; ++y) {
            for (int x = x0; x < x1; ++x) {
              double gray = 0.0;
              for (int c = 0; c < channels; ++c) gray += value_at(f, c, y, x);
              sum += gray / channels;
            }
          }
          const double mean = sum / (static_cast<double>(y1 - y0) * (x1 - x0));
          int bin = static_cast<int>(std::floor(mean * spec_.intensity_levels / range));
          bin = std::clamp(bin, 0, spec_.intensity_levels - 1);
          code.push_back(static_cast<char>(bin));
        }
      }
    }
    return code;
  }

 private:
  DownsampleSpec spec_;
  std::string id_;
  std::string descriptor_;
};

class PreencodedEncoder final : public StateEncoder {
 public:
  PreencodedEncoder(std::string encoder_id,
                    std::unordered_map<std::string, std::string> codes)
      : id_(std::move(encoder_id)), codes_(std::move(codes)) {}

  const std::string& id() const override { return id_; }
  const std::string& space_descriptor() const override {
    static const std::string kTag = "preencoded";
    return kTag;
  }
  std::string encode(const ObservationTensor& obs) const override {
    const std::string digest = observation_digest(obs);
    const auto it = codes_.find(digest);
    if (it == codes_.end()) throw MissingCode(digest);
    return it->second;
  }

 private:
  std::string id_;
  std::unordered_map<std::string, std::string> codes_;
};

std::string trimmed(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

}  // namespace

EncoderPtr identity_encoder() { return std::make_shared<IdentityEncoder>(); }

EncoderPtr passthrough_encoder() { return std::make_shared<PassthroughEncoder>(); }

EncoderPtr downsample_encoder(const DownsampleSpec& spec) {
  return std::make_shared<DownsampleEncoder>(spec);
}

EncoderPtr preencoded_loader(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::unordered_map<std::string, std::string> codes;
  std::string encoder_id;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string text = trimmed(line);
    if (text.empty() || text[0] == '#') continue;
    std::vector<std::string> fields;
    std::stringstream ss(text);
    std::string field;
    while (std::getline(ss, field, ',')) fields.push_back(trimmed(field));
    if (fields.size() != 3) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": expected 'digest_hex, encoder_id, code_hex'");
    }
    const std::string& digest = fields[0];
    if (encoder_id.empty()) {
      encoder_id = fields[1];
    } else if (encoder_id != fields[1]) {
      throw IoError(path.string() + ":" + std::to_string(line_no) +
                    ": mixed encoder ids in one table");
    }
    const std::string code = from_hex(fields[2]);
    const auto [it, fresh] = codes.emplace(digest, code);
    if (!fresh && it->second != code) {
      throw DuplicateDigest(path.string() + ":" + std::to_string(line_no) +
                            ": digest " + digest + " already has a different code");
    }
  }
  if (encoder_id.empty()) throw IoError(path.string() + ": empty pre-encoded table");
  return std::make_shared<PreencodedEncoder>(encoder_id, std::move(codes));
}

void write_preencoded_table(const std::filesystem::path& path, const StateEncoder& encoder,
                            const StyleDataset& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  std::set<std::string> seen;
  for (const StepRecord& rec : ds.records) {
    const std::string digest = observation_digest(rec.observation);
    if (!seen.insert(digest).second) continue;
    out << digest << ", " << encoder.id() << ", " << to_hex(encoder.encode(rec.observation))
        << '\n';
  }
}

std::size_t EncodedDataset::multiscale_state_count() const {
  std::size_t n = 0;
  for (const EncoderStates& e : per_encoder) n += e.by_code.size();
  return n;
}

EncodedDataset encode_dataset(const MultiscaleEncoder& phi, const StyleDataset& ds) {
  require_valid(ds);
  EncodedDataset out;
  out.label = ds.label;
  out.kind = action_kind(ds.records.front().action);
  out.space = action_space(ds.records.front().action);
  out.record_count = ds.records.size();
  out.encoder_ids = phi.ids();
  out.per_encoder.reserve(phi.size());
  for (const EncoderPtr& enc : phi.encoders()) {
    EncoderStates states;
    states.encoder_id = enc->id();
    for (const StepRecord& rec : ds.records) {
      states.by_code[enc->encode(rec.observation)].push_back(rec.action);
    }
    out.per_encoder.push_back(std::move(states));
  }
  return out;
}

MultiscaleEncoder parse_encoder_spec(const std::string& spec) {
  std::vector<EncoderPtr> encoders;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const std::string text = trimmed(part);
    if (text.empty()) continue;
    if (text == "identity") {
      encoders.push_back(identity_encoder());
    } else if (text == "passthrough") {
      encoders.push_back(passthrough_encoder());
    } else if (text.rfind("pre:", 0) == 0) {
      encoders.push_back(preencoded_loader(text.substr(4)));
    } else if (text.rfind("down:", 0) == 0) {
      // down:FxHxW:L
      const std::string rest = text.substr(5);
      const std::size_t colon = rest.find(':');
      if (colon == std::string::npos) throw ValidationError("bad encoder spec '" + text + "'");
      DownsampleSpec ds;
      std::vector<int> parsed;
      try {
        ds.intensity_levels = std::stoi(rest.substr(colon + 1));
        std::stringstream dims(rest.substr(0, colon));
        std::string dim;
        while (std::getline(dims, dim, 'x')) parsed.push_back(std::stoi(dim));
      } catch (const std::exception&) {
        throw ValidationError("bad encoder spec '" + text + "'");
      }
      if (parsed.size() != 3) throw ValidationError("bad encoder spec '" + text + "'");
      ds.out_frames = parsed[0];
      ds.out_height = parsed[1];
      ds.out_width = parsed[2];
      encoders.push_back(downsample_encoder(ds));
    } else {
      throw ValidationError("unknown encoder spec '" + text + "'");
    }
  }
  return MultiscaleEncoder(std::move(encoders));
}

}  // namespace playstyle
