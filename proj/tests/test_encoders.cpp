#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "playstyle/bytes.hpp"
#include "playstyle/encoders.hpp"
#include "playstyle/errors.hpp"
#include "playstyle/measures.hpp"
#include "playstyle/rng.hpp"
#include "test_util.hpp"

using namespace playstyle;
using testutil::random_byte_image;

TEST_CASE("identity encoder maps everything to one state") {
  const auto enc = identity_encoder();
  Rng rng(1);
  const auto a = random_byte_image(rng, {1, 1, 4, 4});
  const auto b = random_byte_image(rng, {1, 1, 4, 4});
  CHECK(enc->encode(a) == enc->encode(b));
  CHECK(enc->space_descriptor() == "1");

  StyleDataset ds;
  for (int i = 0; i < 1000; ++i) {
    ds.records.push_back(testutil::discrete_step(i % 250, i % 2));
  }
  const auto encoded = encode_dataset(MultiscaleEncoder({enc}), ds);
  CHECK(encoded.multiscale_state_count() == 1);
  CHECK(encoded.per_encoder[0].by_code.begin()->second.size() == 1000);
}

TEST_CASE("jaccard under the identity encoder alone is always 1") {
  const MultiscaleEncoder phi({identity_encoder()});
  const auto a = encode_dataset(phi, testutil::tagged_dataset({{0, 0}, {1, 1}}));
  const auto b = encode_dataset(phi, testutil::tagged_dataset({{7, 1}}));
  CHECK(evaluate_pair(a, b, Measure::jaccard).value == 1.0);
}

TEST_CASE("passthrough encoder is injective on value bytes") {
  const auto enc = passthrough_encoder();
  ObservationTensor board = testutil::byte_obs({4, 4}, std::vector<float>(16, 0.0f));
  for (int i = 0; i < 16; ++i) board.values[i] = static_cast<float>(i % 12);
  const std::string code = enc->encode(board);
  REQUIRE(code.size() == 16);
  for (int i = 0; i < 16; ++i) CHECK(static_cast<unsigned char>(code[i]) == i % 12);

  ObservationTensor other = board;
  other.values[5] += 1.0f;
  CHECK(enc->encode(board) != enc->encode(other));
}

TEST_CASE("passthrough distinct boards give distinct states") {
  Rng rng(5);
  StyleDataset ds;
  std::set<std::string> board_keys;
  while (board_keys.size() < 40) {
    StepRecord rec;
    rec.observation = random_byte_image(rng, {4, 4});
    rec.action = DiscreteAction{0, 2};
    if (board_keys.insert(rec.observation.value_bytes()).second) {
      ds.records.push_back(rec);
    }
  }
  const auto encoded = encode_dataset(MultiscaleEncoder({passthrough_encoder()}), ds);
  CHECK(encoded.multiscale_state_count() == 40);
}

TEST_CASE("downsample encoder quantizes block means") {
  DownsampleSpec spec;
  spec.out_frames = 1;
  spec.out_height = 4;
  spec.out_width = 4;
  spec.intensity_levels = 16;
  const auto enc = downsample_encoder(spec);

  ObservationTensor zero = testutil::byte_obs({1, 1, 8, 8}, std::vector<float>(64, 0.0f));
  const std::string zero_code = enc->encode(zero);
  REQUIRE(zero_code.size() == 16);
  for (char c : zero_code) CHECK(c == 0);

  // Bin width is 256/16 = 16. Changes within one pooled block that do not
  // move the block mean across a bin boundary leave the code unchanged.
  ObservationTensor base = testutil::byte_obs({1, 1, 8, 8}, std::vector<float>(64, 100.0f));
  ObservationTensor nudged = base;
  nudged.values[0] = 107.0f;  // block mean 101.75, still floor(.../16) == 6
  CHECK(enc->encode(base) == enc->encode(nudged));

  ObservationTensor crossed = base;
  crossed.values[0] = 128.0f;
  crossed.values[1] = 130.0f;  // block mean 114.5 -> bin 7
  const std::string base_code = enc->encode(base);
  const std::string crossed_code = enc->encode(crossed);
  CHECK(base_code != crossed_code);
  CHECK(static_cast<int>(base_code[0]) == 100 / 16);
  CHECK(static_cast<int>(crossed_code[0]) == static_cast<int>(std::floor(114.5 / 16.0)));
  for (std::size_t i = 1; i < base_code.size(); ++i) CHECK(base_code[i] == crossed_code[i]);
}

TEST_CASE("downsample of stacked frames keeps the most recent") {
  DownsampleSpec spec;
  spec.out_frames = 1;
  spec.out_height = 8;
  spec.out_width = 8;
  spec.intensity_levels = 16;
  const auto enc = downsample_encoder(spec);
  Rng rng(9);
  const auto obs = random_byte_image(rng, {4, 3, 64, 64});
  const std::string code = enc->encode(obs);
  CHECK(code.size() == 64);
  CHECK(enc->space_descriptor() == "16^(8*8)");

  // Editing an early frame must not change the code; editing the last must.
  ObservationTensor early = obs;
  early.values[0] = early.values[0] < 128 ? 255.0f : 0.0f;
  CHECK(enc->encode(early) == code);
  ObservationTensor late = obs;
  const std::size_t last_frame = 3u * 3u * 64u * 64u;
  for (std::size_t i = 0; i < 64; ++i) {
    late.values[last_frame + i] = late.values[last_frame + i] < 128 ? 255.0f : 0.0f;
  }
  CHECK(enc->encode(late) != code);
}

TEST_CASE("downsample rejects incompatible shapes") {
  DownsampleSpec spec;
  spec.out_frames = 1;
  spec.out_height = 8;
  spec.out_width = 8;
  const auto enc = downsample_encoder(spec);
  CHECK_THROWS_AS(enc->encode(testutil::byte_obs({16}, std::vector<float>(16, 0.0f))),
                  EncodeShapeError);
  CHECK_THROWS_AS(enc->encode(testutil::byte_obs({1, 1, 4, 4}, std::vector<float>(16, 0.0f))),
                  EncodeShapeError);
}

TEST_CASE("coarser intensity quantization never increases state counts") {
  Rng rng(17);
  StyleDataset ds;
  for (int i = 0; i < 200; ++i) {
    StepRecord rec;
    rec.observation = random_byte_image(rng, {1, 1, 8, 8});
    rec.action = DiscreteAction{0, 2};
    ds.records.push_back(rec);
  }
  DownsampleSpec fine{1, 4, 4, 16};
  DownsampleSpec coarse{1, 4, 4, 4};
  const auto fine_states =
      encode_dataset(MultiscaleEncoder({downsample_encoder(fine)}), ds).multiscale_state_count();
  const auto coarse_states =
      encode_dataset(MultiscaleEncoder({downsample_encoder(coarse)}), ds)
          .multiscale_state_count();
  CHECK(coarse_states <= fine_states);
}

TEST_CASE("encoders are pure under repeated calls") {
  Rng rng(33);
  const MultiscaleEncoder phi = parse_encoder_spec("identity,down:1x4x4:4,passthrough");
  for (int trial = 0; trial < 25; ++trial) {
    const auto obs = random_byte_image(rng, {2, 1, 8, 8});
    for (const auto& enc : phi.encoders()) {
      CHECK(enc->encode(obs) == enc->encode(obs));
    }
  }
}

TEST_CASE("multiscale state count is the sum over encoders") {
  const MultiscaleEncoder phi({identity_encoder(), passthrough_encoder()});
  StyleDataset ds;
  for (int i = 0; i < 10; ++i) ds.records.push_back(testutil::discrete_step(i, i % 2));
  const auto encoded = encode_dataset(phi, ds);
  CHECK(encoded.per_encoder[0].by_code.size() == 1);
  CHECK(encoded.per_encoder[1].by_code.size() == 10);
  CHECK(encoded.multiscale_state_count() == 11);
}

TEST_CASE("multiscale encoder rejects duplicate ids") {
  CHECK_THROWS_AS(MultiscaleEncoder({identity_encoder(), identity_encoder()}),
                  ValidationError);
  CHECK_THROWS_AS(MultiscaleEncoder({}), ValidationError);
}

TEST_CASE("pre-encoded tables round-trip and enforce purity") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "playstyle_pre_test";
  fs::create_directories(dir);
  const fs::path table = dir / "codes.txt";

  StyleDataset ds = testutil::tagged_dataset({{0, 0}, {1, 1}, {2, 0}});
  write_preencoded_table(table, *passthrough_encoder(), ds);

  const auto enc = preencoded_loader(table);
  CHECK(enc->id() == "passthrough");
  for (const auto& rec : ds.records) {
    CHECK(enc->encode(rec.observation) == rec.observation.value_bytes());
  }
  CHECK_THROWS_AS(enc->encode(testutil::tag_obs(77)), MissingCode);

  // Two different codes for one digest must fail at load time.
  std::ofstream bad(dir / "bad.txt");
  const std::string digest = observation_digest(testutil::tag_obs(0));
  bad << digest << ", ext, 00\n" << digest << ", ext, 01\n";
  bad.close();
  CHECK_THROWS_AS(preencoded_loader(dir / "bad.txt"), DuplicateDigest);

  fs::remove_all(dir);
}

TEST_CASE("encoder spec strings parse into the right stack") {
  const MultiscaleEncoder phi = parse_encoder_spec("identity,down:1x8x8:16,passthrough");
  REQUIRE(phi.size() == 3);
  CHECK(phi.ids() == std::vector<std::string>{"identity", "down:1x8x8:16", "passthrough"});
  CHECK_THROWS_AS(parse_encoder_spec("warp:3"), ValidationError);
  CHECK_THROWS_AS(parse_encoder_spec(""), ValidationError);
}
