#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace playstyle {

std::string to_hex(std::string_view bytes);
std::string from_hex(std::string_view hex);  // throws IoError on bad input

std::string base64_encode(std::string_view bytes);
std::string base64_decode(std::string_view text);  // throws IoError on bad input

/// SHA-256 of a byte string, used as the collision-resistant observation
/// digest in pre-encoded state tables.
std::array<std::uint8_t, 32> sha256(std::string_view bytes);
std::string sha256_hex(std::string_view bytes);

}  // namespace playstyle
