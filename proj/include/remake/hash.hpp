#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace remake {

// Key used for booking references and synthesized taxi details when neither
// REMAKE_HASH_KEY nor a config file provides one.
inline constexpr std::string_view kDefaultHashKey = "multiwoz-remake";

std::array<std::uint8_t, 32> hmac_sha256(std::string_view key, std::string_view message);
std::string hmac_sha256_hex(std::string_view key, std::string_view message);
std::string sha256_hex(std::string_view data);

// REMAKE_HASH_KEY if set and non-empty, otherwise `fallback`.
std::string hash_key_from_env(std::string_view fallback = kDefaultHashKey);

}  // namespace remake
