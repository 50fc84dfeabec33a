#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace naphtha {

using Sha256Digest = std::array<std::uint8_t, 32>;

Sha256Digest sha256(std::span<const std::uint8_t> bytes);
Sha256Digest sha256(const std::string& text);

std::string hex_string(const Sha256Digest& digest);

} // namespace naphtha
