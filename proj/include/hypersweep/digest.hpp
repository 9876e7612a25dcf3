#pragma once
// Stable digests: FNV-1a for short identifiers, SHA-256 for object content.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace hypersweep {

// 64-bit FNV-1a. Endianness-free byte walk, identical on every platform.
constexpr std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

// Low 32 bits of fnv1a64 as 8 lowercase hex digits.
std::string short_digest(std::string_view data);

// Hex-encoded SHA-256 of a byte buffer.
std::string sha256_hex(std::span<const std::byte> data);
std::string sha256_hex(std::string_view data);

}  // namespace hypersweep
