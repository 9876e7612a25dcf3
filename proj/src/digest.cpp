#include "hypersweep/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>

namespace hypersweep {

std::string short_digest(std::string_view data) {
    const std::uint32_t h = static_cast<std::uint32_t>(fnv1a64(data) & 0xffffffffull);
    char buf[9];
    std::snprintf(buf, sizeof buf, "%08x", h);
    return std::string(buf, 8);
}

std::string sha256_hex(std::span<const std::byte> data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), md.data(), &len, EVP_sha256(), nullptr);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(hex[md[i] >> 4]);
        out.push_back(hex[md[i] & 0xf]);
    }
    return out;
}

std::string sha256_hex(std::string_view data) {
    return sha256_hex(std::span<const std::byte>(
        reinterpret_cast<const std::byte*>(data.data()), data.size()));
}

}  // namespace hypersweep
