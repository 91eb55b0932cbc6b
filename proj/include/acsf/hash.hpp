#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "acsf/bytes.hpp"

namespace acsf {

using Digest224 = std::array<std::uint8_t, 28>;
using Digest256 = std::array<std::uint8_t, 32>;

namespace detail {

template <std::size_t N>
std::array<std::uint8_t, N> evp_digest(const EVP_MD* md, ByteView data) {
    std::array<std::uint8_t, N> out{};
    unsigned len = 0;
    if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1 || len != N)
        throw std::runtime_error("EVP_Digest failed");
    return out;
}

}  // namespace detail

inline Digest224 sha224(ByteView data) {
    return detail::evp_digest<28>(EVP_sha224(), data);
}

inline Digest256 sha256(ByteView data) {
    return detail::evp_digest<32>(EVP_sha256(), data);
}

inline Digest224 hmac_sha224(ByteView key, ByteView data) {
    Digest224 out{};
    unsigned len = 0;
    if (HMAC(EVP_sha224(), key.data(), static_cast<int>(key.size()), data.data(), data.size(),
             out.data(), &len) == nullptr ||
        len != out.size())
        throw std::runtime_error("HMAC-SHA224 failed");
    return out;
}

}  // namespace acsf
