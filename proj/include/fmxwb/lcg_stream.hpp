#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "fmxwb/bytes.hpp"

namespace fmxwb {

inline constexpr std::uint32_t kLcgMultiplier = 0x19660D;  // 1664525
inline constexpr std::uint32_t kLcgIncrement = 0x3C6EF35F; // 1013904223

inline std::uint32_t lcg_advance(std::uint32_t x) {
    return kLcgMultiplier * x + kLcgIncrement;
}

struct DeviceIdentity {
    std::string device_code;
    std::string rf_code;
    std::string bluetooth;
    std::string machine_type;
    std::int64_t firmware_version = 0;
};

struct ExplicitSeed {
    std::uint32_t value = 0;
};

struct ReferenceMd5 {};

// ReferenceMd5 is a stand-in derivation (the production formula is not
// public): first 4 bytes, little-endian, of
// MD5(device_code || rf_code || machine_type || decimal firmware_version).
using SeedDerivationProfile = std::variant<ReferenceMd5, ExplicitSeed>;

enum class TransformProfile {
    IdentityZero, // f(i) = 0
    IndexByte,    // f(i) = i mod 256
};

// Byte i is the high byte of the state *before* the i-th advance, so byte 0
// is seed >> 24.
Bytes keystream(std::uint32_t seed, std::size_t length);

// The alternate extraction: advance first, then take bits 16..23.
Bytes gen_obfuscation(std::uint32_t seed, std::size_t length);

std::uint32_t derive_seed(const DeviceIdentity& id, const SeedDerivationProfile& profile);

// out[i] = data[i] ^ K_i ^ f(i); self-inverse for any (seed, transform).
Bytes layer1_apply(ByteView data, std::uint32_t seed, TransformProfile transform);

} // namespace fmxwb
