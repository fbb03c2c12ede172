#pragma once

#include <array>
#include <cstdint>

#include "fmxwb/bytes.hpp"

namespace fmxwb {

inline constexpr std::array<std::uint8_t, 4> kFmxMagic = {0x46, 0x4D, 0x58, 0x01};
inline constexpr std::size_t kFmxHeaderSize = 32;

// Two observed layouts share the first 12 bytes (magic, version, one u32 at
// offset 8) and differ in how bytes 8..31 are read:
//   MainText:         offset 8 = stored payload length + 12, tail = seed material
//   AppendixChecksum: offset 8 = flags, tail = original size + MD5 checksum
enum class HeaderProfile {
    MainText,
    AppendixChecksum,
};

struct FmxHeader {
    std::array<std::uint8_t, 4> magic = kFmxMagic;
    std::uint32_t version = 1;
    std::uint32_t size_field = 0;             // raw u32 at offset 8 (flags under AppendixChecksum)
    std::array<std::uint8_t, 20> tail = {};   // bytes 12..31

    bool operator==(const FmxHeader&) const = default;

    // AppendixChecksum accessors over the shared storage.
    std::uint32_t flags() const { return size_field; }
    void set_flags(std::uint32_t v) { size_field = v; }
    std::uint32_t original_size() const { return read_u32_le(tail.data()); }
    void set_original_size(std::uint32_t v) { write_u32_le(tail.data(), v); }
    std::array<std::uint8_t, 16> checksum() const;
    void set_checksum(const std::array<std::uint8_t, 16>& sum);

    // MainText accessor for the reference seed encoding (tail bytes 0..3).
    std::uint32_t seed_material() const { return read_u32_le(tail.data()); }
    void set_seed_material(std::uint32_t v) { write_u32_le(tail.data(), v); }
};

struct FmxContainer {
    FmxHeader header;
    Bytes payload;
};

// True iff data starts with the 4-byte magic. Never reads past byte 4.
bool detect(ByteView data);

// Throws Error(NotFmx) on magic mismatch, Error(Truncated) below 32 bytes.
FmxHeader parse_header(ByteView data, HeaderProfile profile);

Bytes serialize_header(const FmxHeader& header);

FmxContainer unwrap(ByteView file, HeaderProfile profile);

} // namespace fmxwb
