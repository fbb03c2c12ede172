#pragma once

#include "fmxwb/blowfish.hpp"
#include "fmxwb/fmx_container.hpp"
#include "fmxwb/lcg_stream.hpp"

namespace fmxwb {

struct PipelineConfig {
    Bytes key;
    SeedDerivationProfile seed_profile = ReferenceMd5{};
    TransformProfile transform = TransformProfile::IdentityZero;
    HeaderProfile header_profile = HeaderProfile::MainText;
    PaddingMode padding = PaddingMode::ZeroPad;
    bool checksum_enabled = false; // requires AppendixChecksum
    std::uint32_t version = 1;

    // Throws Error(InvalidConfig) on violated invariants.
    void validate() const;
};

// header || ecb_encrypt(layer1_apply(plaintext, seed, transform), padding).
// MainText stores payload+12 at offset 8 and the seed little-endian in tail
// bytes 0..3; AppendixChecksum stores flags, the plaintext length, and
// MD5(plaintext).
Bytes wrap(ByteView plaintext, const DeviceIdentity& id, const PipelineConfig& cfg);

// Inverse of wrap under the same configuration. Under AppendixChecksum the
// plaintext is trimmed to the recorded original size and, when
// checksum_enabled, verified against the stored MD5 (Error(ChecksumMismatch)).
// Under MainText with ZeroPad the zero padding cannot be distinguished from
// data, so unaligned plaintexts come back with the decoded pad bytes attached.
Bytes load(ByteView file, const DeviceIdentity& id, const PipelineConfig& cfg);

// Script-compatible path: strip the 32-byte header, zero-fill the trailing
// partial block to 8 bytes, ECB-decrypt, return every block unstripped.
Bytes layer2_only_decrypt(ByteView file, ByteView key);

} // namespace fmxwb
