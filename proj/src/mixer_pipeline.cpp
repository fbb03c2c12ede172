#include "fmxwb/mixer_pipeline.hpp"

#include <algorithm>

#include "fmxwb/digest.hpp"
#include "fmxwb/error.hpp"

namespace fmxwb {

void PipelineConfig::validate() const {
    if (key.size() < kMinKeyBytes || key.size() > kMaxKeyBytes) {
        raise(ErrorCode::KeyLength, "pipeline key must be 4..56 bytes");
    }
    if (checksum_enabled && header_profile != HeaderProfile::AppendixChecksum) {
        raise(ErrorCode::InvalidConfig,
              "checksum_enabled requires the checksum header profile");
    }
}

Bytes wrap(ByteView plaintext, const DeviceIdentity& id, const PipelineConfig& cfg) {
    cfg.validate();
    std::uint32_t seed = derive_seed(id, cfg.seed_profile);
    Bytes transformed = layer1_apply(plaintext, seed, cfg.transform);

    SubkeySchedule schedule{ByteView(cfg.key)};
    Bytes payload = ecb_encrypt(schedule, transformed, cfg.padding);

    FmxHeader header;
    header.version = cfg.version;
    if (cfg.header_profile == HeaderProfile::MainText) {
        header.size_field = static_cast<std::uint32_t>(payload.size() + 12);
        header.set_seed_material(seed);
    } else {
        header.set_flags(cfg.checksum_enabled ? 0x01 : 0x00);
        header.set_original_size(static_cast<std::uint32_t>(plaintext.size()));
        if (cfg.checksum_enabled) {
            header.set_checksum(md5(plaintext));
        }
    }

    Bytes out = serialize_header(header);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

Bytes load(ByteView file, const DeviceIdentity& id, const PipelineConfig& cfg) {
    cfg.validate();
    FmxContainer container = unwrap(file, cfg.header_profile);

    SubkeySchedule schedule{ByteView(cfg.key)};
    Bytes transformed = ecb_decrypt(schedule, container.payload, cfg.padding);

    std::uint32_t seed = derive_seed(id, cfg.seed_profile);
    Bytes plaintext = layer1_apply(transformed, seed, cfg.transform);

    if (cfg.header_profile == HeaderProfile::AppendixChecksum) {
        std::uint32_t original = container.header.original_size();
        if (original <= plaintext.size()) {
            plaintext.resize(original);
        }
        if (cfg.checksum_enabled && (container.header.flags() & 0x01)) {
            if (md5(plaintext) != container.header.checksum()) {
                raise(ErrorCode::ChecksumMismatch, "payload MD5 does not match header");
            }
        }
    }
    return plaintext;
}

Bytes layer2_only_decrypt(ByteView file, ByteView key) {
    if (!detect(file)) {
        raise(ErrorCode::NotFmx, "missing FMX magic");
    }
    Bytes payload(file.begin() + std::min<std::size_t>(file.size(), kFmxHeaderSize),
                  file.end());
    payload.resize((payload.size() + 7) / 8 * 8, 0); // dd conv=sync
    SubkeySchedule schedule{key};
    return ecb_decrypt(schedule, payload, PaddingMode::NoPad);
}

} // namespace fmxwb
