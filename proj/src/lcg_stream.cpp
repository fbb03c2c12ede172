#include "fmxwb/lcg_stream.hpp"

#include "fmxwb/digest.hpp"

namespace fmxwb {

Bytes keystream(std::uint32_t seed, std::size_t length) {
    Bytes out(length);
    std::uint32_t x = seed;
    for (std::size_t i = 0; i < length; ++i) {
        out[i] = static_cast<std::uint8_t>(x >> 24);
        x = lcg_advance(x);
    }
    return out;
}

Bytes gen_obfuscation(std::uint32_t seed, std::size_t length) {
    Bytes out(length);
    std::uint32_t x = seed;
    for (std::size_t i = 0; i < length; ++i) {
        x = lcg_advance(x);
        out[i] = static_cast<std::uint8_t>(x >> 16);
    }
    return out;
}

std::uint32_t derive_seed(const DeviceIdentity& id, const SeedDerivationProfile& profile) {
    if (const auto* explicit_seed = std::get_if<ExplicitSeed>(&profile)) {
        return explicit_seed->value;
    }
    std::string material = id.device_code + id.rf_code + id.machine_type +
                           std::to_string(id.firmware_version);
    auto digest = md5(to_bytes(material));
    return read_u32_le(digest.data());
}

Bytes layer1_apply(ByteView data, std::uint32_t seed, TransformProfile transform) {
    Bytes out(data.size());
    std::uint32_t x = seed;
    for (std::size_t i = 0; i < data.size(); ++i) {
        std::uint8_t k = static_cast<std::uint8_t>(x >> 24);
        std::uint8_t f = transform == TransformProfile::IndexByte
                             ? static_cast<std::uint8_t>(i & 0xFF)
                             : 0;
        out[i] = data[i] ^ k ^ f;
        x = lcg_advance(x);
    }
    return out;
}

} // namespace fmxwb
