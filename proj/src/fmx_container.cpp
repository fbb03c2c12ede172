#include "fmxwb/fmx_container.hpp"

#include <algorithm>
#include <cstring>

#include "fmxwb/error.hpp"

namespace fmxwb {

std::array<std::uint8_t, 16> FmxHeader::checksum() const {
    std::array<std::uint8_t, 16> sum{};
    std::copy(tail.begin() + 4, tail.end(), sum.begin());
    return sum;
}

void FmxHeader::set_checksum(const std::array<std::uint8_t, 16>& sum) {
    std::copy(sum.begin(), sum.end(), tail.begin() + 4);
}

bool detect(ByteView data) {
    return data.size() >= kFmxMagic.size() &&
           std::equal(kFmxMagic.begin(), kFmxMagic.end(), data.begin());
}

FmxHeader parse_header(ByteView data, HeaderProfile profile) {
    (void)profile; // both layouts share the raw 32-byte frame
    if (!detect(data)) {
        raise(ErrorCode::NotFmx, "missing FMX magic");
    }
    if (data.size() < kFmxHeaderSize) {
        raise(ErrorCode::Truncated,
              "header needs 32 bytes, got " + std::to_string(data.size()));
    }
    FmxHeader h;
    std::copy_n(data.begin(), 4, h.magic.begin());
    h.version = read_u32_le(data.data() + 4);
    h.size_field = read_u32_le(data.data() + 8);
    std::copy_n(data.begin() + 12, 20, h.tail.begin());
    return h;
}

Bytes serialize_header(const FmxHeader& header) {
    Bytes out(kFmxHeaderSize);
    std::copy(header.magic.begin(), header.magic.end(), out.begin());
    write_u32_le(out.data() + 4, header.version);
    write_u32_le(out.data() + 8, header.size_field);
    std::copy(header.tail.begin(), header.tail.end(), out.begin() + 12);
    return out;
}

FmxContainer unwrap(ByteView file, HeaderProfile profile) {
    FmxContainer c;
    c.header = parse_header(file, profile);
    c.payload.assign(file.begin() + kFmxHeaderSize, file.end());
    return c;
}

} // namespace fmxwb
