#pragma once

#include <array>
#include <cstdint>

#include "fmxwb/bytes.hpp"

namespace fmxwb {

using Md5Digest = std::array<std::uint8_t, 16>;
using Sha256Digest = std::array<std::uint8_t, 32>;

Md5Digest md5(ByteView data);
Sha256Digest sha256(ByteView data);

// Lowercase hex of the MD5 digest, matching the usual hexdigest() form.
std::string md5_hex(ByteView data);

} // namespace fmxwb
