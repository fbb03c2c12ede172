#include "fmxwb/bytes.hpp"

#include "fmxwb/error.hpp"

namespace fmxwb {

namespace {

int hex_nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

} // namespace

std::string to_hex(ByteView data) {
    static const char* digits = "0123456789abcdef";
    std::string out;
    out.reserve(data.size() * 2);
    for (std::uint8_t b : data) {
        out.push_back(digits[b >> 4]);
        out.push_back(digits[b & 0x0F]);
    }
    return out;
}

Bytes from_hex(std::string_view hex) {
    if (hex.size() % 2 != 0) {
        raise(ErrorCode::ParseError, "hex string has odd length");
    }
    Bytes out;
    out.reserve(hex.size() / 2);
    for (std::size_t i = 0; i < hex.size(); i += 2) {
        int hi = hex_nibble(hex[i]);
        int lo = hex_nibble(hex[i + 1]);
        if (hi < 0 || lo < 0) {
            raise(ErrorCode::ParseError, "invalid hex character");
        }
        out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
    }
    return out;
}

std::string lenient_utf8_prefix(ByteView data, std::size_t max_chars) {
    std::string out;
    std::size_t chars = 0;
    std::size_t i = 0;
    while (i < data.size() && chars < max_chars) {
        std::uint8_t b = data[i];
        std::size_t len;
        if (b < 0x80) {
            len = 1;
        } else if ((b & 0xE0) == 0xC0 && b >= 0xC2) {
            len = 2;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
        } else if ((b & 0xF8) == 0xF0 && b <= 0xF4) {
            len = 4;
        } else {
            ++i; // stray byte, drop it
            continue;
        }
        if (i + len > data.size()) {
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t j = 1; j < len; ++j) {
            if ((data[i + j] & 0xC0) != 0x80) {
                ok = false;
                break;
            }
        }
        if (!ok) {
            ++i;
            continue;
        }
        out.append(reinterpret_cast<const char*>(data.data() + i), len);
        i += len;
        ++chars;
    }
    return out;
}

} // namespace fmxwb
