#include "doctest.h"

#include "fmxwb/bytes.hpp"
#include "fmxwb/error.hpp"

using namespace fmxwb;

TEST_SUITE("bytes") {

TEST_CASE("hex round trip") {
    Bytes data = {0x00, 0x01, 0x7B, 0xFF, 0xA5};
    CHECK(to_hex(ByteView(data)) == "00017bffa5");
    CHECK(from_hex("00017bffa5") == data);
    CHECK(from_hex("00017BFFA5") == data);
    CHECK(from_hex("").empty());
}

TEST_CASE("from_hex rejects bad input") {
    CHECK_THROWS_AS(from_hex("abc"), Error);
    CHECK_THROWS_AS(from_hex("zz"), Error);
    try {
        from_hex("0g");
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ParseError);
    }
}

TEST_CASE("u32 little endian") {
    std::uint8_t buf[4];
    write_u32_le(buf, 0x04030201);
    CHECK(buf[0] == 0x01);
    CHECK(buf[3] == 0x04);
    CHECK(read_u32_le(buf) == 0x04030201);
}

TEST_CASE("u32 big endian") {
    std::uint8_t buf[4];
    write_u32_be(buf, 0x04030201);
    CHECK(buf[0] == 0x04);
    CHECK(buf[3] == 0x01);
    CHECK(read_u32_be(buf) == 0x04030201);
}

TEST_CASE("lenient utf8 keeps valid text") {
    Bytes text = to_bytes("{\"a\":1}");
    CHECK(lenient_utf8_prefix(ByteView(text), 100) == "{\"a\":1}");
}

TEST_CASE("lenient utf8 caps the window") {
    Bytes text = to_bytes("abcdefgh");
    CHECK(lenient_utf8_prefix(ByteView(text), 3) == "abc");
    CHECK(lenient_utf8_prefix(ByteView(text), 0).empty());
}

TEST_CASE("lenient utf8 drops invalid bytes") {
    Bytes mixed = {0xFF, 0xFE, '{', 0x80, '}'};
    std::string out = lenient_utf8_prefix(ByteView(mixed), 100);
    CHECK(out == "{}");
}

TEST_CASE("lenient utf8 keeps multibyte sequences") {
    // U+00E9 (c3 a9) followed by ASCII
    Bytes text = {0xC3, 0xA9, 'x'};
    CHECK(lenient_utf8_prefix(ByteView(text), 2) == "\xC3\xA9x");
    CHECK(lenient_utf8_prefix(ByteView(text), 1) == "\xC3\xA9");
}

}
