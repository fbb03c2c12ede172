#include "doctest.h"

#include <random>

#include "fmxwb/error.hpp"
#include "fmxwb/fmx_container.hpp"

using namespace fmxwb;

TEST_SUITE("fmx_container") {

TEST_CASE("detect is a pure magic prefix test") {
    Bytes good = {0x46, 0x4D, 0x58, 0x01};
    CHECK(detect(ByteView(good)));
    good.push_back(0xFF);
    CHECK(detect(ByteView(good)));
    Bytes wrong = {0x46, 0x4D, 0x58, 0x02};
    CHECK_FALSE(detect(ByteView(wrong)));
    Bytes shorter = {0x46, 0x4D, 0x58};
    CHECK_FALSE(detect(ByteView(shorter)));
    Bytes empty;
    CHECK_FALSE(detect(ByteView(empty)));
}

TEST_CASE("header serialize parse round trip") {
    std::mt19937 rng(31);
    for (int iter = 0; iter < 200; ++iter) {
        FmxHeader h;
        h.version = rng();
        h.size_field = rng();
        for (auto& b : h.tail) b = static_cast<std::uint8_t>(rng());
        Bytes wire = serialize_header(h);
        REQUIRE(wire.size() == kFmxHeaderSize);
        for (auto profile : {HeaderProfile::MainText, HeaderProfile::AppendixChecksum}) {
            FmxHeader back = parse_header(ByteView(wire), profile);
            CHECK(back == h);
            CHECK(serialize_header(back) == wire);
        }
    }
}

TEST_CASE("parse reproduces the raw header bytes") {
    std::mt19937 rng(37);
    Bytes raw(48);
    for (auto& b : raw) b = static_cast<std::uint8_t>(rng());
    raw[0] = 0x46; raw[1] = 0x4D; raw[2] = 0x58; raw[3] = 0x01;
    FmxHeader h = parse_header(ByteView(raw), HeaderProfile::MainText);
    Bytes wire = serialize_header(h);
    CHECK(wire == Bytes(raw.begin(), raw.begin() + 32));
}

TEST_CASE("parse errors") {
    Bytes small = {0x46, 0x4D, 0x58, 0x01, 0x00};
    try {
        parse_header(ByteView(small), HeaderProfile::MainText);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::Truncated);
    }
    Bytes bad(32, 0);
    try {
        parse_header(ByteView(bad), HeaderProfile::MainText);
        FAIL("expected throw");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFmx);
    }
}

TEST_CASE("field accessors share the storage") {
    FmxHeader h;
    h.set_flags(0x01);
    CHECK(h.flags() == 0x01);
    CHECK(h.size_field == 0x01);
    h.set_original_size(1234);
    CHECK(h.original_size() == 1234);
    CHECK(h.seed_material() == 1234); // same tail bytes, two readings
    std::array<std::uint8_t, 16> sum;
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = static_cast<std::uint8_t>(i);
    h.set_checksum(sum);
    CHECK(h.checksum() == sum);
    CHECK(h.original_size() == 1234); // checksum occupies tail bytes 4..19 only
    h.set_seed_material(0xA1B2C3D4);
    CHECK(h.seed_material() == 0xA1B2C3D4);
}

TEST_CASE("unwrap splits header and payload") {
    FmxHeader h;
    h.size_field = 20;
    Bytes file = serialize_header(h);
    Bytes payload = {1, 2, 3, 4, 5, 6, 7, 8};
    file.insert(file.end(), payload.begin(), payload.end());
    FmxContainer c = unwrap(ByteView(file), HeaderProfile::MainText);
    CHECK(c.header == h);
    CHECK(c.payload == payload);
}

}
