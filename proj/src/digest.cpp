#include "fmxwb/digest.hpp"

#include <openssl/evp.h>
#include <openssl/md5.h>

#include "fmxwb/error.hpp"

namespace fmxwb {

namespace {

void evp_digest(const EVP_MD* md, ByteView data, std::uint8_t* out, unsigned expect_len) {
    unsigned got = 0;
    if (EVP_Digest(data.data(), data.size(), out, &got, md, nullptr) != 1 || got != expect_len) {
        raise(ErrorCode::Internal, "digest computation failed");
    }
}

} // namespace

// The key search hashes millions of short inputs; the one-shot entry point
// skips the EVP provider dispatch and runs ~3x faster at that size.
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-declarations"
Md5Digest md5(ByteView data) {
    Md5Digest out{};
    MD5(data.data(), data.size(), out.data());
    return out;
}
#pragma GCC diagnostic pop

Sha256Digest sha256(ByteView data) {
    Sha256Digest out{};
    evp_digest(EVP_sha256(), data, out.data(), 32);
    return out;
}

std::string md5_hex(ByteView data) {
    auto d = md5(data);
    return to_hex(ByteView(d.data(), d.size()));
}

} // namespace fmxwb
