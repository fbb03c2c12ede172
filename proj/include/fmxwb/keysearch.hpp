#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fmxwb/blowfish.hpp"
#include "fmxwb/bytes.hpp"
#include "fmxwb/lcg_stream.hpp"

namespace fmxwb {

enum class CandidateFamily {
    DeviceCodeVariations,
    DigestCombinations,
    LcgSeeded,
    HardwareCombos,
    TimestampKeys,
    SuffixBruteForce,
};

const char* family_name(CandidateFamily f);

inline constexpr std::string_view kSuffixCharset =
    "0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz";

struct FamilyParams {
    std::vector<std::string> hardware_prefixes = {"00:11:22", "AA:BB:CC", "DE:AD:BE"};
    int hardware_per_prefix = 100;
    std::int64_t ts_start = 1704067200; // 2024-01-01 UTC
    std::int64_t ts_end = 1753996800;   // 2025-08-01 UTC
    std::int64_t ts_stride = 604800;    // weekly
    std::vector<std::uint32_t> lcg_seeds; // empty: defaults derived from identity
    int suffix_max_len = 2;             // bounded by 6
};

// Ordered generators. Counts for the reference identity: 14, 140, 8, 300, 83.
std::vector<Bytes> gen_device_code_variations(const DeviceIdentity& id);
std::vector<Bytes> gen_digest_combinations(const DeviceIdentity& id);
std::vector<std::uint32_t> default_lcg_seeds(const DeviceIdentity& id);
std::vector<Bytes> gen_lcg_seeded(const std::vector<std::uint32_t>& seeds);
std::vector<Bytes> gen_hardware_combos(const DeviceIdentity& id,
                                       const std::vector<std::string>& prefixes,
                                       int per_prefix);
// Throws Error(InvalidRange) when start > end or stride <= 0. Samples are
// start, start+stride, ... while <= end.
std::vector<Bytes> gen_timestamp_keys(const DeviceIdentity& id, std::int64_t start,
                                      std::int64_t end, std::int64_t stride);

// Lazy suffix stream: for lengths 1..max_len in lexicographic charset order,
// MD5(device_code || suffix) then MD5(device_code || rf_code || suffix).
class SuffixKeyStream {
public:
    // Throws Error(InvalidRange) when max_len < 1 or > 6.
    SuffixKeyStream(const DeviceIdentity& id, int max_len);

    bool next(Bytes& key_out);
    std::uint64_t total_count() const; // 2 * (62 + 62^2 + ... + 62^max_len)

private:
    std::string device_code_;
    std::string with_rf_;
    std::string material_; // scratch buffer, avoids per-key allocation
    int max_len_;
    int length_ = 1;
    std::vector<int> odometer_;
    bool with_rf_phase_ = false;
    bool done_ = false;
};

struct PlaintextDetector {
    std::vector<std::uint8_t> first_byte_accept = {0x7B, 0x5B}; // '{' '['
    std::size_t confirm_window = 100;
};

enum class TryResult { Reject, WeakAccept, Confirm };

// Decrypts the first payload block: WeakAccept when byte 0 is in the accept
// set, then Confirm iff a '{' occurs within the first confirm_window
// characters of the leniently decoded full decryption (complete blocks
// decrypted, trailing partial block kept raw).
TryResult try_key(ByteView file, const SubkeySchedule& schedule, const PlaintextDetector& det);

struct AttackPhase {
    std::vector<CandidateFamily> families;
    std::uint64_t budget = 0;   // max candidates tested in this phase; 0 = unlimited
    unsigned parallelism = 1;
};

struct AttackPlan {
    std::vector<AttackPhase> phases;
    FamilyParams params;
};

// Phase 1: the five pattern families; phase 2: suffix search.
AttackPlan default_plan(unsigned workers, const FamilyParams& params = {});

struct SearchReport {
    bool found = false;
    Bytes key;
    std::size_t phase = 0;            // 0-based
    std::uint64_t candidate_index = 0; // global index within the phase
    CandidateFamily family = CandidateFamily::DeviceCodeVariations;
    std::uint64_t total_tested = 0;
    std::map<std::string, std::uint64_t> tested_per_family;
    std::uint64_t weak_accepts = 0;
    double elapsed_seconds = 0;

    std::string to_json() const;
};

// Deterministic outcome for fixed inputs regardless of worker count: batches
// are handed out in candidate order, in-flight batches drain after a hit, and
// the lowest (phase, candidate_index) confirm wins.
SearchReport run_attack(ByteView file, const DeviceIdentity& id, const AttackPlan& plan,
                        const PlaintextDetector& det = {});

} // namespace fmxwb
