#include "fmxwb/keysearch.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <memory>
#include <mutex>
#include <thread>

#include <nlohmann/json.hpp>

#include "fmxwb/digest.hpp"
#include "fmxwb/error.hpp"
#include "fmxwb/fmx_container.hpp"

namespace fmxwb {

const char* family_name(CandidateFamily f) {
    switch (f) {
    case CandidateFamily::DeviceCodeVariations: return "DeviceCodeVariations";
    case CandidateFamily::DigestCombinations: return "DigestCombinations";
    case CandidateFamily::LcgSeeded: return "LcgSeeded";
    case CandidateFamily::HardwareCombos: return "HardwareCombos";
    case CandidateFamily::TimestampKeys: return "TimestampKeys";
    case CandidateFamily::SuffixBruteForce: return "SuffixBruteForce";
    }
    return "Unknown";
}

namespace {

Bytes normalize16(ByteView data) {
    Bytes out(data.begin(), data.begin() + std::min<std::size_t>(data.size(), 16));
    out.resize(16, 0);
    return out;
}

Bytes md5_key(const std::string& material) {
    auto d = md5(to_bytes(material));
    return Bytes(d.begin(), d.end());
}

Bytes sha256_16_key(const std::string& material) {
    auto d = sha256(to_bytes(material));
    return Bytes(d.begin(), d.begin() + 16);
}

} // namespace

std::vector<Bytes> gen_device_code_variations(const DeviceIdentity& id) {
    const std::string& dc = id.device_code;
    std::vector<Bytes> keys;
    keys.push_back(normalize16(to_bytes(dc)));
    if (dc.size() >= 16) {
        keys.push_back(normalize16(to_bytes(
            dc.substr(0, 4) + dc.substr(8, 4) + dc.substr(12, 4) + dc.substr(4, 4))));
    }
    keys.push_back(normalize16(to_bytes(std::string(dc.rbegin(), dc.rend()))));
    if (dc.size() >= 16) {
        keys.push_back(normalize16(to_bytes(dc.substr(0, 8) + dc.substr(dc.size() - 8))));
    }
    for (int shift = 0; shift < 10; ++shift) {
        Bytes variant(dc.begin(), dc.end());
        for (auto& c : variant) {
            c = static_cast<std::uint8_t>(c + shift);
        }
        keys.push_back(normalize16(variant));
    }
    return keys;
}

std::vector<Bytes> gen_digest_combinations(const DeviceIdentity& id) {
    const std::string& dc = id.device_code;
    const std::string& rf = id.rf_code;
    const std::string& bt = id.bluetooth;
    const std::string& mt = id.machine_type;
    const std::string combinations[] = {
        dc,
        dc + rf,
        dc + bt,
        dc + mt,
        dc + rf + bt,
        rf + dc,
        bt + dc,
        dc + ":" + rf,
        dc + "-" + bt,
        dc + "_" + mt,
    };
    const std::string salts[] = {"", "Unitree", "unitree", "UNITREE",
                                 "Robotics", "G1", std::string("FMX\x01", 4)};
    std::vector<Bytes> keys;
    keys.reserve(std::size(combinations) * std::size(salts) * 2);
    for (const auto& combo : combinations) {
        for (const auto& salt : salts) {
            keys.push_back(md5_key(combo + salt));
            keys.push_back(sha256_16_key(combo + salt));
        }
    }
    return keys;
}

std::vector<std::uint32_t> default_lcg_seeds(const DeviceIdentity& id) {
    auto hash_seed = [](const std::string& s) {
        auto d = md5(to_bytes(s));
        // Leading 8 hex digits of the digest read as one big-endian word.
        return read_u32_be(d.data());
    };
    return {0,          1,          42,        123456,
            0xDEADBEEF, 0xCAFEBABE, hash_seed(id.device_code), hash_seed(id.rf_code)};
}

std::vector<Bytes> gen_lcg_seeded(const std::vector<std::uint32_t>& seeds) {
    std::vector<Bytes> keys;
    keys.reserve(seeds.size());
    for (auto seed : seeds) {
        keys.push_back(gen_obfuscation(seed, 16));
    }
    return keys;
}

std::vector<Bytes> gen_hardware_combos(const DeviceIdentity& id,
                                       const std::vector<std::string>& prefixes,
                                       int per_prefix) {
    std::vector<Bytes> keys;
    keys.reserve(prefixes.size() * static_cast<std::size_t>(per_prefix));
    for (const auto& prefix : prefixes) {
        for (int i = 0; i < per_prefix; ++i) {
            char mac[32];
            std::snprintf(mac, sizeof(mac), "%s:%02X:%02X:%02X", prefix.c_str(), i, i, i);
            std::string combined = id.device_code;
            for (const char* p = mac; *p; ++p) {
                if (*p != ':') combined.push_back(*p);
            }
            keys.push_back(md5_key(combined));
        }
    }
    return keys;
}

std::vector<Bytes> gen_timestamp_keys(const DeviceIdentity& id, std::int64_t start,
                                      std::int64_t end, std::int64_t stride) {
    if (start > end || stride <= 0) {
        raise(ErrorCode::InvalidRange, "timestamp window requires start <= end, stride > 0");
    }
    std::vector<Bytes> keys;
    for (std::int64_t t = start; t <= end; t += stride) {
        keys.push_back(md5_key(id.device_code + std::to_string(t)));
    }
    return keys;
}

SuffixKeyStream::SuffixKeyStream(const DeviceIdentity& id, int max_len)
    : device_code_(id.device_code), with_rf_(id.device_code + id.rf_code), max_len_(max_len) {
    if (max_len < 1 || max_len > 6) {
        raise(ErrorCode::InvalidRange, "suffix length must be 1..6");
    }
    odometer_.assign(1, 0);
}

std::uint64_t SuffixKeyStream::total_count() const {
    std::uint64_t total = 0;
    std::uint64_t span = 1;
    for (int len = 1; len <= max_len_; ++len) {
        span *= kSuffixCharset.size();
        total += span;
    }
    return total * 2;
}

bool SuffixKeyStream::next(Bytes& key_out) {
    if (done_) {
        return false;
    }
    material_.assign(with_rf_phase_ ? with_rf_ : device_code_);
    for (int digit : odometer_) {
        material_.push_back(kSuffixCharset[digit]);
    }
    auto digest = md5(ByteView(reinterpret_cast<const std::uint8_t*>(material_.data()),
                               material_.size()));
    key_out.assign(digest.begin(), digest.end());

    if (!with_rf_phase_) {
        with_rf_phase_ = true;
        return true;
    }
    with_rf_phase_ = false;
    for (int i = static_cast<int>(odometer_.size()) - 1; i >= 0; --i) {
        if (++odometer_[i] < static_cast<int>(kSuffixCharset.size())) {
            return true;
        }
        odometer_[i] = 0;
    }
    if (length_ < max_len_) {
        ++length_;
        odometer_.assign(length_, 0);
        return true;
    }
    done_ = true;
    return true;
}

TryResult try_key(ByteView file, const SubkeySchedule& schedule, const PlaintextDetector& det) {
    if (file.size() < kFmxHeaderSize + kBlowfishBlockSize) {
        return TryResult::Reject;
    }
    ByteView payload = file.subspan(kFmxHeaderSize);

    std::uint8_t first[8];
    schedule.decrypt_block(payload.data(), first);
    bool weak = std::find(det.first_byte_accept.begin(), det.first_byte_accept.end(),
                          first[0]) != det.first_byte_accept.end();
    if (!weak) {
        return TryResult::Reject;
    }

    Bytes full(payload.size());
    std::size_t aligned = payload.size() / 8 * 8;
    for (std::size_t i = 0; i < aligned; i += 8) {
        schedule.decrypt_block(payload.data() + i, full.data() + i);
    }
    std::copy(payload.begin() + aligned, payload.end(), full.begin() + aligned);

    std::string text = lenient_utf8_prefix(full, det.confirm_window);
    if (text.find('{') != std::string::npos) {
        return TryResult::Confirm;
    }
    return TryResult::WeakAccept;
}

AttackPlan default_plan(unsigned workers, const FamilyParams& params) {
    AttackPlan plan;
    plan.params = params;
    plan.phases.push_back({{CandidateFamily::DeviceCodeVariations,
                            CandidateFamily::DigestCombinations,
                            CandidateFamily::LcgSeeded,
                            CandidateFamily::HardwareCombos,
                            CandidateFamily::TimestampKeys},
                           0,
                           workers});
    plan.phases.push_back({{CandidateFamily::SuffixBruteForce}, 0, workers});
    return plan;
}

namespace {

// Serves candidate batches in global order; each batch carries its starting
// index so workers can report exact hit positions.
class CandidateSource {
public:
    CandidateSource(const std::vector<CandidateFamily>& families, const DeviceIdentity& id,
                    const FamilyParams& params) {
        for (auto family : families) {
            if (family == CandidateFamily::SuffixBruteForce) {
                suffix_ = std::make_unique<SuffixKeyStream>(id, params.suffix_max_len);
                continue;
            }
            std::vector<Bytes> keys;
            switch (family) {
            case CandidateFamily::DeviceCodeVariations:
                keys = gen_device_code_variations(id);
                break;
            case CandidateFamily::DigestCombinations:
                keys = gen_digest_combinations(id);
                break;
            case CandidateFamily::LcgSeeded:
                keys = gen_lcg_seeded(params.lcg_seeds.empty() ? default_lcg_seeds(id)
                                                               : params.lcg_seeds);
                break;
            case CandidateFamily::HardwareCombos:
                keys = gen_hardware_combos(id, params.hardware_prefixes,
                                           params.hardware_per_prefix);
                break;
            case CandidateFamily::TimestampKeys:
                keys = gen_timestamp_keys(id, params.ts_start, params.ts_end,
                                          params.ts_stride);
                break;
            case CandidateFamily::SuffixBruteForce:
                break;
            }
            family_ranges_.push_back({family, next_index_, next_index_ + keys.size()});
            next_index_ += keys.size();
            for (auto& k : keys) {
                pregenerated_.push_back(std::move(k));
            }
        }
        if (suffix_) {
            family_ranges_.push_back(
                {CandidateFamily::SuffixBruteForce, next_index_,
                 next_index_ + suffix_->total_count()});
        }
    }

    // Fills keys[0..n) in place (reusing their buffers) and reports the global
    // index of the first one; n == 0 when the space or the budget is spent.
    std::size_t next_batch(std::vector<Bytes>& keys, std::uint64_t& first_index,
                           std::size_t max_batch, std::uint64_t budget) {
        std::lock_guard lock(mutex_);
        if (keys.size() < max_batch) {
            keys.resize(max_batch);
        }
        first_index = served_;
        std::size_t count = 0;
        while (count < max_batch) {
            if (budget != 0 && served_ + count >= budget) {
                break;
            }
            std::uint64_t idx = served_ + count;
            if (idx < pregenerated_.size()) {
                keys[count] = pregenerated_[idx];
            } else if (suffix_) {
                if (!suffix_->next(keys[count])) {
                    break;
                }
            } else {
                break;
            }
            ++count;
        }
        served_ += count;
        return count;
    }

    // Splits [first, last) across the family ranges; fn(family, n) per overlap.
    // family_ranges_ is immutable after construction, so no lock is needed.
    template <typename Fn>
    void count_ranges(std::uint64_t first, std::uint64_t last, Fn&& fn) const {
        for (const auto& range : family_ranges_) {
            std::uint64_t lo = std::max(first, range.first);
            std::uint64_t hi = std::min(last, range.last);
            if (lo < hi) {
                fn(range.family, hi - lo);
            }
        }
    }

    CandidateFamily family_at(std::uint64_t index) const {
        for (const auto& range : family_ranges_) {
            if (index >= range.first && index < range.last) {
                return range.family;
            }
        }
        return family_ranges_.empty() ? CandidateFamily::DeviceCodeVariations
                                      : family_ranges_.back().family;
    }

private:
    struct FamilyRange {
        CandidateFamily family;
        std::uint64_t first;
        std::uint64_t last;
    };

    std::mutex mutex_;
    std::vector<Bytes> pregenerated_;
    std::unique_ptr<SuffixKeyStream> suffix_;
    std::vector<FamilyRange> family_ranges_;
    std::uint64_t next_index_ = 0;
    std::uint64_t served_ = 0;
};

struct PhaseResult {
    bool found = false;
    std::uint64_t candidate_index = 0;
    Bytes key;
    CandidateFamily family = CandidateFamily::DeviceCodeVariations;
    std::uint64_t tested = 0;
    std::uint64_t weak_accepts = 0;
    std::map<std::string, std::uint64_t> tested_per_family;
};

PhaseResult run_phase(ByteView file, const DeviceIdentity& id, const AttackPhase& phase,
                      const FamilyParams& params, const PlaintextDetector& det) {
    CandidateSource source(phase.families, id, params);

    std::mutex result_mutex;
    bool found = false;
    std::uint64_t best_index = 0;
    Bytes best_key;
    std::atomic<bool> stop{false};
    std::atomic<std::uint64_t> tested{0};
    std::atomic<std::uint64_t> weak_accepts{0};
    std::map<std::string, std::uint64_t> per_family;
    std::mutex per_family_mutex;

    auto worker = [&]() {
        std::vector<Bytes> batch;
        std::uint64_t first_index = 0;
        std::size_t n_keys = 0;
        Bytes lane_seed(16, 0);
        std::vector<SubkeySchedule> lanes(8, SubkeySchedule{ByteView(lane_seed)});
        std::map<std::string, std::uint64_t> local_counts;
        while (!stop.load(std::memory_order_relaxed) &&
               (n_keys = source.next_batch(batch, first_index, 256, phase.budget)) > 0) {
            for (std::size_t g = 0; g < n_keys; g += lanes.size()) {
                std::size_t width = std::min(lanes.size(), n_keys - g);
                rekey_batch(std::span(lanes.data(), width),
                            std::span(batch.data() + g, width));
                for (std::size_t k = 0; k < width; ++k) {
                    std::size_t i = g + k;
                    TryResult r = try_key(file, lanes[k], det);
                    if (r == TryResult::WeakAccept) {
                        weak_accepts.fetch_add(1, std::memory_order_relaxed);
                    } else if (r == TryResult::Confirm) {
                        weak_accepts.fetch_add(1, std::memory_order_relaxed);
                        std::lock_guard lock(result_mutex);
                        std::uint64_t idx = first_index + i;
                        if (!found || idx < best_index) {
                            found = true;
                            best_index = idx;
                            best_key = batch[i];
                        }
                        stop.store(true, std::memory_order_relaxed);
                        // keep draining this batch: a lower index may still confirm
                    }
                }
            }
            // batches always drain fully, so account for them wholesale
            tested.fetch_add(n_keys, std::memory_order_relaxed);
            source.count_ranges(first_index, first_index + n_keys,
                                [&](CandidateFamily f, std::uint64_t c) {
                                    local_counts[family_name(f)] += c;
                                });
        }
        std::lock_guard lock(per_family_mutex);
        for (const auto& [name, count] : local_counts) {
            per_family[name] += count;
        }
    };

    unsigned n = std::max(1u, phase.parallelism);
    if (n == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n);
        for (unsigned i = 0; i < n; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& t : pool) {
            t.join();
        }
    }

    PhaseResult result;
    result.found = found;
    result.candidate_index = best_index;
    result.key = best_key;
    result.tested = tested.load();
    result.weak_accepts = weak_accepts.load();
    result.tested_per_family = std::move(per_family);
    if (result.found) {
        result.family = source.family_at(best_index);
    }
    return result;
}

} // namespace

SearchReport run_attack(ByteView file, const DeviceIdentity& id, const AttackPlan& plan,
                        const PlaintextDetector& det) {
    if (plan.phases.empty()) {
        raise(ErrorCode::InvalidConfig, "attack plan has no phases");
    }
    auto start = std::chrono::steady_clock::now();
    SearchReport report;
    for (std::size_t phase_idx = 0; phase_idx < plan.phases.size(); ++phase_idx) {
        const AttackPhase& phase = plan.phases[phase_idx];
        PhaseResult r = run_phase(file, id, phase, plan.params, det);
        report.total_tested += r.tested;
        report.weak_accepts += r.weak_accepts;
        for (const auto& [name, count] : r.tested_per_family) {
            report.tested_per_family[name] += count;
        }
        if (r.found) {
            report.found = true;
            report.key = r.key;
            report.phase = phase_idx;
            report.candidate_index = r.candidate_index;
            report.family = r.family;
            break;
        }
    }
    report.elapsed_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

std::string SearchReport::to_json() const {
    nlohmann::json j;
    j["outcome"] = found ? "found" : "exhausted";
    if (found) {
        j["key_hex"] = to_hex(ByteView(key));
        j["phase"] = phase;
        j["candidate_index"] = candidate_index;
        j["family"] = family_name(family);
    }
    j["total_tested"] = total_tested;
    j["tested_per_family"] = tested_per_family;
    j["weak_accepts"] = weak_accepts;
    j["elapsed_seconds"] = elapsed_seconds;
    return j.dump();
}

} // namespace fmxwb
