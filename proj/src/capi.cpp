#include "fmxwb.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "fmxwb/error.hpp"
#include "fmxwb/fmx_container.hpp"
#include "fmxwb/keysearch.hpp"
#include "fmxwb/mixer_pipeline.hpp"
#include "fmxwb/orchestrator.hpp"
#include "fmxwb/telemetry.hpp"

using nlohmann::json;

namespace {

thread_local std::string g_last_error = "ok";

fmxwb_status fail(fmxwb_status code, const char* message) {
    g_last_error = message;
    return code;
}

// Runs the body, translating exceptions into status codes.
template <typename Fn>
fmxwb_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error = "ok";
        return FMXWB_OK;
    } catch (const fmxwb::Error& e) {
        g_last_error = e.what();
        return static_cast<fmxwb_status>(static_cast<int>(e.code()));
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return FMXWB_E_INTERNAL;
    } catch (...) {
        g_last_error = "unknown failure";
        return FMXWB_E_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) {
        throw std::bad_alloc();
    }
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

uint8_t* dup_bytes(const fmxwb::Bytes& b) {
    uint8_t* out = static_cast<uint8_t*>(std::malloc(b.size() ? b.size() : 1));
    if (!out) {
        throw std::bad_alloc();
    }
    std::memcpy(out, b.data(), b.size());
    return out;
}

json parse_options(const char* options_json, const char* what) {
    if (!options_json || !*options_json) {
        return json::object();
    }
    json j = json::parse(options_json, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        fmxwb::raise(fmxwb::ErrorCode::ParseError,
                     std::string(what) + " options must be a JSON object");
    }
    return j;
}

fmxwb::DeviceIdentity identity_from_json(const json& j) {
    fmxwb::DeviceIdentity id;
    id.device_code = j.value("device_code", "");
    id.rf_code = j.value("rf_code", "");
    id.bluetooth = j.value("bluetooth", "");
    id.machine_type = j.value("machine_type", "");
    id.firmware_version = j.value("firmware_version", std::int64_t{0});
    if (id.device_code.empty()) {
        fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "identity needs a device_code");
    }
    return id;
}

struct PipelineOptions {
    fmxwb::PipelineConfig cfg;
    fmxwb::DeviceIdentity identity;
};

PipelineOptions pipeline_options(const json& j) {
    PipelineOptions out;
    if (!j.contains("key_hex") || !j["key_hex"].is_string()) {
        fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "options need key_hex");
    }
    out.cfg.key = fmxwb::from_hex(j["key_hex"].get<std::string>());
    if (j.contains("seed")) {
        out.cfg.seed_profile = fmxwb::ExplicitSeed{j["seed"].get<std::uint32_t>()};
    } else if (j.contains("identity")) {
        out.identity = identity_from_json(j["identity"]);
        out.cfg.seed_profile = fmxwb::ReferenceMd5{};
    } else {
        fmxwb::raise(fmxwb::ErrorCode::InvalidConfig,
                     "options need either seed or identity");
    }
    std::string transform = j.value("transform", "identity");
    if (transform == "identity") {
        out.cfg.transform = fmxwb::TransformProfile::IdentityZero;
    } else if (transform == "index") {
        out.cfg.transform = fmxwb::TransformProfile::IndexByte;
    } else {
        fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "unknown transform: " + transform);
    }
    std::string profile = j.value("profile", "main");
    if (profile == "main") {
        out.cfg.header_profile = fmxwb::HeaderProfile::MainText;
    } else if (profile == "checksum") {
        out.cfg.header_profile = fmxwb::HeaderProfile::AppendixChecksum;
    } else {
        fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "unknown profile: " + profile);
    }
    std::string padding = j.value("padding", "zero");
    if (padding == "zero") {
        out.cfg.padding = fmxwb::PaddingMode::ZeroPad;
    } else if (padding == "pkcs7") {
        out.cfg.padding = fmxwb::PaddingMode::Pkcs7;
    } else if (padding == "none") {
        out.cfg.padding = fmxwb::PaddingMode::NoPad;
    } else {
        fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "unknown padding: " + padding);
    }
    out.cfg.checksum_enabled = j.value("checksum", false);
    out.cfg.version = j.value("version", std::uint32_t{1});
    return out;
}

} // namespace

extern "C" {

const char* fmxwb_last_error(void) {
    return g_last_error.c_str();
}

void fmxwb_free(void* ptr) {
    std::free(ptr);
}

int fmxwb_fmx_detect(const uint8_t* data, size_t len) {
    if (!data) {
        return 0;
    }
    return fmxwb::detect(fmxwb::ByteView(data, len)) ? 1 : 0;
}

fmxwb_status fmxwb_fmx_inspect(const uint8_t* data, size_t len, const char* profile,
                               char** out_json) {
    if (!data || !out_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "inspect needs data and an output pointer");
    }
    return guarded([&] {
        std::string prof = profile ? profile : "main";
        fmxwb::HeaderProfile hp;
        if (prof == "main") {
            hp = fmxwb::HeaderProfile::MainText;
        } else if (prof == "checksum") {
            hp = fmxwb::HeaderProfile::AppendixChecksum;
        } else {
            fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "unknown profile: " + prof);
        }
        fmxwb::ByteView view(data, len);
        fmxwb::FmxContainer container = fmxwb::unwrap(view, hp);
        json j;
        j["version"] = container.header.version;
        j["payload_bytes"] = container.payload.size();
        j["total_bytes"] = len;
        if (hp == fmxwb::HeaderProfile::MainText) {
            j["size_field"] = container.header.size_field;
            j["seed_material"] = container.header.seed_material();
        } else {
            j["flags"] = container.header.flags();
            j["checksum_enabled"] = (container.header.flags() & 1u) != 0;
            j["original_size"] = container.header.original_size();
            auto sum = container.header.checksum();
            j["checksum_hex"] = fmxwb::to_hex(fmxwb::ByteView(sum.data(), sum.size()));
        }
        *out_json = dup_string(j.dump());
    });
}

fmxwb_status fmxwb_fmx_wrap(const uint8_t* plaintext, size_t len, const char* options_json,
                            uint8_t** out, size_t* out_len) {
    if ((!plaintext && len) || !out || !out_len) {
        return fail(FMXWB_E_INVALID_CONFIG, "wrap needs plaintext and output pointers");
    }
    return guarded([&] {
        PipelineOptions opts = pipeline_options(parse_options(options_json, "wrap"));
        fmxwb::Bytes file =
            fmxwb::wrap(fmxwb::ByteView(plaintext, len), opts.identity, opts.cfg);
        *out = dup_bytes(file);
        *out_len = file.size();
    });
}

fmxwb_status fmxwb_fmx_load(const uint8_t* file, size_t len, const char* options_json,
                            uint8_t** out, size_t* out_len) {
    if (!file || !out || !out_len) {
        return fail(FMXWB_E_INVALID_CONFIG, "load needs a file and output pointers");
    }
    return guarded([&] {
        PipelineOptions opts = pipeline_options(parse_options(options_json, "load"));
        fmxwb::Bytes plain =
            fmxwb::load(fmxwb::ByteView(file, len), opts.identity, opts.cfg);
        *out = dup_bytes(plain);
        *out_len = plain.size();
    });
}

fmxwb_status fmxwb_fmx_dec2(const uint8_t* file, size_t len, const uint8_t* key,
                            size_t key_len, uint8_t** out, size_t* out_len) {
    if (!file || !key || !out || !out_len) {
        return fail(FMXWB_E_INVALID_CONFIG, "dec2 needs a file, key, and output pointers");
    }
    return guarded([&] {
        fmxwb::Bytes plain = fmxwb::layer2_only_decrypt(fmxwb::ByteView(file, len),
                                                        fmxwb::ByteView(key, key_len));
        *out = dup_bytes(plain);
        *out_len = plain.size();
    });
}

fmxwb_status fmxwb_crack(const uint8_t* file, size_t len, const char* options_json,
                         char** report_json) {
    if (!file || !report_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "crack needs a file and an output pointer");
    }
    return guarded([&] {
        json j = parse_options(options_json, "crack");
        if (!j.contains("identity")) {
            fmxwb::raise(fmxwb::ErrorCode::InvalidConfig, "crack options need identity");
        }
        fmxwb::DeviceIdentity id = identity_from_json(j["identity"]);
        fmxwb::FamilyParams params;
        params.suffix_max_len = j.value("suffix_max_len", 2);
        unsigned workers = j.value("workers", 1u);
        if (workers == 0) {
            workers = 1;
        }
        fmxwb::AttackPlan plan = fmxwb::default_plan(workers, params);
        if (j.contains("pattern_budget")) {
            plan.phases[0].budget = j["pattern_budget"].get<std::uint64_t>();
        }
        if (!j.value("suffix_phase", true)) {
            plan.phases.resize(1);
        } else if (j.contains("suffix_budget")) {
            plan.phases[1].budget = j["suffix_budget"].get<std::uint64_t>();
        }
        fmxwb::SearchReport report =
            fmxwb::run_attack(fmxwb::ByteView(file, len), id, plan);
        *report_json = dup_string(report.to_json());
    });
}

struct fmxwb_orch {
    fmxwb::Orchestrator* orch;
};

fmxwb_status fmxwb_orch_create(const char* config_json, const char* scenario_json,
                               fmxwb_orch** out) {
    if (!config_json || !out) {
        return fail(FMXWB_E_INVALID_CONFIG, "orch_create needs config JSON and an output pointer");
    }
    return guarded([&] {
        fmxwb::ByteView view(reinterpret_cast<const uint8_t*>(config_json),
                             std::strlen(config_json));
        fmxwb::MasterConfig cfg = fmxwb::load_config(view);
        fmxwb::Scenario scenario =
            fmxwb::Scenario::from_json(scenario_json ? scenario_json : "");
        *out = new fmxwb_orch{new fmxwb::Orchestrator(std::move(cfg), std::move(scenario))};
    });
}

fmxwb_status fmxwb_orch_create_wrapped(const uint8_t* config, size_t len,
                                       const char* pipeline_options_json,
                                       const char* scenario_json, fmxwb_orch** out) {
    if (!config || !out) {
        return fail(FMXWB_E_INVALID_CONFIG, "orch_create_wrapped needs config bytes and an output pointer");
    }
    return guarded([&] {
        PipelineOptions opts =
            pipeline_options(parse_options(pipeline_options_json, "orch_create_wrapped"));
        fmxwb::MasterConfig cfg = fmxwb::load_config(
            fmxwb::ByteView(config, len), std::make_pair(opts.cfg, opts.identity));
        fmxwb::Scenario scenario =
            fmxwb::Scenario::from_json(scenario_json ? scenario_json : "");
        *out = new fmxwb_orch{new fmxwb::Orchestrator(std::move(cfg), std::move(scenario))};
    });
}

void fmxwb_orch_destroy(fmxwb_orch* orch) {
    if (orch) {
        delete orch->orch;
        delete orch;
    }
}

fmxwb_status fmxwb_orch_run_startup(fmxwb_orch* orch) {
    if (!orch) {
        return fail(FMXWB_E_INVALID_CONFIG, "null orchestrator");
    }
    return guarded([&] { orch->orch->run_startup(); });
}

fmxwb_status fmxwb_orch_advance(fmxwb_orch* orch, int64_t micros) {
    if (!orch) {
        return fail(FMXWB_E_INVALID_CONFIG, "null orchestrator");
    }
    if (micros < 0) {
        return fail(FMXWB_E_INVALID_RANGE, "cannot advance backwards");
    }
    return guarded([&] { orch->orch->advance(micros); });
}

int64_t fmxwb_orch_now(const fmxwb_orch* orch) {
    return orch ? orch->orch->now_us() : -1;
}

fmxwb_status fmxwb_orch_rpc(fmxwb_orch* orch, const char* request_json,
                            char** response_json) {
    if (!orch || !request_json || !response_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "orch_rpc needs a request and an output pointer");
    }
    return guarded([&] { *response_json = dup_string(orch->orch->rpc(request_json)); });
}

fmxwb_status fmxwb_orch_drain_events(fmxwb_orch* orch, char** jsonl) {
    if (!orch || !jsonl) {
        return fail(FMXWB_E_INVALID_CONFIG, "drain_events needs an output pointer");
    }
    return guarded([&] { *jsonl = dup_string(orch->orch->drain_events_jsonl()); });
}

fmxwb_status fmxwb_orch_serve(fmxwb_orch* orch, const char* socket_path,
                              double serve_seconds, double time_scale,
                              int exit_on_disconnect) {
    if (!orch || !socket_path) {
        return fail(FMXWB_E_INVALID_CONFIG, "serve needs an orchestrator and a socket path");
    }
    return guarded([&] {
        fmxwb::RpcServeOptions opts;
        opts.serve_seconds = serve_seconds;
        opts.time_scale = time_scale;
        opts.exit_on_disconnect = exit_on_disconnect != 0;
        fmxwb::rpc_serve(*orch->orch, socket_path, opts);
    });
}

fmxwb_status fmxwb_rpc_send(const char* socket_path, const char* request_json,
                            char** response_json) {
    if (!socket_path || !request_json || !response_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "rpc_send needs a socket, request, and output pointer");
    }
    return guarded(
        [&] { *response_json = dup_string(fmxwb::rpc_send(socket_path, request_json)); });
}

fmxwb_status fmxwb_telemetry_parse(const char* report_json, char** normalized_json) {
    if (!report_json || !normalized_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "telemetry_parse needs a report and an output pointer");
    }
    return guarded([&] {
        fmxwb::ReportState state = fmxwb::parse_report(report_json);
        if (state.msg_id.empty() ||
            state.msg_id.find_first_not_of("0123456789") != std::string::npos) {
            fmxwb::raise(fmxwb::ErrorCode::SchemaError,
                         "msgId must be a decimal microsecond timestamp");
        }
        std::int64_t clock_us = std::stoll(state.msg_id);
        *normalized_json = dup_string(fmxwb::synthesize_report(state, clock_us));
    });
}

fmxwb_status fmxwb_telemetry_synth(const char* snapshot_json, int64_t clock_us,
                                   char** report_json) {
    if (!snapshot_json || !report_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "telemetry_synth needs a snapshot and an output pointer");
    }
    return guarded([&] {
        json j = json::parse(snapshot_json, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            fmxwb::raise(fmxwb::ErrorCode::ParseError, "snapshot must be a JSON object");
        }
        j["cmd"] = "reportState";
        if (!j.contains("msgId")) {
            j["msgId"] = "0";
        }
        fmxwb::ReportState state = fmxwb::parse_report(j.dump());
        *report_json = dup_string(fmxwb::synthesize_report(state, clock_us));
    });
}

fmxwb_status fmxwb_telemetry_analyze(const char* capture_jsonl, const char* allowlist_json,
                                     char** report_json) {
    if (!capture_jsonl || !report_json) {
        return fail(FMXWB_E_INVALID_CONFIG, "telemetry_analyze needs a capture and an output pointer");
    }
    return guarded([&] {
        std::vector<std::string> allowlist;
        if (allowlist_json && *allowlist_json) {
            json j = json::parse(allowlist_json, nullptr, false);
            if (j.is_discarded() || !j.is_array()) {
                fmxwb::raise(fmxwb::ErrorCode::ParseError,
                             "allowlist must be a JSON array");
            }
            for (const auto& e : j) {
                allowlist.push_back(e.get<std::string>());
            }
        }
        auto records = fmxwb::parse_capture_jsonl(capture_jsonl);
        fmxwb::RateReport report = fmxwb::analyze_capture(records, allowlist);
        *report_json = dup_string(report.to_json());
    });
}

fmxwb_status fmxwb_telemetry_rules(const char* report_json, const char* policy_json,
                                   char** rules_text) {
    if (!report_json || !rules_text) {
        return fail(FMXWB_E_INVALID_CONFIG, "telemetry_rules needs a report and an output pointer");
    }
    return guarded([&] {
        fmxwb::RateReport report = fmxwb::RateReport::from_json(report_json);
        std::vector<std::string> policy;
        if (policy_json && *policy_json) {
            json j = json::parse(policy_json, nullptr, false);
            if (j.is_discarded() || !j.is_array()) {
                fmxwb::raise(fmxwb::ErrorCode::ParseError, "policy must be a JSON array");
            }
            for (const auto& e : j) {
                policy.push_back(e.get<std::string>());
            }
        }
        *rules_text = dup_string(fmxwb::emit_block_rules(report, policy));
    });
}

} // extern "C"
