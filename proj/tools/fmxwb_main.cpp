// Command-line front end. Talks to the core exclusively through the C API in
// fmxwb.h; JSON results go to stdout, diagnostics to stderr.
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fmxwb.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::vector<uint8_t> data((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    return data;
}

std::string read_text(const std::string& path) {
    auto data = read_file(path);
    return std::string(data.begin(), data.end());
}

void write_file(const std::string& path, const uint8_t* data, size_t len) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path);
    }
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
}

[[noreturn]] void die(const std::string& message, int code = 1) {
    std::cerr << "fmxwb: " << message << "\n";
    std::exit(code);
}

void check(fmxwb_status status) {
    if (status != FMXWB_OK) {
        die(fmxwb_last_error());
    }
}

// Owned C string from the library, freed on scope exit.
struct CStr {
    char* ptr = nullptr;
    ~CStr() { fmxwb_free(ptr); }
    std::string str() const { return ptr ? ptr : ""; }
};

struct CBuf {
    uint8_t* ptr = nullptr;
    size_t len = 0;
    ~CBuf() { fmxwb_free(ptr); }
};

struct IdentityFlags {
    std::string device_code;
    std::string rf_code;
    std::string bluetooth;
    std::string machine_type;
    std::int64_t firmware_version = 0;

    json to_json() const {
        return json{{"device_code", device_code},
                    {"rf_code", rf_code},
                    {"bluetooth", bluetooth},
                    {"machine_type", machine_type},
                    {"firmware_version", firmware_version}};
    }
};

struct PipelineFlags {
    std::string key;
    std::string key_hex;
    std::int64_t seed = -1;
    IdentityFlags identity;
    std::string transform = "identity";
    std::string profile = "main";
    std::string padding = "zero";
    bool checksum = false;
    std::uint32_t version = 1;

    void attach(CLI::App* app) {
        app->add_option("--key", key, "Cipher key as text (4..56 bytes)");
        app->add_option("--key-hex", key_hex, "Cipher key as hex digits");
        app->add_option("--seed", seed, "Explicit stream seed (u32)");
        app->add_option("--device-code", identity.device_code, "Identity: device code");
        app->add_option("--rf-code", identity.rf_code, "Identity: RF code");
        app->add_option("--bluetooth", identity.bluetooth, "Identity: bluetooth id");
        app->add_option("--machine-type", identity.machine_type, "Identity: machine type");
        app->add_option("--firmware-version", identity.firmware_version,
                        "Identity: firmware version (integer)");
        app->add_option("--transform", transform, "Stream transform: identity|index")
            ->check(CLI::IsMember({"identity", "index"}));
        app->add_option("--profile", profile, "Header profile: main|checksum")
            ->check(CLI::IsMember({"main", "checksum"}));
        app->add_option("--padding", padding, "Block padding: zero|pkcs7|none")
            ->check(CLI::IsMember({"zero", "pkcs7", "none"}));
        app->add_flag("--checksum", checksum, "Record and verify an MD5 checksum");
        app->add_option("--version", version, "Header version field");
    }

    std::string options_json() const {
        json j;
        if (!key_hex.empty()) {
            j["key_hex"] = key_hex;
        } else if (!key.empty()) {
            std::ostringstream hex;
            for (unsigned char c : key) {
                char buf[3];
                std::snprintf(buf, sizeof(buf), "%02x", c);
                hex << buf;
            }
            j["key_hex"] = hex.str();
        } else {
            die("need --key or --key-hex");
        }
        if (seed >= 0) {
            j["seed"] = static_cast<std::uint32_t>(seed);
        } else if (!identity.device_code.empty()) {
            j["identity"] = identity.to_json();
        } else {
            die("need --seed or --device-code (plus identity flags)");
        }
        j["transform"] = transform;
        j["profile"] = profile;
        j["padding"] = padding;
        j["checksum"] = checksum;
        j["version"] = version;
        return j.dump();
    }
};

int cmd_inspect(const std::string& path, const std::string& profile) {
    auto data = read_file(path);
    if (!fmxwb_fmx_detect(data.data(), data.size())) {
        die(path + " does not carry the FMX magic");
    }
    CStr out;
    check(fmxwb_fmx_inspect(data.data(), data.size(), profile.c_str(), &out.ptr));
    std::cout << out.str() << "\n";
    return 0;
}

int cmd_wrap(const std::string& in, const std::string& out_path, const PipelineFlags& flags) {
    auto plain = read_file(in);
    CBuf out;
    check(fmxwb_fmx_wrap(plain.data(), plain.size(), flags.options_json().c_str(),
                         &out.ptr, &out.len));
    write_file(out_path, out.ptr, out.len);
    std::cerr << "fmxwb: wrapped " << plain.size() << " bytes into " << out.len
              << " (" << out_path << ")\n";
    return 0;
}

int cmd_unwrap(const std::string& in, const std::string& out_path,
               const PipelineFlags& flags) {
    auto file = read_file(in);
    CBuf out;
    check(fmxwb_fmx_load(file.data(), file.size(), flags.options_json().c_str(),
                         &out.ptr, &out.len));
    write_file(out_path, out.ptr, out.len);
    std::cerr << "fmxwb: recovered " << out.len << " bytes (" << out_path << ")\n";
    return 0;
}

int cmd_dec2(const std::vector<std::string>& paths, const std::string& key_text,
             const std::string& key_hex, const std::string& out_dir) {
    std::vector<uint8_t> key;
    if (!key_hex.empty()) {
        if (key_hex.size() % 2 != 0) {
            die("--key-hex needs an even number of digits");
        }
        for (size_t i = 0; i < key_hex.size(); i += 2) {
            try {
                key.push_back(
                    static_cast<uint8_t>(std::stoi(key_hex.substr(i, 2), nullptr, 16)));
            } catch (const std::exception&) {
                die("--key-hex holds a non-hex digit");
            }
        }
    } else if (!key_text.empty()) {
        key.assign(key_text.begin(), key_text.end());
    } else {
        die("need --key or --key-hex");
    }
    int processed = 0;
    for (const auto& path : paths) {
        std::vector<uint8_t> data;
        try {
            data = read_file(path);
        } catch (const std::exception& e) {
            std::cerr << "fmxwb: skipping " << path << ": " << e.what() << "\n";
            continue;
        }
        if (!fmxwb_fmx_detect(data.data(), data.size())) {
            std::cerr << "fmxwb: skipping " << path << ": no FMX magic\n";
            continue;
        }
        CBuf out;
        fmxwb_status rc = fmxwb_fmx_dec2(data.data(), data.size(), key.data(), key.size(),
                                         &out.ptr, &out.len);
        if (rc != FMXWB_OK) {
            std::cerr << "fmxwb: skipping " << path << ": " << fmxwb_last_error() << "\n";
            continue;
        }
        fs::path target = out_dir.empty() ? fs::path(path) : fs::path(out_dir) / fs::path(path).filename();
        target += ".dec2";
        write_file(target.string(), out.ptr, out.len);
        std::cerr << "fmxwb: " << path << " -> " << target.string() << "\n";
        ++processed;
    }
    return processed > 0 ? 0 : 1;
}

int cmd_crack(const std::string& path, const IdentityFlags& identity, unsigned workers,
              int suffix_max_len, std::uint64_t pattern_budget, std::uint64_t suffix_budget,
              bool no_suffix_phase) {
    if (identity.device_code.empty()) {
        die("crack needs --device-code (and the related identity flags)");
    }
    auto data = read_file(path);
    json opts;
    opts["identity"] = identity.to_json();
    opts["workers"] = workers;
    opts["suffix_max_len"] = suffix_max_len;
    if (pattern_budget) {
        opts["pattern_budget"] = pattern_budget;
    }
    if (suffix_budget) {
        opts["suffix_budget"] = suffix_budget;
    }
    opts["suffix_phase"] = !no_suffix_phase;
    CStr report;
    check(fmxwb_crack(data.data(), data.size(), opts.dump().c_str(), &report.ptr));
    std::cout << report.str() << "\n";
    json parsed = json::parse(report.str());
    return parsed.value("outcome", "") == "found" ? 0 : 2;
}

struct OrchArgs {
    std::string config_path;
    std::string scenario_path;
    PipelineFlags pipeline;
    bool wrapped = false;
    bool no_startup = false;
};

fmxwb_orch* make_orch(const OrchArgs& args) {
    std::string scenario = args.scenario_path.empty() ? "" : read_text(args.scenario_path);
    fmxwb_orch* orch = nullptr;
    if (args.wrapped) {
        auto data = read_file(args.config_path);
        check(fmxwb_orch_create_wrapped(data.data(), data.size(),
                                        args.pipeline.options_json().c_str(),
                                        scenario.empty() ? nullptr : scenario.c_str(),
                                        &orch));
    } else {
        std::string config = read_text(args.config_path);
        check(fmxwb_orch_create(config.c_str(),
                                scenario.empty() ? nullptr : scenario.c_str(), &orch));
    }
    return orch;
}

int cmd_orch_run(const OrchArgs& args, double duration_s, bool summary) {
    fmxwb_orch* orch = make_orch(args);
    if (!args.no_startup) {
        check(fmxwb_orch_run_startup(orch));
    }
    if (duration_s > 0) {
        check(fmxwb_orch_advance(orch, static_cast<int64_t>(duration_s * 1e6)));
    }
    CStr events;
    check(fmxwb_orch_drain_events(orch, &events.ptr));
    std::cout << events.str();
    if (summary) {
        CStr response;
        check(fmxwb_orch_rpc(orch, R"({"handler":"ListServiceState"})", &response.ptr));
        std::cout << response.str() << "\n";
    }
    fmxwb_orch_destroy(orch);
    return 0;
}

int cmd_orch_serve(const OrchArgs& args, const std::string& socket_path,
                   double serve_seconds, double time_scale, bool exit_on_disconnect) {
    fmxwb_orch* orch = make_orch(args);
    if (!args.no_startup) {
        check(fmxwb_orch_run_startup(orch));
    }
    std::cerr << "fmxwb: serving on " << socket_path << "\n";
    fmxwb_status rc = fmxwb_orch_serve(orch, socket_path.c_str(), serve_seconds,
                                       time_scale, exit_on_disconnect ? 1 : 0);
    fmxwb_orch_destroy(orch);
    if (rc != FMXWB_OK) {
        die(fmxwb_last_error());
    }
    return 0;
}

int cmd_orch_send(const std::string& socket_path, const std::string& request) {
    CStr response;
    check(fmxwb_rpc_send(socket_path.c_str(), request.c_str(), &response.ptr));
    std::cout << response.str() << "\n";
    return 0;
}

int cmd_telemetry_analyze(const std::string& capture_path,
                          const std::vector<std::string>& allow,
                          bool rules, const std::vector<std::string>& policy) {
    std::string capture = read_text(capture_path);
    json allow_json = allow;
    CStr report;
    check(fmxwb_telemetry_analyze(capture.c_str(), allow_json.dump().c_str(), &report.ptr));
    if (!rules) {
        std::cout << report.str() << "\n";
        return 0;
    }
    json policy_json = policy;
    CStr text;
    check(fmxwb_telemetry_rules(report.ptr, policy_json.dump().c_str(), &text.ptr));
    std::cout << text.str();
    return 0;
}

int cmd_telemetry_synth(const std::string& snapshot_path, std::int64_t clock_us) {
    std::string snapshot = read_text(snapshot_path);
    CStr report;
    check(fmxwb_telemetry_synth(snapshot.c_str(), clock_us, &report.ptr));
    std::cout << report.str() << "\n";
    return 0;
}

int cmd_telemetry_parse(const std::string& report_path) {
    std::string text = read_text(report_path);
    CStr normalized;
    check(fmxwb_telemetry_parse(text.c_str(), &normalized.ptr));
    std::cout << normalized.str() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"FMX workbench: container tooling, key search, orchestration, telemetry"};
    app.require_subcommand(1);

    // fmx ------------------------------------------------------------------
    CLI::App* fmx = app.add_subcommand("fmx", "Container and cipher operations");
    fmx->require_subcommand(1);

    auto* inspect = fmx->add_subcommand("inspect", "Print header fields as JSON");
    std::string inspect_path;
    std::string inspect_profile = "main";
    inspect->add_option("file", inspect_path, "FMX file")->required();
    inspect->add_option("--profile", inspect_profile, "Header profile: main|checksum")
        ->check(CLI::IsMember({"main", "checksum"}));

    auto* wrap = fmx->add_subcommand("wrap", "Encrypt a plaintext into a container");
    std::string wrap_in, wrap_out;
    PipelineFlags wrap_flags;
    wrap->add_option("input", wrap_in, "Plaintext file")->required();
    wrap->add_option("output", wrap_out, "Container file to write")->required();
    wrap_flags.attach(wrap);

    auto* unwrap = fmx->add_subcommand("unwrap", "Decrypt a container back to plaintext");
    std::string unwrap_in, unwrap_out;
    PipelineFlags unwrap_flags;
    unwrap->add_option("input", unwrap_in, "Container file")->required();
    unwrap->add_option("output", unwrap_out, "Plaintext file to write")->required();
    unwrap_flags.attach(unwrap);

    auto* dec2 = fmx->add_subcommand("dec2", "Outer-layer decrypt (leaves the byte stream mixed)");
    std::vector<std::string> dec2_paths;
    std::string dec2_key, dec2_key_hex, dec2_out_dir;
    dec2->add_option("files", dec2_paths, "FMX files")->required();
    dec2->add_option("--key", dec2_key, "Cipher key as text");
    dec2->add_option("--key-hex", dec2_key_hex, "Cipher key as hex digits");
    dec2->add_option("--out-dir", dec2_out_dir, "Directory for .dec2 outputs");

    auto* crack = fmx->add_subcommand("crack", "Key search against a captured container");
    std::string crack_path;
    IdentityFlags crack_identity;
    unsigned crack_workers = 1;
    int crack_suffix_len = 2;
    std::uint64_t crack_pattern_budget = 0, crack_suffix_budget = 0;
    bool crack_no_suffix = false;
    crack->add_option("file", crack_path, "FMX file")->required();
    crack->add_option("--device-code", crack_identity.device_code, "Identity: device code");
    crack->add_option("--rf-code", crack_identity.rf_code, "Identity: RF code");
    crack->add_option("--bluetooth", crack_identity.bluetooth, "Identity: bluetooth id");
    crack->add_option("--machine-type", crack_identity.machine_type, "Identity: machine type");
    crack->add_option("--firmware-version", crack_identity.firmware_version,
                      "Identity: firmware version");
    crack->add_option("--workers", crack_workers, "Worker threads");
    crack->add_option("--suffix-max-len", crack_suffix_len, "Suffix search depth (1..6)");
    crack->add_option("--pattern-budget", crack_pattern_budget,
                      "Candidate cap for the pattern phase (0 = unlimited)");
    crack->add_option("--suffix-budget", crack_suffix_budget,
                      "Candidate cap for the suffix phase (0 = unlimited)");
    crack->add_flag("--no-suffix-phase", crack_no_suffix, "Stop after the pattern families");

    // orchestrate ------------------------------------------------------------
    CLI::App* orch = app.add_subcommand("orchestrate", "Master-service simulation");
    orch->require_subcommand(1);

    auto* orun = orch->add_subcommand("run", "Run startup plus a simulated interval");
    OrchArgs orun_args;
    double orun_duration = 0;
    bool orun_summary = false;
    orun->add_option("--config", orun_args.config_path, "Master config JSON (or FMX-wrapped)")
        ->required();
    orun->add_option("--scenario", orun_args.scenario_path, "Scenario script JSON");
    orun->add_flag("--wrapped", orun_args.wrapped, "Config file is FMX-wrapped");
    orun->add_flag("--no-startup", orun_args.no_startup, "Skip the startup sequence");
    orun->add_option("--duration-s", orun_duration, "Simulated seconds to advance");
    orun->add_flag("--summary", orun_summary, "Append a ListServiceState response");
    orun_args.pipeline.attach(orun);

    auto* orpc = orch->add_subcommand("rpc", "Serve or query the control socket");
    OrchArgs orpc_args;
    std::string orpc_socket;
    std::string orpc_send;
    double orpc_serve_seconds = 0;
    double orpc_time_scale = 1.0;
    bool orpc_exit_on_disconnect = false;
    orpc->add_option("--socket", orpc_socket, "Unix socket path")->required();
    orpc->add_option("--send", orpc_send, "Send one request line and print the response");
    orpc->add_option("--config", orpc_args.config_path, "Master config JSON (server mode)");
    orpc->add_option("--scenario", orpc_args.scenario_path, "Scenario script JSON");
    orpc->add_flag("--wrapped", orpc_args.wrapped, "Config file is FMX-wrapped");
    orpc->add_flag("--no-startup", orpc_args.no_startup, "Skip the startup sequence");
    orpc->add_option("--serve-seconds", orpc_serve_seconds, "Stop serving after this long (0 = no deadline)");
    orpc->add_option("--time-scale", orpc_time_scale, "Simulated seconds per wall second");
    orpc->add_flag("--exit-on-disconnect", orpc_exit_on_disconnect,
                   "Stop after the first client disconnects");
    orpc_args.pipeline.attach(orpc);

    // telemetry --------------------------------------------------------------
    CLI::App* tel = app.add_subcommand("telemetry", "Report tooling and traffic analysis");
    tel->require_subcommand(1);

    auto* analyze = tel->add_subcommand("analyze", "Per-endpoint rates from a JSONL capture");
    std::string analyze_capture;
    std::vector<std::string> analyze_allow;
    std::vector<std::string> analyze_policy;
    bool analyze_rules = false;
    analyze->add_option("--capture", analyze_capture, "Capture JSONL file")->required();
    analyze->add_option("--allow", analyze_allow, "Allowlisted host or IPv4 CIDR (repeatable)");
    analyze->add_flag("--rules", analyze_rules, "Emit block rules instead of the report");
    analyze->add_option("--policy", analyze_policy, "Policy CIDR appended to the rules");

    auto* synth = tel->add_subcommand("synth", "Build a reportState document");
    std::string synth_snapshot;
    std::int64_t synth_clock = 0;
    synth->add_option("--snapshot", synth_snapshot, "Snapshot JSON file")->required();
    synth->add_option("--clock-us", synth_clock, "Microsecond timestamp for msgId")->required();

    auto* parse = tel->add_subcommand("parse", "Validate and normalize a reportState document");
    std::string parse_report;
    parse->add_option("--report", parse_report, "Report JSON file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (inspect->parsed()) return cmd_inspect(inspect_path, inspect_profile);
        if (wrap->parsed()) return cmd_wrap(wrap_in, wrap_out, wrap_flags);
        if (unwrap->parsed()) return cmd_unwrap(unwrap_in, unwrap_out, unwrap_flags);
        if (dec2->parsed()) return cmd_dec2(dec2_paths, dec2_key, dec2_key_hex, dec2_out_dir);
        if (crack->parsed()) {
            return cmd_crack(crack_path, crack_identity, crack_workers, crack_suffix_len,
                             crack_pattern_budget, crack_suffix_budget, crack_no_suffix);
        }
        if (orun->parsed()) return cmd_orch_run(orun_args, orun_duration, orun_summary);
        if (orpc->parsed()) {
            if (!orpc_send.empty()) {
                return cmd_orch_send(orpc_socket, orpc_send);
            }
            if (orpc_args.config_path.empty()) {
                die("rpc server mode needs --config (or pass --send to act as a client)");
            }
            return cmd_orch_serve(orpc_args, orpc_socket, orpc_serve_seconds,
                                  orpc_time_scale, orpc_exit_on_disconnect);
        }
        if (analyze->parsed()) {
            return cmd_telemetry_analyze(analyze_capture, analyze_allow, analyze_rules,
                                         analyze_policy);
        }
        if (synth->parsed()) return cmd_telemetry_synth(synth_snapshot, synth_clock);
        if (parse->parsed()) return cmd_telemetry_parse(parse_report);
    } catch (const std::exception& e) {
        die(e.what());
    }
    return 1;
}
