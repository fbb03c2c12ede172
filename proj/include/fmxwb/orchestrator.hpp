#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fmxwb/bytes.hpp"
#include "fmxwb/lcg_stream.hpp"
#include "fmxwb/mixer_pipeline.hpp"

namespace fmxwb {

enum class ServiceMode { Prio, Init, Once, Forbid, Manual, Normal };
enum class ServiceState { Stopped, Starting, Running, Stopping, Failed };

const char* service_mode_name(ServiceMode m);
const char* service_state_name(ServiceState s);
ServiceMode service_mode_from_string(const std::string& s);

// The lifecycle graph. Every transition the simulator records must be legal
// under this predicate; tests fuzz against it.
bool legal_transition(ServiceState from, ServiceState to);

struct ServiceSpec {
    std::string name;
    std::string path;
    ServiceMode mode = ServiceMode::Normal;
    bool enabled = true;
    bool restart_on_failure = false;
    int restart_max_attempts = 3;
    int priority = 0;
};

struct CommandSpec {
    std::string name;
    std::string command;
    ServiceMode mode = ServiceMode::Once; // init or once
    int priority = 0;
    std::int64_t timeout_ms = 30000;
};

struct Protection {
    std::string guardian;
    std::vector<std::string> protected_services;
    std::int64_t min_uptime_s = 0;
};

struct StartupBatch {
    enum class Kind { Command, Service };
    Kind kind = Kind::Service;
    std::vector<std::string> items;
};

struct MasterConfig {
    std::vector<ServiceSpec> services;
    std::vector<CommandSpec> commands;
    std::map<std::string, std::vector<std::string>> groups;
    std::vector<Protection> protections;
    std::vector<StartupBatch> startup_sequence;
    std::int64_t monitor_interval_ms = 5000;
    std::int64_t protection_restart_cap = 30;
    std::string socket_path;

    const ServiceSpec* find_service(const std::string& name) const;
    const CommandSpec* find_command(const std::string& name) const;
};

// Parses the master-service JSON schema. When crypto is supplied and the
// bytes carry the FMX magic, the container is decrypted first; plain JSON
// passes through unchanged either way.
MasterConfig load_config(ByteView bytes,
                         const std::optional<std::pair<PipelineConfig, DeviceIdentity>>& crypto = {});

struct StartupPlan {
    std::vector<StartupBatch> batches;
    std::vector<std::string> warnings; // filtered FORBID / MANUAL entries
};

// Batches as configured with FORBID and MANUAL services filtered out, plus a
// final catch-up batch starting any enabled auto service the sequence left
// out. Throws Error(UnknownName) when the sequence references a missing spec.
StartupPlan plan_startup(const MasterConfig& cfg);

// Scripted child behavior for the simulated executor.
struct ServiceScript {
    int spawn_fails = 0;             // first N start attempts -> Failed
    std::int64_t start_latency_ms = 10;
    std::int64_t dies_after_ms = -1; // -1: runs forever
    bool repeat = true;              // apply dies_after on every (re)start
};

struct CommandScript {
    int exit_code = 0;
    std::int64_t duration_ms = 10;
};

struct Scenario {
    std::map<std::string, ServiceScript> services;
    std::map<std::string, CommandScript> commands;

    static Scenario from_json(std::string_view json);
    ServiceScript service_script(const std::string& name) const;
    CommandScript command_script(const std::string& name) const;
};

struct Event {
    std::int64_t t_us = 0;
    std::string subject;
    std::string kind;   // transition | command | monitor | rpc | warning
    std::string from;   // transitions only
    std::string to;     // transitions only
    std::string detail;

    std::string to_json() const;
};

// Discrete-event simulation of the master service on a logical microsecond
// clock. Single-threaded: RPC calls are applied between events.
class Orchestrator {
public:
    Orchestrator(MasterConfig cfg, Scenario scenario);
    ~Orchestrator();
    Orchestrator(const Orchestrator&) = delete;
    Orchestrator& operator=(const Orchestrator&) = delete;

    // Executes the startup plan: batches run sequentially, each barriering on
    // command completion and on services leaving Starting. Also arms the
    // periodic monitor.
    void run_startup();

    // Processes all simulated events scheduled within the next `micros`.
    void advance(std::int64_t micros);

    // One JSON request in, one JSON response out (newline-free).
    std::string rpc(const std::string& request_json);

    std::int64_t now_us() const;
    ServiceState state_of(const std::string& name) const; // Error(UnknownService)
    const MasterConfig& config() const;

    const std::vector<Event>& events() const;
    std::string drain_events_jsonl();

private:
    struct Impl;
    Impl* impl_;
};

struct RpcServeOptions {
    double serve_seconds = 0;      // wall-clock; 0 = until disconnect/stop
    double time_scale = 0;         // simulated seconds per wall second; 0 = frozen clock
    bool exit_on_disconnect = false;
};

// Serves newline-delimited JSON RPC on a unix stream socket, advancing the
// simulated clock by wall time x time_scale between requests.
void rpc_serve(Orchestrator& orch, const std::string& socket_path, const RpcServeOptions& opts);

// One-shot client: connect, send one request line, return the response line.
std::string rpc_send(const std::string& socket_path, const std::string& request_json);

} // namespace fmxwb
