#include "fmxwb/orchestrator.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fmxwb/error.hpp"
#include "fmxwb/fmx_container.hpp"

namespace fmxwb {

using nlohmann::json;

const char* service_mode_name(ServiceMode m) {
    switch (m) {
    case ServiceMode::Prio: return "prio";
    case ServiceMode::Init: return "init";
    case ServiceMode::Once: return "once";
    case ServiceMode::Forbid: return "forbid";
    case ServiceMode::Manual: return "manual";
    case ServiceMode::Normal: return "normal";
    }
    return "unknown";
}

const char* service_state_name(ServiceState s) {
    switch (s) {
    case ServiceState::Stopped: return "stopped";
    case ServiceState::Starting: return "starting";
    case ServiceState::Running: return "running";
    case ServiceState::Stopping: return "stopping";
    case ServiceState::Failed: return "failed";
    }
    return "unknown";
}

ServiceMode service_mode_from_string(const std::string& s) {
    if (s == "prio") return ServiceMode::Prio;
    if (s == "init") return ServiceMode::Init;
    if (s == "once") return ServiceMode::Once;
    if (s == "forbid") return ServiceMode::Forbid;
    if (s == "manual") return ServiceMode::Manual;
    if (s == "normal") return ServiceMode::Normal;
    raise(ErrorCode::InvalidConfig, "unknown service mode: " + s);
}

bool legal_transition(ServiceState from, ServiceState to) {
    switch (from) {
    case ServiceState::Stopped:
        return to == ServiceState::Starting;
    case ServiceState::Starting:
        return to == ServiceState::Running || to == ServiceState::Failed ||
               to == ServiceState::Stopping;
    case ServiceState::Running:
        return to == ServiceState::Stopping || to == ServiceState::Failed;
    case ServiceState::Stopping:
        return to == ServiceState::Stopped;
    case ServiceState::Failed:
        return to == ServiceState::Starting;
    }
    return false;
}

const ServiceSpec* MasterConfig::find_service(const std::string& name) const {
    for (const auto& s : services) {
        if (s.name == name) return &s;
    }
    return nullptr;
}

const CommandSpec* MasterConfig::find_command(const std::string& name) const {
    for (const auto& c : commands) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

namespace {

json parse_json(std::string_view text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        raise(ErrorCode::ParseError, std::string("malformed JSON in ") + what);
    }
    return j;
}

} // namespace

MasterConfig load_config(ByteView bytes,
                         const std::optional<std::pair<PipelineConfig, DeviceIdentity>>& crypto) {
    Bytes plain;
    if (detect(bytes) && crypto) {
        plain = load(bytes, crypto->second, crypto->first);
        bytes = ByteView(plain);
    }
    json j = parse_json(std::string_view(reinterpret_cast<const char*>(bytes.data()),
                                         bytes.size()),
                        "master config");

    MasterConfig cfg;
    std::set<std::string> seen;
    for (const auto& js : j.value("services", json::array())) {
        ServiceSpec s;
        s.name = js.at("name").get<std::string>();
        if (!seen.insert(s.name).second) {
            raise(ErrorCode::InvalidConfig, "duplicate service name: " + s.name);
        }
        s.path = js.value("path", "");
        s.mode = service_mode_from_string(js.value("type", "normal"));
        s.enabled = js.value("enabled", true);
        s.restart_on_failure = js.value("restart_on_failure", false);
        s.restart_max_attempts = js.value("restart_max_attempts", 3);
        s.priority = js.value("priority", 0);
        cfg.services.push_back(std::move(s));
    }
    std::set<std::string> seen_cmds;
    for (const auto& jc : j.value("commands", json::array())) {
        CommandSpec c;
        c.name = jc.at("name").get<std::string>();
        if (!seen_cmds.insert(c.name).second) {
            raise(ErrorCode::InvalidConfig, "duplicate command name: " + c.name);
        }
        c.command = jc.value("command", "");
        c.mode = service_mode_from_string(jc.value("type", "once"));
        c.priority = jc.value("priority", 0);
        c.timeout_ms = jc.value("timeout", 30000);
        cfg.commands.push_back(std::move(c));
    }
    json groups = j.value("service_groups", json::object());
    for (const auto& [group, members] : groups.items()) {
        std::vector<std::string> names;
        for (const auto& m : members) {
            std::string name = m.get<std::string>();
            const ServiceSpec* s = cfg.find_service(name);
            const CommandSpec* c = cfg.find_command(name);
            if (!s && !c) {
                raise(ErrorCode::InvalidConfig,
                      "group " + group + " references unknown name " + name);
            }
            std::string mode = service_mode_name(s ? s->mode : c->mode);
            if (mode != group) {
                raise(ErrorCode::InvalidConfig,
                      "group " + group + " member " + name + " has mode " + mode);
            }
            names.push_back(std::move(name));
        }
        cfg.groups[group] = std::move(names);
    }
    for (const auto& jp : j.value("service_protections", json::array())) {
        Protection p;
        p.guardian = jp.at("service").get<std::string>();
        for (const auto& n : jp.value("protect_services", json::array())) {
            p.protected_services.push_back(n.get<std::string>());
        }
        p.min_uptime_s = jp.value("min_uptime", 0);
        cfg.protections.push_back(std::move(p));
    }
    for (const auto& jb : j.value("startup_sequence", json::array())) {
        StartupBatch b;
        std::string kind = jb.value("type", "service");
        b.kind = kind == "command" ? StartupBatch::Kind::Command : StartupBatch::Kind::Service;
        for (const auto& n : jb.value("items", json::array())) {
            b.items.push_back(n.get<std::string>());
        }
        cfg.startup_sequence.push_back(std::move(b));
    }
    if (j.contains("runtime")) {
        cfg.monitor_interval_ms = j["runtime"].value("monitor_interval", 5000);
    }
    cfg.protection_restart_cap = j.value("protection_restart_cap", 30);
    if (j.contains("rpc_interface")) {
        cfg.socket_path = j["rpc_interface"].value("socket_path", "");
    }
    return cfg;
}

StartupPlan plan_startup(const MasterConfig& cfg) {
    StartupPlan plan;
    std::set<std::string> sequenced;
    for (const auto& batch : cfg.startup_sequence) {
        StartupBatch filtered;
        filtered.kind = batch.kind;
        for (const auto& name : batch.items) {
            if (batch.kind == StartupBatch::Kind::Command) {
                if (!cfg.find_command(name)) {
                    raise(ErrorCode::UnknownName, "startup sequence names unknown command " + name);
                }
                filtered.items.push_back(name);
                continue;
            }
            const ServiceSpec* spec = cfg.find_service(name);
            if (!spec) {
                raise(ErrorCode::UnknownName, "startup sequence names unknown service " + name);
            }
            if (spec->mode == ServiceMode::Forbid) {
                plan.warnings.push_back("excluded forbidden service " + name);
                continue;
            }
            if (spec->mode == ServiceMode::Manual) {
                plan.warnings.push_back("excluded manual service " + name);
                continue;
            }
            sequenced.insert(name);
            filtered.items.push_back(name);
        }
        plan.batches.push_back(std::move(filtered));
    }
    StartupBatch catch_up;
    catch_up.kind = StartupBatch::Kind::Service;
    for (const auto& spec : cfg.services) {
        if (!spec.enabled || sequenced.count(spec.name)) {
            continue;
        }
        if (spec.mode == ServiceMode::Forbid || spec.mode == ServiceMode::Manual) {
            continue;
        }
        catch_up.items.push_back(spec.name);
    }
    if (!catch_up.items.empty()) {
        plan.batches.push_back(std::move(catch_up));
    }
    return plan;
}

Scenario Scenario::from_json(std::string_view text) {
    Scenario scn;
    if (text.empty()) {
        return scn;
    }
    json j = parse_json(text, "scenario");
    json services = j.value("services", json::object());
    for (const auto& [name, js] : services.items()) {
        ServiceScript s;
        s.spawn_fails = js.value("spawn_fails", 0);
        s.start_latency_ms = js.value("start_latency_ms", 10);
        s.dies_after_ms = js.value("dies_after_ms", -1);
        s.repeat = js.value("repeat", true);
        scn.services[name] = s;
    }
    json commands = j.value("commands", json::object());
    for (const auto& [name, jc] : commands.items()) {
        CommandScript c;
        c.exit_code = jc.value("exit_code", 0);
        c.duration_ms = jc.value("duration_ms", 10);
        scn.commands[name] = c;
    }
    return scn;
}

ServiceScript Scenario::service_script(const std::string& name) const {
    auto it = services.find(name);
    return it == services.end() ? ServiceScript{} : it->second;
}

CommandScript Scenario::command_script(const std::string& name) const {
    auto it = commands.find(name);
    return it == commands.end() ? CommandScript{} : it->second;
}

std::string Event::to_json() const {
    json j;
    j["t"] = t_us;
    j["subject"] = subject;
    j["kind"] = kind;
    if (!from.empty()) j["from"] = from;
    if (!to.empty()) j["to"] = to;
    if (!detail.empty()) j["detail"] = detail;
    return j.dump();
}

namespace {

struct ServiceRuntime {
    ServiceState state = ServiceState::Stopped;
    int pid = 0;
    int restart_count = 0;
    std::int64_t start_time_us = 0; // entered Running
    int spawn_attempts = 0;
    std::uint64_t generation = 0; // invalidates stale scheduled events
    bool removed = false;
    bool gave_up_logged = false;
};

enum class CommandState { NeverRun, Running, Done };

struct CommandRuntime {
    CommandState state = CommandState::NeverRun;
    int exit_code = -1;
    std::uint64_t generation = 0;
    bool removed = false;
};

} // namespace

struct Orchestrator::Impl {
    MasterConfig cfg;
    Scenario scenario;
    std::int64_t now_us = 0;
    std::uint64_t seq = 0;
    int next_pid = 1000;
    std::int64_t protection_restarts_used = 0;
    bool monitor_armed = false;
    std::vector<Event> log;
    std::size_t drained = 0;
    std::unordered_map<std::string, ServiceRuntime> services;
    std::unordered_map<std::string, CommandRuntime> commands;

    struct Scheduled {
        std::int64_t t_us;
        std::uint64_t seq;
        enum class Kind { ServiceUp, ServiceDeath, ServiceSpawnFail, CommandDone, MonitorTick } kind;
        std::string name;
        std::uint64_t generation;

        bool operator>(const Scheduled& o) const {
            return std::tie(t_us, seq) > std::tie(o.t_us, o.seq);
        }
    };
    std::priority_queue<Scheduled, std::vector<Scheduled>, std::greater<>> queue;

    explicit Impl(MasterConfig c, Scenario s) : cfg(std::move(c)), scenario(std::move(s)) {
        for (const auto& spec : cfg.services) {
            services[spec.name] = {};
        }
        for (const auto& spec : cfg.commands) {
            commands[spec.name] = {};
        }
    }

    void push(std::int64_t t_us, Scheduled::Kind kind, std::string name, std::uint64_t gen) {
        queue.push({t_us, seq++, kind, std::move(name), gen});
    }

    void emit(std::string subject, std::string kind, std::string detail = {},
              std::string from = {}, std::string to = {}) {
        log.push_back({now_us, std::move(subject), std::move(kind), std::move(from),
                       std::move(to), std::move(detail)});
    }

    void set_state(const std::string& name, ServiceRuntime& rt, ServiceState to,
                   const std::string& detail = {}) {
        if (!legal_transition(rt.state, to)) {
            raise(ErrorCode::Internal, "illegal transition for " + name + ": " +
                                           service_state_name(rt.state) + " -> " +
                                           service_state_name(to));
        }
        emit(name, "transition", detail, service_state_name(rt.state),
             service_state_name(to));
        rt.state = to;
    }

    const ServiceSpec& require_service(const std::string& name) {
        const ServiceSpec* spec = cfg.find_service(name);
        auto it = services.find(name);
        if (!spec || it == services.end() || it->second.removed) {
            raise(ErrorCode::UnknownService, "unknown service: " + name);
        }
        return *spec;
    }

    const CommandSpec& require_command(const std::string& name) {
        const CommandSpec* spec = cfg.find_command(name);
        auto it = commands.find(name);
        if (!spec || it == commands.end() || it->second.removed) {
            raise(ErrorCode::UnknownService, "unknown command: " + name);
        }
        return *spec;
    }

    void start_service(const std::string& name, const std::string& detail) {
        ServiceRuntime& rt = services.at(name);
        if (rt.state == ServiceState::Starting || rt.state == ServiceState::Running) {
            return;
        }
        if (rt.state == ServiceState::Stopping) {
            // the synchronous stop path never leaves a service here
            raise(ErrorCode::Internal, "start during stop of " + name);
        }
        ++rt.generation;
        rt.pid = next_pid++;
        rt.gave_up_logged = false;
        set_state(name, rt, ServiceState::Starting, detail);
        ServiceScript script = scenario.service_script(name);
        ++rt.spawn_attempts;
        bool fails = rt.spawn_attempts <= script.spawn_fails;
        push(now_us + script.start_latency_ms * 1000,
             fails ? Scheduled::Kind::ServiceSpawnFail : Scheduled::Kind::ServiceUp, name,
             rt.generation);
    }

    void stop_service(const std::string& name, const std::string& detail) {
        ServiceRuntime& rt = services.at(name);
        if (rt.state != ServiceState::Starting && rt.state != ServiceState::Running) {
            return;
        }
        ++rt.generation; // cancels pending up/death events
        set_state(name, rt, ServiceState::Stopping, detail);
        set_state(name, rt, ServiceState::Stopped);
        rt.pid = 0;
    }

    void execute_command(const std::string& name, const std::string& detail) {
        CommandRuntime& rt = commands.at(name);
        CommandScript script = scenario.command_script(name);
        ++rt.generation;
        rt.state = CommandState::Running;
        emit(name, "command", detail.empty() ? "started" : detail);
        push(now_us + script.duration_ms * 1000, Scheduled::Kind::CommandDone, name,
             rt.generation);
    }

    void arm_monitor() {
        if (!monitor_armed) {
            monitor_armed = true;
            push(now_us + cfg.monitor_interval_ms * 1000, Scheduled::Kind::MonitorTick, "", 0);
        }
    }

    void fire(const Scheduled& ev) {
        switch (ev.kind) {
        case Scheduled::Kind::ServiceUp: {
            ServiceRuntime& rt = services.at(ev.name);
            if (rt.generation != ev.generation || rt.state != ServiceState::Starting) {
                return;
            }
            set_state(ev.name, rt, ServiceState::Running);
            rt.start_time_us = now_us;
            ServiceScript script = scenario.service_script(ev.name);
            bool first_run = rt.spawn_attempts <= script.spawn_fails + 1;
            if (script.dies_after_ms >= 0 && (script.repeat || first_run)) {
                push(now_us + script.dies_after_ms * 1000, Scheduled::Kind::ServiceDeath,
                     ev.name, rt.generation);
            }
            return;
        }
        case Scheduled::Kind::ServiceSpawnFail: {
            ServiceRuntime& rt = services.at(ev.name);
            if (rt.generation != ev.generation || rt.state != ServiceState::Starting) {
                return;
            }
            set_state(ev.name, rt, ServiceState::Failed, "spawn failed");
            rt.pid = 0;
            return;
        }
        case Scheduled::Kind::ServiceDeath: {
            ServiceRuntime& rt = services.at(ev.name);
            if (rt.generation != ev.generation || rt.state != ServiceState::Running) {
                return;
            }
            set_state(ev.name, rt, ServiceState::Failed, "process died");
            rt.pid = 0;
            return;
        }
        case Scheduled::Kind::CommandDone: {
            CommandRuntime& rt = commands.at(ev.name);
            if (rt.generation != ev.generation || rt.state != CommandState::Running) {
                return;
            }
            CommandScript script = scenario.command_script(ev.name);
            rt.state = CommandState::Done;
            rt.exit_code = script.exit_code;
            emit(ev.name, "command", "exited code=" + std::to_string(script.exit_code));
            return;
        }
        case Scheduled::Kind::MonitorTick:
            monitor_tick();
            push(now_us + cfg.monitor_interval_ms * 1000, Scheduled::Kind::MonitorTick, "", 0);
            return;
        }
    }

    bool is_protected(const std::string& name) const {
        for (const auto& p : cfg.protections) {
            if (std::find(p.protected_services.begin(), p.protected_services.end(), name) !=
                p.protected_services.end()) {
                return true;
            }
        }
        return false;
    }

    // Returns the guardian name deferring the restart, or empty when clear.
    std::string protection_defers(const std::string& name) const {
        for (const auto& p : cfg.protections) {
            if (std::find(p.protected_services.begin(), p.protected_services.end(), name) ==
                p.protected_services.end()) {
                continue;
            }
            auto it = services.find(p.guardian);
            if (it == services.end() || it->second.removed) {
                continue;
            }
            const ServiceRuntime& guardian = it->second;
            if (guardian.state != ServiceState::Running ||
                now_us - guardian.start_time_us < p.min_uptime_s * 1000000) {
                return p.guardian;
            }
        }
        return {};
    }

    void monitor_tick() {
        for (const auto& spec : cfg.services) {
            ServiceRuntime& rt = services.at(spec.name);
            if (rt.removed || rt.state != ServiceState::Failed) {
                continue;
            }
            if (!spec.enabled || !spec.restart_on_failure) {
                continue;
            }
            if (rt.restart_count >= spec.restart_max_attempts) {
                if (!rt.gave_up_logged) {
                    rt.gave_up_logged = true;
                    emit(spec.name, "monitor",
                         "restart suppressed: max attempts (" +
                             std::to_string(spec.restart_max_attempts) + ") reached");
                }
                continue;
            }
            std::string guardian = protection_defers(spec.name);
            if (!guardian.empty()) {
                emit(spec.name, "monitor", "restart deferred: guardian " + guardian +
                                               " below min uptime");
                continue;
            }
            if (is_protected(spec.name)) {
                if (protection_restarts_used >= cfg.protection_restart_cap) {
                    emit(spec.name, "monitor",
                         "restart suppressed: protection restart cap (" +
                             std::to_string(cfg.protection_restart_cap) + ") exhausted");
                    continue;
                }
                ++protection_restarts_used;
            }
            ++rt.restart_count;
            emit(spec.name, "monitor",
                 "service died, restarting (attempt " + std::to_string(rt.restart_count) +
                     ")");
            start_service(spec.name, "monitor restart");
        }
    }

    void advance_to(std::int64_t deadline_us) {
        while (!queue.empty() && queue.top().t_us <= deadline_us) {
            Scheduled ev = queue.top();
            queue.pop();
            now_us = ev.t_us;
            fire(ev);
        }
        now_us = deadline_us;
    }

    // Runs the queue until the given services have left Starting and the
    // given commands have completed.
    void settle_batch(const std::vector<std::string>& service_names,
                      const std::vector<std::string>& command_names) {
        auto settled = [&]() {
            for (const auto& n : service_names) {
                if (services.at(n).state == ServiceState::Starting) {
                    return false;
                }
            }
            for (const auto& n : command_names) {
                if (commands.at(n).state == CommandState::Running) {
                    return false;
                }
            }
            return true;
        };
        while (!settled()) {
            if (queue.empty()) {
                raise(ErrorCode::Internal, "startup barrier cannot settle");
            }
            Scheduled ev = queue.top();
            queue.pop();
            now_us = ev.t_us;
            fire(ev);
        }
    }

    void run_startup() {
        StartupPlan plan = plan_startup(cfg);
        for (const auto& warning : plan.warnings) {
            emit("startup", "warning", warning);
        }
        for (const auto& batch : plan.batches) {
            std::vector<std::string> svc;
            std::vector<std::string> cmd;
            for (const auto& name : batch.items) {
                if (batch.kind == StartupBatch::Kind::Command) {
                    execute_command(name, "startup");
                    cmd.push_back(name);
                } else {
                    start_service(name, "startup");
                    svc.push_back(name);
                }
            }
            settle_batch(svc, cmd);
        }
        arm_monitor();
    }

    json service_state_json(const std::string& name) {
        const ServiceSpec& spec = require_service(name);
        const ServiceRuntime& rt = services.at(name);
        json j;
        j["name"] = name;
        j["state"] = service_state_name(rt.state);
        j["mode"] = service_mode_name(spec.mode);
        j["enabled"] = spec.enabled;
        j["pid"] = rt.pid;
        j["restart_count"] = rt.restart_count;
        if (rt.state == ServiceState::Running) {
            j["uptime_us"] = now_us - rt.start_time_us;
        }
        return j;
    }

    json command_state_json(const std::string& name) {
        require_command(name);
        const CommandRuntime& rt = commands.at(name);
        json j;
        j["name"] = name;
        switch (rt.state) {
        case CommandState::NeverRun: j["state"] = "never_run"; break;
        case CommandState::Running: j["state"] = "running"; break;
        case CommandState::Done: j["state"] = "done"; break;
        }
        j["exit_code"] = rt.exit_code;
        return j;
    }

    json dispatch(const std::string& handler, const json& args) {
        auto name_arg = [&]() {
            if (!args.contains("name") || !args["name"].is_string()) {
                raise(ErrorCode::ParseError, "handler requires a service name argument");
            }
            return args["name"].get<std::string>();
        };
        if (handler == "GetServiceState") {
            return service_state_json(name_arg());
        }
        if (handler == "ListServiceState") {
            json list = json::array();
            for (const auto& spec : cfg.services) {
                if (!services.at(spec.name).removed) {
                    list.push_back(service_state_json(spec.name));
                }
            }
            return json{{"services", list}};
        }
        if (handler == "StartService") {
            std::string name = name_arg();
            const ServiceSpec& spec = require_service(name);
            if (spec.mode == ServiceMode::Forbid) {
                raise(ErrorCode::ForbiddenService, name + " is forbidden");
            }
            services.at(name).restart_count = 0;
            start_service(name, "rpc StartService");
            return json{{"state", service_state_name(services.at(name).state)}};
        }
        if (handler == "StopService") {
            std::string name = name_arg();
            require_service(name);
            stop_service(name, "rpc StopService");
            return json{{"state", service_state_name(services.at(name).state)}};
        }
        if (handler == "RestartService" || handler == "ReloadService") {
            std::string name = name_arg();
            const ServiceSpec& spec = require_service(name);
            if (spec.mode == ServiceMode::Forbid) {
                raise(ErrorCode::ForbiddenService, name + " is forbidden");
            }
            const char* what = handler == "ReloadService" ? "rpc ReloadService"
                                                          : "rpc RestartService";
            stop_service(name, what);
            services.at(name).restart_count = 0;
            start_service(name, what);
            return json{{"state", service_state_name(services.at(name).state)}};
        }
        if (handler == "RemoveService") {
            std::string name = name_arg();
            require_service(name);
            stop_service(name, "rpc RemoveService");
            services.at(name).removed = true;
            emit(name, "rpc", "service removed");
            return json{{"removed", true}};
        }
        if (handler == "GetServiceEnable") {
            const ServiceSpec& spec = require_service(name_arg());
            return json{{"name", spec.name}, {"enabled", spec.enabled}};
        }
        if (handler == "GetCmdState") {
            return command_state_json(name_arg());
        }
        if (handler == "ListCmdState") {
            json list = json::array();
            for (const auto& spec : cfg.commands) {
                if (!commands.at(spec.name).removed) {
                    list.push_back(command_state_json(spec.name));
                }
            }
            return json{{"commands", list}};
        }
        if (handler == "ExecuteCmd") {
            std::string name = name_arg();
            require_command(name);
            execute_command(name, "rpc ExecuteCmd");
            return json{{"accepted", true}};
        }
        if (handler == "RemoveCmd") {
            std::string name = name_arg();
            require_command(name);
            commands.at(name).removed = true;
            emit(name, "rpc", "command removed");
            return json{{"removed", true}};
        }
        raise(ErrorCode::UnknownHandler, "unknown handler: " + handler);
    }

    std::string rpc(const std::string& request_json) {
        json response;
        try {
            json request = parse_json(request_json, "rpc request");
            if (!request.contains("handler") || !request["handler"].is_string()) {
                raise(ErrorCode::ParseError, "request needs a handler field");
            }
            std::string handler = request["handler"].get<std::string>();
            json args = request.value("args", json::object());
            json result = dispatch(handler, args);
            response["ok"] = true;
            response["result"] = result;
        } catch (const Error& e) {
            response["ok"] = false;
            response["error"] = {{"code", error_code_name(e.code())},
                                 {"message", e.what()}};
        }
        return response.dump();
    }
};

Orchestrator::Orchestrator(MasterConfig cfg, Scenario scenario)
    : impl_(new Impl(std::move(cfg), std::move(scenario))) {}

Orchestrator::~Orchestrator() {
    delete impl_;
}

void Orchestrator::run_startup() {
    impl_->run_startup();
}

void Orchestrator::advance(std::int64_t micros) {
    impl_->advance_to(impl_->now_us + micros);
}

std::string Orchestrator::rpc(const std::string& request_json) {
    return impl_->rpc(request_json);
}

std::int64_t Orchestrator::now_us() const {
    return impl_->now_us;
}

ServiceState Orchestrator::state_of(const std::string& name) const {
    impl_->require_service(name);
    return impl_->services.at(name).state;
}

const MasterConfig& Orchestrator::config() const {
    return impl_->cfg;
}

const std::vector<Event>& Orchestrator::events() const {
    return impl_->log;
}

std::string Orchestrator::drain_events_jsonl() {
    std::string out;
    for (std::size_t i = impl_->drained; i < impl_->log.size(); ++i) {
        out += impl_->log[i].to_json();
        out += '\n';
    }
    impl_->drained = impl_->log.size();
    return out;
}

} // namespace fmxwb
