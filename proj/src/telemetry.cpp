#include "fmxwb/telemetry.hpp"

#include <algorithm>
#include <cstdio>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "fmxwb/error.hpp"

namespace fmxwb {

using nlohmann::json;

namespace {

json parse_json(const std::string& text, const char* what) {
    json j = json::parse(text, nullptr, false);
    if (j.is_discarded()) {
        raise(ErrorCode::ParseError, std::string("malformed JSON in ") + what);
    }
    return j;
}

const json& require(const json& j, const char* key, const char* where) {
    auto it = j.find(key);
    if (it == j.end()) {
        raise(ErrorCode::SchemaError, std::string(where) + " is missing field " + key);
    }
    return *it;
}

std::vector<int> int_array(const json& j, const char* where) {
    if (!j.is_array()) {
        raise(ErrorCode::SchemaError, std::string(where) + " must be an array");
    }
    std::vector<int> out;
    for (const auto& v : j) {
        if (!v.is_number()) {
            raise(ErrorCode::SchemaError, std::string(where) + " must hold numbers");
        }
        out.push_back(v.get<int>());
    }
    return out;
}

} // namespace

void ReportState::validate() const {
    if (battery.soc < 0 || battery.soc > 100) {
        raise(ErrorCode::SchemaError,
              "soc out of range: " + std::to_string(battery.soc));
    }
    if (resource.mem_total < 0 || resource.mem_used < 0 ||
        resource.mem_used > resource.mem_total) {
        raise(ErrorCode::SchemaError, "memory usage exceeds total");
    }
}

ReportState parse_report(const std::string& json_text) {
    json j = parse_json(json_text, "report");
    if (!j.is_object()) {
        raise(ErrorCode::SchemaError, "report must be a JSON object");
    }
    std::string cmd = j.value("cmd", "");
    if (cmd != "reportState") {
        raise(ErrorCode::SchemaError, "unexpected cmd: " + cmd);
    }
    ReportState r;
    const json& msg_id = require(j, "msgId", "report");
    if (!msg_id.is_string()) {
        raise(ErrorCode::SchemaError, "msgId must be a string");
    }
    r.msg_id = msg_id.get<std::string>();

    const json& state = require(j, "state", "report");
    const json& low = require(state, "low", "state");
    const json& bms = require(low, "bmsHg", "state.low");
    r.battery.cell_voltage_mv = int_array(require(bms, "cellVoltage", "bmsHg"), "cellVoltage");
    r.battery.current_ma = require(bms, "current", "bmsHg").get<int>();
    r.battery.soc = require(bms, "soc", "bmsHg").get<int>();
    r.battery.temperature_c = int_array(require(bms, "temperature", "bmsHg"), "temperature");

    const json& imu = require(low, "imu", "state.low");
    r.imu.pitch = require(imu, "pitch", "imu").get<double>();
    r.imu.roll = require(imu, "roll", "imu").get<double>();
    r.imu.yaw = require(imu, "yaw", "imu").get<double>();

    const json& motors = require(low, "motorHg", "state.low");
    if (!motors.is_array()) {
        raise(ErrorCode::SchemaError, "motorHg must be an array");
    }
    for (const auto& jm : motors) {
        MotorState m;
        m.position = require(jm, "position", "motorHg").get<double>();
        m.temperature_c = int_array(require(jm, "temperature", "motorHg"), "motor temperature");
        m.voltage = require(jm, "voltage", "motorHg").get<double>();
        r.motors.push_back(std::move(m));
    }

    const json& module = require(state, "module", "state");
    const json& services = require(module, "service", "state.module");
    if (!services.is_array()) {
        raise(ErrorCode::SchemaError, "service must be an array");
    }
    for (const auto& js : services) {
        ServiceStatus s;
        s.name = require(js, "name", "service").get<std::string>();
        s.status = require(js, "status", "service").get<int>();
        r.services.push_back(std::move(s));
    }

    const json& res = require(state, "resource", "state");
    const json& cpu = require(res, "cpu", "state.resource");
    if (!cpu.is_array()) {
        raise(ErrorCode::SchemaError, "cpu must be an array");
    }
    for (const auto& v : cpu) {
        r.resource.cpu.push_back(v.get<double>());
    }
    const json& mem = require(res, "mem", "state.resource");
    r.resource.mem_total = require(mem, "total", "mem").get<std::int64_t>();
    r.resource.mem_used = require(mem, "used", "mem").get<std::int64_t>();

    for (const auto& [key, value] : j.items()) {
        if (key != "cmd" && key != "msgId" && key != "state") {
            r.extras[key] = value.dump();
        }
    }
    r.validate();
    return r;
}

std::string synthesize_report(const ReportState& snapshot, std::int64_t clock_us) {
    snapshot.validate();
    json bms;
    bms["cellVoltage"] = snapshot.battery.cell_voltage_mv;
    bms["current"] = snapshot.battery.current_ma;
    bms["soc"] = snapshot.battery.soc;
    bms["temperature"] = snapshot.battery.temperature_c;

    json imu;
    imu["pitch"] = snapshot.imu.pitch;
    imu["roll"] = snapshot.imu.roll;
    imu["yaw"] = snapshot.imu.yaw;

    json motors = json::array();
    for (const auto& m : snapshot.motors) {
        motors.push_back({{"position", m.position},
                          {"temperature", m.temperature_c},
                          {"voltage", m.voltage}});
    }

    json services = json::array();
    for (const auto& s : snapshot.services) {
        services.push_back({{"name", s.name}, {"status", s.status}});
    }

    json j;
    j["cmd"] = "reportState";
    j["msgId"] = std::to_string(clock_us);
    j["state"]["low"]["bmsHg"] = bms;
    j["state"]["low"]["imu"] = imu;
    j["state"]["low"]["motorHg"] = motors;
    j["state"]["module"]["service"] = services;
    j["state"]["resource"]["cpu"] = snapshot.resource.cpu;
    j["state"]["resource"]["mem"] = {{"total", snapshot.resource.mem_total},
                                     {"used", snapshot.resource.mem_used}};
    for (const auto& [key, value] : snapshot.extras) {
        j[key] = parse_json(value, "extras");
    }
    return j.dump();
}

namespace {

// Accepts scheme://host:port with a numeric port in 1..65535.
void validate_uri(const std::string& uri) {
    std::size_t scheme_end = uri.find("://");
    if (scheme_end == std::string::npos || scheme_end == 0) {
        raise(ErrorCode::InvalidConfig, "URI needs scheme://host:port: " + uri);
    }
    std::size_t host_start = scheme_end + 3;
    std::size_t port_sep = uri.rfind(':');
    if (port_sep == std::string::npos || port_sep <= host_start ||
        port_sep + 1 >= uri.size()) {
        raise(ErrorCode::InvalidConfig, "URI needs an explicit port: " + uri);
    }
    long port = 0;
    for (std::size_t i = port_sep + 1; i < uri.size(); ++i) {
        char c = uri[i];
        if (c < '0' || c > '9') {
            raise(ErrorCode::InvalidConfig, "URI port must be numeric: " + uri);
        }
        port = port * 10 + (c - '0');
        if (port > 65535) {
            raise(ErrorCode::InvalidConfig, "URI port out of range: " + uri);
        }
    }
    if (port == 0) {
        raise(ErrorCode::InvalidConfig, "URI port out of range: " + uri);
    }
}

} // namespace

EndpointConfig EndpointConfig::from_json(const std::string& json_text) {
    json j = parse_json(json_text, "endpoint config");
    EndpointConfig cfg;
    json uri_map = j.value("ServerUriMap", json::object());
    for (const auto& [region, uri] : uri_map.items()) {
        cfg.server_uri_map[region] = uri.get<std::string>();
    }
    cfg.auto_reconnect = j.value("AutoReconnect", true);
    cfg.auth_type = j.value("AuthType", 0);
    cfg.reconnect_interval_s = j.value("ReconnectInterval", 10);
    cfg.report_interval_s = j.value("ReportInterval", 300);
    cfg.validate();
    return cfg;
}

void EndpointConfig::validate() const {
    if (server_uri_map.empty()) {
        raise(ErrorCode::InvalidConfig, "ServerUriMap is empty");
    }
    for (const auto& [region, uri] : server_uri_map) {
        validate_uri(uri);
    }
    if (reconnect_interval_s <= 0 || report_interval_s <= 0) {
        raise(ErrorCode::InvalidConfig, "intervals must be positive");
    }
}

ReportSchedule::ReportSchedule(std::int64_t t0_us, std::int64_t interval_us)
    : t0_us_(t0_us), interval_us_(interval_us) {
    if (interval_us <= 0) {
        raise(ErrorCode::InvalidRange, "schedule interval must be positive");
    }
}

std::int64_t ReportSchedule::emission_at(std::int64_t k) const {
    if (k < 0) {
        raise(ErrorCode::InvalidRange, "emission index must be non-negative");
    }
    return t0_us_ + k * interval_us_;
}

std::int64_t ReportSchedule::next_after(std::int64_t t_us) const {
    if (t_us < t0_us_) {
        return t0_us_;
    }
    return emission_at((t_us - t0_us_) / interval_us_ + 1);
}

std::vector<CaptureRecord> parse_capture_jsonl(const std::string& text) {
    std::vector<CaptureRecord> records;
    std::size_t start = 0;
    int line_no = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        std::string line = text.substr(
            start, end == std::string::npos ? std::string::npos : end - start);
        ++line_no;
        start = end == std::string::npos ? text.size() + 1 : end + 1;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            raise(ErrorCode::ParseError,
                  "capture line " + std::to_string(line_no) + " is not a JSON object");
        }
        CaptureRecord rec;
        if (!j.contains("timestamp") || !j["timestamp"].is_number() ||
            !j.contains("destination") || !j["destination"].is_string() ||
            !j.contains("byte_count") || !j["byte_count"].is_number_integer()) {
            raise(ErrorCode::ParseError,
                  "capture line " + std::to_string(line_no) +
                      " needs timestamp, destination, byte_count");
        }
        rec.timestamp_s = j["timestamp"].get<double>();
        rec.destination = j["destination"].get<std::string>();
        rec.byte_count = j["byte_count"].get<std::int64_t>();
        if (rec.byte_count < 0) {
            raise(ErrorCode::ParseError,
                  "capture line " + std::to_string(line_no) + " has negative byte_count");
        }
        if (j.contains("payload_hex")) {
            rec.payload = from_hex(j["payload_hex"].get<std::string>());
        }
        records.push_back(std::move(rec));
    }
    return records;
}

namespace {

std::optional<std::uint32_t> parse_ipv4(const std::string& host) {
    std::uint32_t parts[4];
    int consumed = 0;
    if (std::sscanf(host.c_str(), "%u.%u.%u.%u%n", &parts[0], &parts[1], &parts[2],
                    &parts[3], &consumed) != 4 ||
        consumed != static_cast<int>(host.size())) {
        return std::nullopt;
    }
    for (std::uint32_t p : parts) {
        if (p > 255) {
            return std::nullopt;
        }
    }
    return (parts[0] << 24) | (parts[1] << 16) | (parts[2] << 8) | parts[3];
}

bool allowlist_matches(const std::string& entry, const std::string& host) {
    std::size_t slash = entry.find('/');
    if (slash == std::string::npos) {
        return entry == host;
    }
    std::optional<std::uint32_t> net = parse_ipv4(entry.substr(0, slash));
    std::optional<std::uint32_t> ip = parse_ipv4(host);
    if (!net || !ip) {
        return false;
    }
    int bits = 0;
    try {
        bits = std::stoi(entry.substr(slash + 1));
    } catch (...) {
        return false;
    }
    if (bits < 0 || bits > 32) {
        return false;
    }
    if (bits == 0) {
        return true;
    }
    std::uint32_t mask = bits == 32 ? 0xFFFFFFFFu : ~((1u << (32 - bits)) - 1u);
    return (*net & mask) == (*ip & mask);
}

void split_destination(const std::string& dest, std::string& host, std::string& port) {
    std::size_t sep = dest.rfind(':');
    if (sep == std::string::npos) {
        host = dest;
        port.clear();
    } else {
        host = dest.substr(0, sep);
        port = dest.substr(sep + 1);
    }
}

} // namespace

RateReport analyze_capture(const std::vector<CaptureRecord>& records,
                           const std::vector<std::string>& allowlist) {
    if (records.empty()) {
        raise(ErrorCode::EmptyCapture, "capture holds no records");
    }
    double first = records.front().timestamp_s;
    double last = first;
    for (const auto& rec : records) {
        first = std::min(first, rec.timestamp_s);
        last = std::max(last, rec.timestamp_s);
    }
    RateReport report;
    report.capture_span_s = last - first;

    std::unordered_map<std::string, std::size_t> index;
    for (const auto& rec : records) {
        auto [it, inserted] = index.emplace(rec.destination, report.endpoints.size());
        if (inserted) {
            EndpointStats stats;
            stats.destination = rec.destination;
            split_destination(rec.destination, stats.host, stats.port);
            stats.first_ts = rec.timestamp_s;
            stats.last_ts = rec.timestamp_s;
            report.endpoints.push_back(std::move(stats));
        }
        EndpointStats& stats = report.endpoints[it->second];
        stats.total_bytes += rec.byte_count;
        stats.record_count += 1;
        stats.first_ts = std::min(stats.first_ts, rec.timestamp_s);
        stats.last_ts = std::max(stats.last_ts, rec.timestamp_s);
    }
    for (auto& stats : report.endpoints) {
        stats.mean_rate_bps = report.capture_span_s > 0
                                  ? static_cast<double>(stats.total_bytes) * 8.0 /
                                        report.capture_span_s
                                  : 0.0;
        stats.flagged = std::none_of(allowlist.begin(), allowlist.end(),
                                     [&](const std::string& entry) {
                                         return allowlist_matches(entry, stats.host);
                                     });
        if (stats.flagged) {
            report.flagged_destinations.push_back(stats.destination);
        }
    }
    return report;
}

std::string RateReport::to_json() const {
    json j;
    j["capture_span_s"] = capture_span_s;
    j["endpoints"] = json::array();
    for (const auto& e : endpoints) {
        j["endpoints"].push_back({{"destination", e.destination},
                                  {"host", e.host},
                                  {"port", e.port},
                                  {"total_bytes", e.total_bytes},
                                  {"record_count", e.record_count},
                                  {"first_ts", e.first_ts},
                                  {"last_ts", e.last_ts},
                                  {"mean_rate_bps", e.mean_rate_bps},
                                  {"flagged", e.flagged}});
    }
    j["flagged_destinations"] = flagged_destinations;
    return j.dump();
}

RateReport RateReport::from_json(const std::string& json_text) {
    json j = parse_json(json_text, "rate report");
    RateReport report;
    report.capture_span_s = j.value("capture_span_s", 0.0);
    for (const auto& je : j.value("endpoints", json::array())) {
        EndpointStats e;
        e.destination = je.value("destination", "");
        e.host = je.value("host", "");
        e.port = je.value("port", "");
        e.total_bytes = je.value("total_bytes", std::int64_t{0});
        e.record_count = je.value("record_count", std::int64_t{0});
        e.first_ts = je.value("first_ts", 0.0);
        e.last_ts = je.value("last_ts", 0.0);
        e.mean_rate_bps = je.value("mean_rate_bps", 0.0);
        e.flagged = je.value("flagged", false);
        report.endpoints.push_back(std::move(e));
    }
    for (const auto& d : j.value("flagged_destinations", json::array())) {
        report.flagged_destinations.push_back(d.get<std::string>());
    }
    return report;
}

std::string emit_block_rules(const RateReport& report,
                             const std::vector<std::string>& policy) {
    std::vector<std::string> lines;
    auto add = [&](std::string line) {
        if (std::find(lines.begin(), lines.end(), line) == lines.end()) {
            lines.push_back(std::move(line));
        }
    };
    for (const auto& dest : report.flagged_destinations) {
        std::string host;
        std::string port;
        split_destination(dest, host, port);
        add(host + " " + (port.empty() ? "any" : port) + " deny");
    }
    for (const auto& cidr : policy) {
        add(cidr + " any deny");
    }
    std::string out;
    for (const auto& line : lines) {
        out += line;
        out += '\n';
    }
    return out;
}

} // namespace fmxwb
