#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fmxwb/bytes.hpp"

namespace fmxwb {

struct BatteryState {
    std::vector<int> cell_voltage_mv;
    int current_ma = 0; // signed; negative while discharging
    int soc = 0;        // percent, 0..100
    std::vector<int> temperature_c;
};

struct ImuState {
    double pitch = 0;
    double roll = 0;
    double yaw = 0;
};

struct MotorState {
    double position = 0;
    std::vector<int> temperature_c; // two sensors per joint
    double voltage = 0;
};

struct ServiceStatus {
    std::string name;
    int status = 0; // opaque code, passed through
};

struct ResourceState {
    std::vector<double> cpu;
    std::int64_t mem_total = 0;
    std::int64_t mem_used = 0;
};

struct ReportState {
    std::string msg_id; // decimal microsecond epoch
    BatteryState battery;
    ImuState imu;
    std::vector<MotorState> motors;
    std::vector<ServiceStatus> services;
    ResourceState resource;
    std::map<std::string, std::string> extras; // unknown fields, serialized JSON

    // Throws Error(SchemaError) on violated invariants (soc range, memory).
    void validate() const;
};

// Throws Error(SchemaError) when cmd != "reportState" or a required field is
// malformed; unknown fields are preserved in extras.
ReportState parse_report(const std::string& json_text);

// Emits the reportState JSON layout (state.low.bmsHg / state.low.imu /
// state.low.motorHg / state.module.service / state.resource) with msgId set
// to the decimal microsecond clock.
std::string synthesize_report(const ReportState& snapshot, std::int64_t clock_us);

struct EndpointConfig {
    std::map<std::string, std::string> server_uri_map;
    bool auto_reconnect = true;
    int auth_type = 0;
    std::int64_t reconnect_interval_s = 10;
    std::int64_t report_interval_s = 300;

    // Throws Error(InvalidConfig): URIs need scheme://host:port, intervals > 0.
    static EndpointConfig from_json(const std::string& json_text);
    void validate() const;
};

// Exact integer arithmetic: emission k happens at t0 + k * interval; a
// disconnect at time t is retried at t + reconnect_interval.
class ReportSchedule {
public:
    ReportSchedule(std::int64_t t0_us, std::int64_t interval_us);

    std::int64_t emission_at(std::int64_t k) const;
    std::int64_t next_after(std::int64_t t_us) const; // first emission > t_us

private:
    std::int64_t t0_us_;
    std::int64_t interval_us_;
};

struct CaptureRecord {
    double timestamp_s = 0;
    std::string destination; // host:port
    std::int64_t byte_count = 0;
    std::optional<Bytes> payload;
};

// Parses JSON-lines capture files ({"timestamp","destination","byte_count"[,"payload_hex"]}).
std::vector<CaptureRecord> parse_capture_jsonl(const std::string& text);

struct EndpointStats {
    std::string destination;
    std::string host;
    std::string port;
    std::int64_t total_bytes = 0;
    std::int64_t record_count = 0;
    double first_ts = 0;
    double last_ts = 0;
    double mean_rate_bps = 0; // total_bytes * 8 / capture span
    bool flagged = false;     // outside the allowlist
};

struct RateReport {
    double capture_span_s = 0;
    std::vector<EndpointStats> endpoints;       // stable order: first appearance
    std::vector<std::string> flagged_destinations;

    std::string to_json() const;
    static RateReport from_json(const std::string& json_text);
};

// Allowlist entries are bare hosts or IPv4 CIDRs. Throws Error(EmptyCapture)
// on an empty record list.
RateReport analyze_capture(const std::vector<CaptureRecord>& records,
                           const std::vector<std::string>& allowlist);

// One "host port deny" line per flagged destination (report order), then the
// policy CIDRs verbatim as "cidr any deny"; duplicates removed.
std::string emit_block_rules(const RateReport& report, const std::vector<std::string>& policy);

} // namespace fmxwb
