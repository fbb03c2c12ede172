#pragma once

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fmxwb/bytes.hpp"
#include "fmxwb/lcg_stream.hpp"

namespace testutil {

// Synthetic robot identity shared by all fixtures.
inline fmxwb::DeviceIdentity fixture_identity() {
    fmxwb::DeviceIdentity id;
    id.device_code = "E21D1000P64BKH86";
    id.rf_code = "34d21p";
    id.bluetooth = "04360";
    id.machine_type = "4";
    id.firmware_version = 1;
    return id;
}

inline std::string asset_path(const std::string& name) {
    const char* dir = std::getenv("FMXWB_ASSETS");
    return std::string(dir ? dir : "assets") + "/" + name;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path);
    }
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

inline fmxwb::Bytes read_bytes(const std::string& path) {
    std::string text = read_text(path);
    return fmxwb::Bytes(text.begin(), text.end());
}

} // namespace testutil
