#include "fmxwb/orchestrator.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>
#include <string>

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include "fmxwb/error.hpp"

namespace fmxwb {

namespace {

using Clock = std::chrono::steady_clock;

struct Fd {
    int fd = -1;
    Fd() = default;
    explicit Fd(int f) : fd(f) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() {
        if (fd >= 0) ::close(fd);
    }
};

sockaddr_un make_addr(const std::string& path) {
    sockaddr_un addr{};
    addr.sun_family = AF_UNIX;
    if (path.size() >= sizeof(addr.sun_path)) {
        raise(ErrorCode::IoError, "socket path too long: " + path);
    }
    std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
    return addr;
}

// Remaining poll budget in ms, or -1 for no deadline.
int remaining_ms(Clock::time_point deadline, bool has_deadline) {
    if (!has_deadline) {
        return -1;
    }
    auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
    return left.count() <= 0 ? 0 : static_cast<int>(left.count());
}

} // namespace

void rpc_serve(Orchestrator& orch, const std::string& socket_path,
               const RpcServeOptions& opts) {
    Fd listener(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (listener.fd < 0) {
        raise(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
    }
    ::unlink(socket_path.c_str());
    sockaddr_un addr = make_addr(socket_path);
    if (::bind(listener.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        raise(ErrorCode::IoError, "bind " + socket_path + ": " + std::strerror(errno));
    }
    if (::listen(listener.fd, 4) < 0) {
        raise(ErrorCode::IoError, std::string("listen: ") + std::strerror(errno));
    }

    bool has_deadline = opts.serve_seconds > 0;
    Clock::time_point deadline =
        Clock::now() + std::chrono::duration_cast<Clock::duration>(
                           std::chrono::duration<double>(opts.serve_seconds));
    Clock::time_point last_advance = Clock::now();

    auto scale_clock = [&]() {
        Clock::time_point now = Clock::now();
        if (opts.time_scale > 0) {
            auto wall_us =
                std::chrono::duration_cast<std::chrono::microseconds>(now - last_advance);
            orch.advance(static_cast<std::int64_t>(
                static_cast<double>(wall_us.count()) * opts.time_scale));
        }
        last_advance = now;
    };

    for (;;) {
        pollfd pfd{listener.fd, POLLIN, 0};
        int timeout = remaining_ms(deadline, has_deadline);
        if (has_deadline && timeout == 0) {
            return;
        }
        int rc = ::poll(&pfd, 1, timeout);
        if (rc < 0 && errno != EINTR) {
            raise(ErrorCode::IoError, std::string("poll: ") + std::strerror(errno));
        }
        if (rc <= 0) {
            if (has_deadline && remaining_ms(deadline, true) == 0) {
                return;
            }
            continue;
        }
        Fd conn(::accept(listener.fd, nullptr, nullptr));
        if (conn.fd < 0) {
            continue;
        }
        std::string buffer;
        bool open = true;
        while (open) {
            pollfd cfd{conn.fd, POLLIN, 0};
            int ct = remaining_ms(deadline, has_deadline);
            if (has_deadline && ct == 0) {
                return;
            }
            int crc = ::poll(&cfd, 1, ct);
            if (crc < 0 && errno != EINTR) {
                break;
            }
            if (crc <= 0) {
                continue;
            }
            char chunk[4096];
            ssize_t n = ::read(conn.fd, chunk, sizeof(chunk));
            if (n <= 0) {
                break;
            }
            buffer.append(chunk, static_cast<std::size_t>(n));
            std::size_t pos;
            while ((pos = buffer.find('\n')) != std::string::npos) {
                std::string line = buffer.substr(0, pos);
                buffer.erase(0, pos + 1);
                if (line.empty()) {
                    continue;
                }
                scale_clock();
                std::string response = orch.rpc(line);
                response += '\n';
                std::size_t written = 0;
                while (written < response.size()) {
                    ssize_t w = ::write(conn.fd, response.data() + written,
                                        response.size() - written);
                    if (w <= 0) {
                        open = false;
                        break;
                    }
                    written += static_cast<std::size_t>(w);
                }
                if (!open) {
                    break;
                }
            }
        }
        if (opts.exit_on_disconnect) {
            return;
        }
    }
}

std::string rpc_send(const std::string& socket_path, const std::string& request_json) {
    Fd conn(::socket(AF_UNIX, SOCK_STREAM, 0));
    if (conn.fd < 0) {
        raise(ErrorCode::IoError, std::string("socket: ") + std::strerror(errno));
    }
    sockaddr_un addr = make_addr(socket_path);
    if (::connect(conn.fd, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
        raise(ErrorCode::IoError, "connect " + socket_path + ": " + std::strerror(errno));
    }
    std::string request = request_json;
    request += '\n';
    std::size_t written = 0;
    while (written < request.size()) {
        ssize_t w = ::write(conn.fd, request.data() + written, request.size() - written);
        if (w <= 0) {
            raise(ErrorCode::IoError, std::string("write: ") + std::strerror(errno));
        }
        written += static_cast<std::size_t>(w);
    }
    std::string buffer;
    char chunk[4096];
    for (;;) {
        ssize_t n = ::read(conn.fd, chunk, sizeof(chunk));
        if (n < 0) {
            raise(ErrorCode::IoError, std::string("read: ") + std::strerror(errno));
        }
        if (n == 0) {
            break;
        }
        buffer.append(chunk, static_cast<std::size_t>(n));
        std::size_t pos = buffer.find('\n');
        if (pos != std::string::npos) {
            return buffer.substr(0, pos);
        }
    }
    raise(ErrorCode::IoError, "connection closed before a full response arrived");
}

} // namespace fmxwb
