#pragma once

// Plant, controller and man-in-the-middle proxy as separate endpoints over
// lock-step TCP. Per tick the plant sends Obs then Sig and blocks on one Cmd.

#include "fdia_lab/fdia.hpp"
#include "fdia_lab/signature.hpp"
#include "fdia_lab/simloop.hpp"
#include "fdia_lab/wire.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace fdia_lab {

struct Endpoint {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};

/// Accepts "host:port", ":port" or "port".
Endpoint parse_endpoint(std::string_view s);

inline constexpr std::uint16_t kDefaultPlantPort = 7701;
inline constexpr std::uint16_t kDefaultProxyPort = 7702;

/// Peer violated the protocol (seq gap, wrong kind, config mismatch).
class ProtocolError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Socket closed, reset or timed out.
class ConnectionLost : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Socket {
public:
    Socket() = default;
    explicit Socket(int fd) : fd_(fd) {}
    ~Socket();
    Socket(Socket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    Socket& operator=(Socket&& o) noexcept;
    Socket(const Socket&) = delete;
    Socket& operator=(const Socket&) = delete;

    int fd() const { return fd_; }
    bool valid() const { return fd_ >= 0; }
    void close();

    void send_message(const WireMessage& msg);
    /// Blocks up to timeout_ms for one full frame. Throws ConnectionLost on
    /// EOF, error or timeout.
    WireMessage recv_message(int timeout_ms);

    /// Reads whatever is available into the internal buffer; false on EOF.
    bool fill();
    std::optional<WireMessage> next_buffered();
    void send_raw(std::string_view bytes);

private:
    int fd_ = -1;
    std::string buf_;
};

class Listener {
public:
    /// Port 0 picks an ephemeral port.
    explicit Listener(const Endpoint& ep);
    ~Listener();
    Listener(const Listener&) = delete;
    Listener& operator=(const Listener&) = delete;

    std::uint16_t port() const { return port_; }
    Socket accept(int timeout_ms);

private:
    int fd_ = -1;
    std::uint16_t port_ = 0;
};

Socket connect_with_retry(const Endpoint& ep, int attempts = 50, int delay_ms = 100);

struct NetConfig {
    SimConfig sim{};
    PolySignature sig = default_signature();
    int io_timeout_ms = 10000;
};

/// Optional affine map on the Sig stream: phi -> s_phi phi + d_phi.
struct SigChannel {
    double s_phi = 1.0;
    double d_phi = 0.0;
};

/// Plant half-trace: t, p_actual, q_received, phi_plant are filled.
SimTrace plant_serve(Listener& listener, const NetConfig& cfg);

/// Controller half-trace: t, p_observed, q_cmd, e_observed, V, phi_ctrl are
/// filled; phi_plant holds the Sig value as received.
SimTrace controller_serve(const Endpoint& upstream, const NetConfig& cfg);

struct ProxyStats {
    std::uint64_t obs = 0;
    std::uint64_t cmd = 0;
    std::uint64_t sig = 0;
    std::uint64_t other = 0;
};

/// Accepts one controller, dials the plant, and rewrites Obs with the state
/// map, Cmd with the command map and Sig with `channel`. Returns when either
/// side closes.
ProxyStats proxy_serve(Listener& listener, const Endpoint& plant, const AffineAttack& attack,
                       const std::optional<SigChannel>& channel, int io_timeout_ms = 10000);

/// Joins the two halves row by row. Mismatched lengths are truncated and
/// flagged incomplete.
SimTrace merge_traces(const SimTrace& plant_half, const SimTrace& controller_half);

}  // namespace fdia_lab
