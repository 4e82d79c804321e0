#include "fdia_lab/netlink.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <chrono>
#include <cstring>
#include <thread>

namespace fdia_lab {

namespace {

std::string errno_text(const char* what) { return std::string(what) + ": " + std::strerror(errno); }

sockaddr_in resolve(const Endpoint& ep)
{
    addrinfo hints{};
    hints.ai_family = AF_INET;
    hints.ai_socktype = SOCK_STREAM;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    if (const int rc = ::getaddrinfo(ep.host.c_str(), port.c_str(), &hints, &res); rc != 0) {
        throw std::invalid_argument("cannot resolve '" + ep.host + "': " + ::gai_strerror(rc));
    }
    sockaddr_in addr{};
    std::memcpy(&addr, res->ai_addr, sizeof addr);
    ::freeaddrinfo(res);
    return addr;
}

bool wait_readable(int fd, int timeout_ms)
{
    pollfd p{fd, POLLIN, 0};
    for (;;) {
        const int rc = ::poll(&p, 1, timeout_ms);
        if (rc < 0 && errno == EINTR) continue;
        if (rc < 0) throw ConnectionLost(errno_text("poll"));
        return rc > 0;
    }
}

// Per-direction sequence check: each received seq is exactly one past the last.
class SeqTracker {
public:
    void check(const WireMessage& m)
    {
        if (last_ && m.seq != *last_ + 1) {
            throw ProtocolError("seq gap: expected " + std::to_string(*last_ + 1) + ", got " + std::to_string(m.seq));
        }
        last_ = m.seq;
    }

private:
    std::optional<std::uint64_t> last_;
};

template <typename P>
const P& expect(const WireMessage& m, MessageKind kind)
{
    if (m.kind() != kind) {
        throw ProtocolError("expected " + std::string(to_string(kind)) + ", got " + std::string(to_string(m.kind())));
    }
    return std::get<P>(m.payload);
}

}  // namespace

Endpoint parse_endpoint(std::string_view s)
{
    Endpoint ep;
    std::string_view port = s;
    if (const auto colon = s.rfind(':'); colon != std::string_view::npos) {
        if (colon > 0) ep.host = std::string(s.substr(0, colon));
        port = s.substr(colon + 1);
    }
    unsigned value = 0;
    const auto [ptr, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (port.empty() || ec != std::errc() || ptr != port.data() + port.size() || value > 65535) {
        throw std::invalid_argument("bad endpoint '" + std::string(s) + "'");
    }
    ep.port = static_cast<std::uint16_t>(value);
    return ep;
}

Socket::~Socket() { close(); }

Socket& Socket::operator=(Socket&& o) noexcept
{
    if (this != &o) {
        close();
        fd_ = o.fd_;
        buf_ = std::move(o.buf_);
        o.fd_ = -1;
    }
    return *this;
}

void Socket::close()
{
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
}

void Socket::send_raw(std::string_view bytes)
{
    while (!bytes.empty()) {
        const ssize_t n = ::send(fd_, bytes.data(), bytes.size(), MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR) continue;
        if (n <= 0) throw ConnectionLost(errno_text("send"));
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

void Socket::send_message(const WireMessage& msg) { send_raw(encode(msg)); }

bool Socket::fill()
{
    char chunk[4096];
    for (;;) {
        const ssize_t n = ::recv(fd_, chunk, sizeof chunk, 0);
        if (n < 0 && errno == EINTR) continue;
        if (n < 0) throw ConnectionLost(errno_text("recv"));
        if (n == 0) return false;
        buf_.append(chunk, static_cast<std::size_t>(n));
        return true;
    }
}

std::optional<WireMessage> Socket::next_buffered() { return extract_frame(buf_); }

WireMessage Socket::recv_message(int timeout_ms)
{
    for (;;) {
        if (auto m = next_buffered()) return *m;
        if (!wait_readable(fd_, timeout_ms)) throw ConnectionLost("recv: timed out");
        if (!fill()) throw ConnectionLost("recv: peer closed the connection");
    }
}

Listener::Listener(const Endpoint& ep)
{
    fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd_ < 0) throw std::runtime_error(errno_text("socket"));
    const int one = 1;
    ::setsockopt(fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr = resolve(ep);
    if (::bind(fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) < 0 || ::listen(fd_, 4) < 0) {
        const std::string msg = errno_text("bind/listen");
        ::close(fd_);
        throw std::runtime_error(msg);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
    port_ = ntohs(addr.sin_port);
}

Listener::~Listener()
{
    if (fd_ >= 0) ::close(fd_);
}

Socket Listener::accept(int timeout_ms)
{
    if (!wait_readable(fd_, timeout_ms)) throw ConnectionLost("accept: timed out");
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd < 0) throw ConnectionLost(errno_text("accept"));
    const int one = 1;
    ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
    return Socket(fd);
}

Socket connect_with_retry(const Endpoint& ep, int attempts, int delay_ms)
{
    const sockaddr_in addr = resolve(ep);
    for (int i = 0; i < attempts; ++i) {
        Socket s(::socket(AF_INET, SOCK_STREAM, 0));
        if (!s.valid()) throw std::runtime_error(errno_text("socket"));
        if (::connect(s.fd(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) == 0) {
            const int one = 1;
            ::setsockopt(s.fd(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
            return s;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));
    }
    throw ConnectionLost("connect: " + ep.host + ":" + std::to_string(ep.port) + " unreachable");
}

SimTrace plant_serve(Listener& listener, const NetConfig& cfg)
{
    cfg.sim.validate();
    const std::string digest = config_digest(cfg.sim);
    PlantCore plant(cfg.sim, cfg.sig);
    const std::size_t last = cfg.sim.last_tick();
    const auto stride = static_cast<std::size_t>(cfg.sim.log_stride);

    SimTrace trace;
    trace.complete = false;
    Socket conn = listener.accept(cfg.io_timeout_ms);
    std::uint64_t seq = 0;
    SeqTracker rx;

    try {
        const auto hello = conn.recv_message(cfg.io_timeout_ms);
        rx.check(hello);
        const auto& h = expect<HelloPayload>(hello, MessageKind::Hello);
        if (h.digest != digest) {
            conn.send_message({seq++, 0.0, ByePayload{"config mismatch"}});
            throw ProtocolError("controller config digest " + h.digest + " != plant digest " + digest);
        }
        conn.send_message({seq++, 0.0, HelloPayload{"plant", digest}});

        for (std::size_t k = 0; k <= last; ++k) {
            const double t = static_cast<double>(k) * cfg.sim.dt;
            const Posture p = plant.posture();
            const double phi = plant.phi();
            conn.send_message({seq++, t, ObsPayload{{p.x, p.y, p.theta}}});
            conn.send_message({seq++, t, SigPayload{phi}});

            const auto reply = conn.recv_message(cfg.io_timeout_ms);
            rx.check(reply);
            if (reply.kind() == MessageKind::Bye) return trace;
            const auto& cmd = expect<CmdPayload>(reply, MessageKind::Cmd);
            if (reply.t != t) throw ProtocolError("Cmd for t=" + std::to_string(reply.t) + " at t=" + std::to_string(t));
            const BodyVelocity q{cmd.q[0], cmd.q[1]};

            if (k % stride == 0) {
                TraceRow row;
                row.t = t;
                row.p_actual = p;
                row.q_received = q;
                row.phi_plant = phi;
                trace.rows.push_back(row);
            }
            if (k < last) plant.apply(q);
        }
        conn.send_message({seq++, static_cast<double>(last) * cfg.sim.dt, ByePayload{"done"}});
        trace.complete = true;
    } catch (const ConnectionLost&) {
        trace.complete = false;
    }
    return trace;
}

SimTrace controller_serve(const Endpoint& upstream, const NetConfig& cfg)
{
    cfg.sim.validate();
    const std::string digest = config_digest(cfg.sim);
    const ControllerCore controller(cfg.sim, cfg.sig);
    const std::size_t last = cfg.sim.last_tick();
    const auto stride = static_cast<std::size_t>(cfg.sim.log_stride);

    SimTrace trace;
    trace.complete = false;
    Socket conn = connect_with_retry(upstream);
    std::uint64_t seq = 0;
    SeqTracker rx;

    try {
        conn.send_message({seq++, 0.0, HelloPayload{"controller", digest}});
        const auto hello = conn.recv_message(cfg.io_timeout_ms);
        rx.check(hello);
        if (hello.kind() == MessageKind::Bye) {
            throw ProtocolError("plant refused: " + std::get<ByePayload>(hello.payload).reason);
        }
        if (expect<HelloPayload>(hello, MessageKind::Hello).digest != digest) {
            throw ProtocolError("plant config digest differs");
        }

        for (std::size_t k = 0;; ++k) {
            const auto obs_msg = conn.recv_message(cfg.io_timeout_ms);
            rx.check(obs_msg);
            if (obs_msg.kind() == MessageKind::Bye) {
                trace.complete = std::get<ByePayload>(obs_msg.payload).reason == "done" && k == last + 1;
                return trace;
            }
            if (k > last) throw ProtocolError("plant sent more ticks than configured");
            const auto& obs = expect<ObsPayload>(obs_msg, MessageKind::Obs);
            const auto sig_msg = conn.recv_message(cfg.io_timeout_ms);
            rx.check(sig_msg);
            const double phi_rx = expect<SigPayload>(sig_msg, MessageKind::Sig).phi;
            if (sig_msg.t != obs_msg.t) throw ProtocolError("Sig and Obs timestamps differ");

            const Posture p_obs{obs.p[0], obs.p[1], obs.p[2]};
            const auto out = controller.on_observation(k, p_obs);
            conn.send_message({seq++, obs_msg.t, CmdPayload{{out.q_cmd.v, out.q_cmd.omega}}});

            if (k % stride == 0) {
                TraceRow row;
                row.t = obs_msg.t;
                row.p_observed = p_obs;
                row.q_cmd = out.q_cmd;
                row.e_observed = out.e;
                row.V = out.V;
                row.phi_plant = phi_rx;
                row.phi_ctrl = out.phi_ctrl;
                trace.rows.push_back(row);
            }
        }
    } catch (const ConnectionLost&) {
        trace.complete = false;
    }
    return trace;
}

ProxyStats proxy_serve(Listener& listener, const Endpoint& plant, const AffineAttack& attack,
                       const std::optional<SigChannel>& channel, int io_timeout_ms)
{
    validate(attack);
    Socket ctrl = listener.accept(io_timeout_ms);
    Socket up = connect_with_retry(plant);
    ProxyStats stats;

    auto forward_from_plant = [&](WireMessage m) {
        if (auto* obs = std::get_if<ObsPayload>(&m.payload)) {
            const Posture p = attack_state(attack, Posture{obs->p[0], obs->p[1], obs->p[2]});
            obs->p = {p.x, p.y, p.theta};
            ++stats.obs;
        } else if (auto* sig = std::get_if<SigPayload>(&m.payload)) {
            if (channel) sig->phi = channel->s_phi * sig->phi + channel->d_phi;
            ++stats.sig;
        } else {
            ++stats.other;
        }
        ctrl.send_message(m);
    };
    auto forward_from_controller = [&](WireMessage m) {
        if (auto* cmd = std::get_if<CmdPayload>(&m.payload)) {
            const BodyVelocity q = attack_command(attack, BodyVelocity{cmd->q[0], cmd->q[1]});
            cmd->q = {q.v, q.omega};
            ++stats.cmd;
        } else {
            ++stats.other;
        }
        up.send_message(m);
    };

    try {
        for (;;) {
            pollfd fds[2] = {{up.fd(), POLLIN, 0}, {ctrl.fd(), POLLIN, 0}};
            const int rc = ::poll(fds, 2, io_timeout_ms);
            if (rc < 0 && errno == EINTR) continue;
            if (rc <= 0) break;
            bool closed = false;
            if (fds[0].revents) {
                closed |= !up.fill();
                while (auto m = up.next_buffered()) forward_from_plant(*m);
            }
            if (fds[1].revents) {
                closed |= !ctrl.fill();
                while (auto m = ctrl.next_buffered()) forward_from_controller(*m);
            }
            if (closed) break;
        }
    } catch (const ConnectionLost&) {
    }
    return stats;
}

SimTrace merge_traces(const SimTrace& plant_half, const SimTrace& controller_half)
{
    SimTrace out;
    const std::size_t n = std::min(plant_half.rows.size(), controller_half.rows.size());
    out.complete = plant_half.complete && controller_half.complete && plant_half.rows.size() == controller_half.rows.size();
    out.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& p = plant_half.rows[i];
        const auto& c = controller_half.rows[i];
        if (p.t != c.t) throw ProtocolError("merge_traces: time mismatch at row " + std::to_string(i));
        TraceRow r = c;
        r.p_actual = p.p_actual;
        r.q_received = p.q_received;
        out.rows.push_back(r);
    }
    return out;
}

}  // namespace fdia_lab
