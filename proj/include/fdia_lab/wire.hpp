#pragma once

// Length-prefixed JSON frames: 4-byte big-endian length, then
// {"kind","seq","t","payload"} with 17-significant-digit floats.

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

namespace fdia_lab {

enum class MessageKind { Obs, Cmd, Sig, Hello, Bye };

std::string_view to_string(MessageKind k);

struct ObsPayload {
    std::array<double, 3> p{};
    bool operator==(const ObsPayload&) const = default;
};
struct CmdPayload {
    std::array<double, 2> q{};
    bool operator==(const CmdPayload&) const = default;
};
struct SigPayload {
    double phi = 0.0;
    bool operator==(const SigPayload&) const = default;
};
struct HelloPayload {
    std::string role;
    std::string digest;
    bool operator==(const HelloPayload&) const = default;
};
struct ByePayload {
    std::string reason;
    bool operator==(const ByePayload&) const = default;
};

using Payload = std::variant<ObsPayload, CmdPayload, SigPayload, HelloPayload, ByePayload>;

struct WireMessage {
    std::uint64_t seq = 0;
    double t = 0.0;
    Payload payload;

    MessageKind kind() const { return static_cast<MessageKind>(payload.index()); }
    bool operator==(const WireMessage&) const = default;
};

inline constexpr std::size_t kMaxFrameBytes = 1u << 20;

enum class DecodeErrc { MalformedLength, Truncated, InvalidJson, UnknownKind, BadPayload };

std::string_view to_string(DecodeErrc e);

class DecodeError : public std::runtime_error {
public:
    DecodeError(DecodeErrc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    DecodeErrc code() const { return code_; }

private:
    DecodeErrc code_;
};

/// Throws std::invalid_argument for non-finite numbers.
std::string encode(const WireMessage& msg);

/// Decodes exactly one complete frame.
WireMessage decode(std::string_view frame);

/// Removes and decodes the first frame of a stream buffer, or returns nullopt
/// when more bytes are needed.
std::optional<WireMessage> extract_frame(std::string& buffer);

}  // namespace fdia_lab
