#include "fdia_lab/wire.hpp"

#include "fdia_lab/numfmt.hpp"

#include <json.hpp>

#include <cmath>

namespace fdia_lab {

namespace {

constexpr std::array<std::string_view, 5> kKindNames{"Obs", "Cmd", "Sig", "Hello", "Bye"};

void append_number(std::string& out, double v)
{
    if (!std::isfinite(v)) throw std::invalid_argument("encode: non-finite number");
    append17(out, v);
}

template <std::size_t N>
void append_array(std::string& out, const std::array<double, N>& a)
{
    out += '[';
    for (std::size_t i = 0; i < N; ++i) {
        if (i) out += ',';
        append_number(out, a[i]);
    }
    out += ']';
}

template <std::size_t N>
std::array<double, N> numbers(const nlohmann::json& j, std::string_view kind)
{
    if (!j.is_array() || j.size() != N) {
        throw DecodeError(DecodeErrc::BadPayload,
                          std::string(kind) + " payload must be an array of " + std::to_string(N) + " numbers");
    }
    std::array<double, N> a{};
    for (std::size_t i = 0; i < N; ++i) {
        if (!j[i].is_number()) throw DecodeError(DecodeErrc::BadPayload, std::string(kind) + " payload holds a non-number");
        a[i] = j[i].get<double>();
    }
    return a;
}

std::string string_field(const nlohmann::json& j, const char* key)
{
    if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
        throw DecodeError(DecodeErrc::BadPayload, std::string("payload missing string field '") + key + "'");
    }
    return j[key].get<std::string>();
}

}  // namespace

std::string_view to_string(MessageKind k) { return kKindNames[static_cast<std::size_t>(k)]; }

std::string_view to_string(DecodeErrc e)
{
    switch (e) {
    case DecodeErrc::MalformedLength: return "malformed-length";
    case DecodeErrc::Truncated: return "truncated";
    case DecodeErrc::InvalidJson: return "invalid-json";
    case DecodeErrc::UnknownKind: return "unknown-kind";
    case DecodeErrc::BadPayload: return "bad-payload";
    }
    return "bad-payload";
}

std::string encode(const WireMessage& msg)
{
    std::string body = R"({"kind":")";
    body += to_string(msg.kind());
    body += R"(","seq":)";
    body += std::to_string(msg.seq);
    body += R"(,"t":)";
    append_number(body, msg.t);
    body += R"(,"payload":)";
    try {
        std::visit(
            [&body](const auto& p) {
                using P = std::decay_t<decltype(p)>;
                if constexpr (std::is_same_v<P, ObsPayload>) {
                    append_array(body, p.p);
                } else if constexpr (std::is_same_v<P, CmdPayload>) {
                    append_array(body, p.q);
                } else if constexpr (std::is_same_v<P, SigPayload>) {
                    append_array(body, std::array<double, 1>{p.phi});
                } else if constexpr (std::is_same_v<P, HelloPayload>) {
                    body += nlohmann::json{{"digest", p.digest}, {"role", p.role}}.dump();
                } else {
                    body += nlohmann::json{{"reason", p.reason}}.dump();
                }
            },
            msg.payload);
    } catch (const nlohmann::json::type_error& e) {
        throw std::invalid_argument(std::string("encode: text is not valid UTF-8: ") + e.what());
    }
    body += '}';

    if (body.size() > kMaxFrameBytes) throw std::invalid_argument("encode: frame too large");
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string frame;
    frame.reserve(4 + body.size());
    frame += static_cast<char>((n >> 24) & 0xFF);
    frame += static_cast<char>((n >> 16) & 0xFF);
    frame += static_cast<char>((n >> 8) & 0xFF);
    frame += static_cast<char>(n & 0xFF);
    frame += body;
    return frame;
}

namespace {

std::uint32_t read_length(std::string_view bytes)
{
    const auto b = [&](std::size_t i) { return static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])); };
    return (b(0) << 24) | (b(1) << 16) | (b(2) << 8) | b(3);
}

WireMessage decode_body(std::string_view body)
{
    nlohmann::json j = nlohmann::json::parse(body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DecodeError(DecodeErrc::InvalidJson, "frame body is not a JSON object");
    if (!j.contains("kind") || !j["kind"].is_string()) throw DecodeError(DecodeErrc::BadPayload, "missing 'kind'");
    if (!j.contains("seq") || !j["seq"].is_number_unsigned()) throw DecodeError(DecodeErrc::BadPayload, "missing or negative 'seq'");
    if (!j.contains("t") || !j["t"].is_number()) throw DecodeError(DecodeErrc::BadPayload, "missing 't'");
    if (!j.contains("payload")) throw DecodeError(DecodeErrc::BadPayload, "missing 'payload'");

    const auto kind = j["kind"].get<std::string>();
    WireMessage m;
    m.seq = j["seq"].get<std::uint64_t>();
    m.t = j["t"].get<double>();
    const auto& p = j["payload"];
    if (kind == "Obs") {
        m.payload = ObsPayload{numbers<3>(p, kind)};
    } else if (kind == "Cmd") {
        m.payload = CmdPayload{numbers<2>(p, kind)};
    } else if (kind == "Sig") {
        m.payload = SigPayload{numbers<1>(p, kind)[0]};
    } else if (kind == "Hello") {
        m.payload = HelloPayload{string_field(p, "role"), string_field(p, "digest")};
    } else if (kind == "Bye") {
        m.payload = ByePayload{string_field(p, "reason")};
    } else {
        throw DecodeError(DecodeErrc::UnknownKind, "unknown message kind '" + kind + "'");
    }
    return m;
}

}  // namespace

WireMessage decode(std::string_view frame)
{
    if (frame.size() < 4) throw DecodeError(DecodeErrc::Truncated, "frame shorter than its length prefix");
    const std::uint32_t n = read_length(frame);
    if (n == 0 || n > kMaxFrameBytes) throw DecodeError(DecodeErrc::MalformedLength, "frame length " + std::to_string(n) + " out of range");
    if (frame.size() < 4 + static_cast<std::size_t>(n)) throw DecodeError(DecodeErrc::Truncated, "frame body truncated");
    if (frame.size() > 4 + static_cast<std::size_t>(n)) throw DecodeError(DecodeErrc::MalformedLength, "trailing bytes after frame");
    return decode_body(frame.substr(4, n));
}

std::optional<WireMessage> extract_frame(std::string& buffer)
{
    if (buffer.size() < 4) return std::nullopt;
    const std::uint32_t n = read_length(buffer);
    if (n == 0 || n > kMaxFrameBytes) throw DecodeError(DecodeErrc::MalformedLength, "frame length " + std::to_string(n) + " out of range");
    if (buffer.size() < 4 + static_cast<std::size_t>(n)) return std::nullopt;
    WireMessage m = decode_body(std::string_view(buffer).substr(4, n));
    buffer.erase(0, 4 + static_cast<std::size_t>(n));
    return m;
}

}  // namespace fdia_lab
