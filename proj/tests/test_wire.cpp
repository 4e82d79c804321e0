#include "fdia_lab/wire.hpp"

#include <doctest.h>

#include <bit>
#include <cmath>
#include <limits>
#include <random>

using namespace fdia_lab;

namespace {

std::string frame_of(std::string_view body)
{
    const auto n = static_cast<std::uint32_t>(body.size());
    std::string f{static_cast<char>(n >> 24), static_cast<char>(n >> 16), static_cast<char>(n >> 8), static_cast<char>(n)};
    return f + std::string(body);
}

DecodeErrc decode_error(std::string_view frame)
{
    try {
        decode(frame);
    } catch (const DecodeError& e) {
        return e.code();
    }
    FAIL("decode accepted a bad frame");
    return DecodeErrc::BadPayload;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

// Random finite doubles across the whole exponent range, plus awkward values.
double random_double(std::mt19937_64& rng)
{
    static constexpr double special[] = {0.0, 1.0, -1.0, 0.1, 0.02, 1e-300, -2.5e-308, 4.9e-324,
                                         std::numeric_limits<double>::max(), -std::numeric_limits<double>::max(),
                                         std::numeric_limits<double>::min(), 123456789012345678.0};
    switch (rng() % 4) {
    case 0: return special[rng() % std::size(special)];
    case 1: return std::uniform_real_distribution<double>(-10.0, 10.0)(rng);
    default:
        for (;;) {
            const double d = std::bit_cast<double>(rng());
            if (std::isfinite(d) && d != 0.0) return d;
        }
    }
}

std::string random_text(std::mt19937_64& rng)
{
    static const char* const pieces[] = {"a", "b", "X", "0", "9", " ", "_", "-", ":", "\"", "\\", "/", "\t", "{", "]", ",", "é", "β₁₁"};
    std::string s;
    const auto n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) s += pieces[rng() % std::size(pieces)];
    return s;
}

WireMessage random_message(std::mt19937_64& rng)
{
    WireMessage m;
    m.seq = rng() >> (rng() % 64);
    m.t = random_double(rng);
    switch (rng() % 5) {
    case 0: m.payload = ObsPayload{{random_double(rng), random_double(rng), random_double(rng)}}; break;
    case 1: m.payload = CmdPayload{{random_double(rng), random_double(rng)}}; break;
    case 2: m.payload = SigPayload{random_double(rng)}; break;
    case 3: m.payload = HelloPayload{random_text(rng), random_text(rng)}; break;
    default: m.payload = ByePayload{random_text(rng)}; break;
    }
    return m;
}

bool bitwise_equal(const WireMessage& a, const WireMessage& b)
{
    if (a.seq != b.seq || !same_bits(a.t, b.t) || a.kind() != b.kind()) return false;
    if (const auto* p = std::get_if<ObsPayload>(&a.payload)) {
        const auto& q = std::get<ObsPayload>(b.payload);
        return same_bits(p->p[0], q.p[0]) && same_bits(p->p[1], q.p[1]) && same_bits(p->p[2], q.p[2]);
    }
    if (const auto* p = std::get_if<CmdPayload>(&a.payload)) {
        const auto& q = std::get<CmdPayload>(b.payload);
        return same_bits(p->q[0], q.q[0]) && same_bits(p->q[1], q.q[1]);
    }
    if (const auto* p = std::get_if<SigPayload>(&a.payload)) return same_bits(p->phi, std::get<SigPayload>(b.payload).phi);
    return a == b;
}

}  // namespace

TEST_CASE("observation round-trip")
{
    const WireMessage m{1, 0.0, ObsPayload{{0.0, 0.02, 0.0}}};
    const auto f = encode(m);
    CHECK(f.substr(4) == R"({"kind":"Obs","seq":1,"t":0,"payload":[0,0.02,0]})");
    CHECK(static_cast<std::size_t>(static_cast<unsigned char>(f[3])) == f.size() - 4);
    CHECK(f[0] == 0);
    CHECK(decode(f) == m);
}

TEST_CASE("command round-trip")
{
    const WireMessage m{5, 0.05, CmdPayload{{0.02, 0.3}}};
    CHECK(decode(encode(m)) == m);
    CHECK(encode(m).find("0.050000000000000003") != std::string::npos);
}

TEST_CASE("hello, bye and signature round-trip")
{
    for (const WireMessage& m : {WireMessage{0, 0.0, HelloPayload{"controller", "0123456789abcdef"}},
                                 WireMessage{9, 30.0, ByePayload{"done"}}, WireMessage{2, 0.02, SigPayload{2419.0}}}) {
        CHECK(decode(encode(m)) == m);
    }
}

TEST_CASE("non-finite numbers are rejected at encode")
{
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double inf = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(encode(WireMessage{1, 0.0, ObsPayload{{nan, 0, 0}}}), std::invalid_argument);
    CHECK_THROWS_AS(encode(WireMessage{1, 0.0, CmdPayload{{0, inf}}}), std::invalid_argument);
    CHECK_THROWS_AS(encode(WireMessage{1, nan, SigPayload{1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(encode(WireMessage{1, 0.0, SigPayload{-inf}}), std::invalid_argument);
}

TEST_CASE("invalid UTF-8 text is rejected at encode")
{
    CHECK_THROWS_AS(encode(WireMessage{1, 0.0, ByePayload{std::string("\xc3", 1)}}), std::invalid_argument);
    CHECK_THROWS_AS(encode(WireMessage{1, 0.0, HelloPayload{"plant", std::string("\xff", 1)}}), std::invalid_argument);
}

TEST_CASE("decode errors are distinct")
{
    const auto good = encode(WireMessage{1, 0.0, ObsPayload{{0, 0.02, 0}}});
    CHECK(decode_error(good.substr(0, good.size() - 3)) == DecodeErrc::Truncated);
    CHECK(decode_error(good.substr(0, 2)) == DecodeErrc::Truncated);
    CHECK(decode_error(good + "x") == DecodeErrc::MalformedLength);
    CHECK(decode_error(std::string(4, '\0')) == DecodeErrc::MalformedLength);
    CHECK(decode_error(std::string("\x7f\xff\xff\xff", 4)) == DecodeErrc::MalformedLength);
    CHECK(decode_error(frame_of("{not json")) == DecodeErrc::InvalidJson);
    CHECK(decode_error(frame_of("[1,2]")) == DecodeErrc::InvalidJson);
    CHECK(decode_error(frame_of(R"({"kind":"Foo","seq":1,"t":0,"payload":[]})")) == DecodeErrc::UnknownKind);
    CHECK(decode_error(frame_of(R"({"kind":"Obs","seq":1,"t":0,"payload":[1,2]})")) == DecodeErrc::BadPayload);
    CHECK(decode_error(frame_of(R"({"kind":"Obs","seq":-1,"t":0,"payload":[1,2,3]})")) == DecodeErrc::BadPayload);
    CHECK(decode_error(frame_of(R"({"kind":"Cmd","seq":1,"t":0,"payload":["a",2]})")) == DecodeErrc::BadPayload);
    CHECK(decode_error(frame_of(R"({"kind":"Bye","seq":1,"t":0,"payload":{}})")) == DecodeErrc::BadPayload);
    CHECK(decode_error(frame_of(R"({"seq":1,"t":0,"payload":[]})")) == DecodeErrc::BadPayload);
}

TEST_CASE("stream extraction")
{
    const WireMessage a{1, 0.0, ObsPayload{{1, 2, 3}}};
    const WireMessage b{2, 0.0, SigPayload{4.0}};
    const std::string bytes = encode(a) + encode(b);
    std::string buf;
    std::vector<WireMessage> got;
    for (const char c : bytes) {  // one byte at a time
        buf += c;
        while (auto m = extract_frame(buf)) got.push_back(*m);
    }
    REQUIRE(got.size() == 2);
    CHECK(got[0] == a);
    CHECK(got[1] == b);
    CHECK(buf.empty());

    std::string bad(4, '\0');
    CHECK_THROWS_AS(extract_frame(bad), DecodeError);
}

TEST_CASE("round-trip is lossless for 10000 random messages")
{
    std::mt19937_64 rng(0xF0A1);
    int failures = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto m = random_message(rng);
        const auto back = decode(encode(m));
        if (!bitwise_equal(m, back)) {
            ++failures;
            INFO("message " << i << ": " << encode(m).substr(4));
            CHECK(bitwise_equal(m, back));
        }
    }
    CHECK(failures == 0);
}

TEST_CASE("kind names")
{
    CHECK(to_string(MessageKind::Obs) == "Obs");
    CHECK(to_string(MessageKind::Bye) == "Bye");
    CHECK(to_string(DecodeErrc::UnknownKind) == "unknown-kind");
}
