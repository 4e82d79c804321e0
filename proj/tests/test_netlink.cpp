#include "fdia_lab/netlink.hpp"
#include "fdia_lab/smsf.hpp"

#include <doctest.h>

#include <future>
#include <thread>

using namespace fdia_lab;

namespace {

Endpoint local(std::uint16_t port) { return Endpoint{"127.0.0.1", port}; }

NetConfig short_run(double seconds)
{
    NetConfig cfg;
    cfg.sim.duration = seconds;
    cfg.io_timeout_ms = 5000;
    return cfg;
}

struct NetRun {
    SimTrace plant;
    SimTrace controller;
    SimTrace merged;
    ProxyStats stats;
};

NetRun run_through_proxy(const NetConfig& cfg, const AffineAttack& attack, std::optional<SigChannel> channel = {})
{
    Listener plant_l(local(0));
    Listener proxy_l(local(0));
    auto plant = std::async(std::launch::async, [&] { return plant_serve(plant_l, cfg); });
    auto proxy = std::async(std::launch::async, [&] {
        return proxy_serve(proxy_l, local(plant_l.port()), attack, channel, cfg.io_timeout_ms);
    });
    NetRun r;
    r.controller = controller_serve(local(proxy_l.port()), cfg);
    r.plant = plant.get();
    r.stats = proxy.get();
    r.merged = merge_traces(r.plant, r.controller);
    return r;
}

}  // namespace

TEST_CASE("endpoint parsing")
{
    const auto a = parse_endpoint("10.0.0.2:7701");
    CHECK(a.host == "10.0.0.2");
    CHECK(a.port == 7701);
    const auto b = parse_endpoint(":7702");
    CHECK(b.host == "127.0.0.1");
    CHECK(b.port == 7702);
    CHECK(parse_endpoint("0").port == 0);
    CHECK_THROWS_AS(parse_endpoint("host:"), std::invalid_argument);
    CHECK_THROWS_AS(parse_endpoint("host:70000"), std::invalid_argument);
    CHECK_THROWS_AS(parse_endpoint("host:12ab"), std::invalid_argument);
}

TEST_CASE("direct plant-controller run equals the in-process run")
{
    const auto cfg = short_run(10.0);
    Listener l(local(0));
    auto plant = std::async(std::launch::async, [&] { return plant_serve(l, cfg); });
    const auto ctrl = controller_serve(local(l.port()), cfg);
    const auto merged = merge_traces(plant.get(), ctrl);
    const auto ref = run(cfg.sim, std::nullopt);
    CHECK(merged.complete);
    REQUIRE(merged.rows.size() == ref.rows.size());
    CHECK(max_field_diff(merged, ref) <= 1e-9);
}

TEST_CASE("identity proxy run equals the in-process run")
{
    const auto cfg = short_run(10.0);
    const auto r = run_through_proxy(cfg, identity_attack());
    const auto ref = run(cfg.sim, std::nullopt);
    CHECK(r.merged.complete);
    REQUIRE(r.merged.rows.size() == ref.rows.size());
    CHECK(max_field_diff(r.merged, ref) <= 1e-9);
    CHECK(r.stats.obs == 1001);
    CHECK(r.stats.cmd == 1001);
    CHECK(r.stats.sig == 1001);
}

TEST_CASE("reflection proxy is undetectable at the controller")
{
    const auto cfg = short_run(30.0);
    const auto attack = build_reflection(1.0, cfg.sim.p0);
    const auto r = run_through_proxy(cfg, attack);
    const auto nominal = run(cfg.sim, std::nullopt);
    const auto in_process = run(cfg.sim, attack);
    REQUIRE(r.merged.complete);
    CHECK(max_field_diff(r.merged, in_process) <= 1e-9);
    const auto rep = undetectability_report(r.merged, nominal, attack, 1e-9);
    CHECK(rep.sup_obs_dev <= 1e-9);
    CHECK(rep.verdict);
}

TEST_CASE("signature channel tampering is flagged")
{
    const auto cfg = short_run(5.0);
    const auto r = run_through_proxy(cfg, identity_attack(), SigChannel{2.0, 0.0});
    const auto m = monitor_recorded(r.merged, DetectionConfig{});
    CHECK(m.flag);
    // The plant starts at Phi > 0, so the window completes on the tenth sample.
    REQUIRE(m.flag_time);
    CHECK(*m.flag_time == doctest::Approx(0.18));

    // The untouched identity run stays silent.
    const auto clean = run_through_proxy(cfg, identity_attack());
    CHECK_FALSE(monitor_recorded(clean.merged, DetectionConfig{}).flag);
}

TEST_CASE("config mismatch is refused")
{
    auto plant_cfg = short_run(1.0);
    auto ctrl_cfg = short_run(2.0);
    Listener l(local(0));
    auto plant = std::async(std::launch::async, [&] { return plant_serve(l, plant_cfg); });
    CHECK_THROWS_AS(controller_serve(local(l.port()), ctrl_cfg), ProtocolError);
    CHECK_THROWS_AS(plant.get(), ProtocolError);
}

TEST_CASE("connection loss yields an incomplete trace")
{
    const auto cfg = short_run(5.0);
    Listener l(local(0));
    auto plant = std::async(std::launch::async, [&] { return plant_serve(l, cfg); });
    {
        // A controller that answers three ticks and then hangs up.
        Socket s = connect_with_retry(local(l.port()));
        std::uint64_t seq = 0;
        s.send_message({seq++, 0.0, HelloPayload{"controller", config_digest(cfg.sim)}});
        CHECK(s.recv_message(5000).kind() == MessageKind::Hello);
        for (int k = 0; k < 3; ++k) {
            const auto obs = s.recv_message(5000);
            s.recv_message(5000);
            s.send_message({seq++, obs.t, CmdPayload{{0.02, 0.0}}});
        }
    }
    const auto t = plant.get();
    CHECK_FALSE(t.complete);
    CHECK(t.rows.size() == 2);  // ticks 0 and 2 are logged
}

TEST_CASE("plant loss yields an incomplete controller trace")
{
    const auto cfg = short_run(5.0);
    Listener l(local(0));
    auto fake_plant = std::async(std::launch::async, [&] {
        Socket s = l.accept(5000);
        s.recv_message(5000);
        std::uint64_t seq = 0;
        s.send_message({seq++, 0.0, HelloPayload{"plant", config_digest(cfg.sim)}});
        s.send_message({seq++, 0.0, ObsPayload{{0.0, 0.02, 0.0}}});
        s.send_message({seq++, 0.0, SigPayload{eval(default_signature(), 0.0, 0.02)}});
        s.recv_message(5000);
    });
    const auto t = controller_serve(local(l.port()), cfg);
    fake_plant.get();
    CHECK_FALSE(t.complete);
    CHECK(t.rows.size() == 1);
}

TEST_CASE("sequence gaps are protocol errors")
{
    const auto cfg = short_run(1.0);
    Listener l(local(0));
    auto fake_plant = std::async(std::launch::async, [&] {
        Socket s = l.accept(5000);
        s.recv_message(5000);
        s.send_message({0, 0.0, HelloPayload{"plant", config_digest(cfg.sim)}});
        s.send_message({2, 0.0, ObsPayload{{0.0, 0.02, 0.0}}});  // skips 1
        try {
            s.recv_message(2000);
        } catch (const ConnectionLost&) {
        }
    });
    CHECK_THROWS_AS(controller_serve(local(l.port()), cfg), ProtocolError);
    fake_plant.get();
}

TEST_CASE("merge flags length mismatches")
{
    SimTrace a, b;
    a.rows.resize(3);
    b.rows.resize(2);
    const auto m = merge_traces(a, b);
    CHECK(m.rows.size() == 2);
    CHECK_FALSE(m.complete);

    b.rows.resize(3);
    b.rows[1].t = 0.5;
    CHECK_THROWS_AS(merge_traces(a, b), ProtocolError);
}
