// fdia_lab command-line front end.

#include "fdia_lab/adversary.hpp"
#include "fdia_lab/netlink.hpp"
#include "fdia_lab/numfmt.hpp"
#include "fdia_lab/scenario.hpp"
#include "fdia_lab/smsf.hpp"
#include "fdia_lab/vulncheck.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

using namespace fdia_lab;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitError = 2;

std::string g17(double v) { return std::isnan(v) ? std::string("nan") : fmt17(v); }

std::string opt_time(const std::optional<double>& t) { return t ? g17(*t) : std::string("-"); }

void print_monitor(const MonitorResult& m)
{
    std::cout << "monitor flag        " << (m.flag ? "yes" : "no") << "\n"
              << "first exceed t      " << opt_time(m.first_exceed_time) << "\n"
              << "flag t              " << opt_time(m.flag_time) << "\n"
              << "peak residual       " << g17(m.peak) << "\n";
}

int cmd_simulate(const std::string& scenario, const std::optional<std::string>& out)
{
    const auto dir = resolve_out_dir(out);
    const auto r = run_scenario(load_scenario(scenario), dir);
    std::cout << summary_json(r).dump(2) << "\n";
    std::cerr << "artifacts in " << dir.string() << "\n";
    return 0;
}

int cmd_verify(const std::string& scenario)
{
    const auto r = evaluate_scenario(load_scenario(scenario));
    std::cout << "scenario            " << r.name << "\n"
              << "condition1          " << g17(r.conditions.condition1) << "\n"
              << "condition2          " << g17(r.conditions.condition2) << "\n"
              << "sup_obs_dev         " << g17(r.undetectability.sup_obs_dev) << "\n"
              << "sup_actual_dev      " << g17(r.undetectability.sup_actual_dev) << "\n";
    const bool ok = r.undetectability.verdict;
    std::cout << (ok ? "PASS" : "FAIL") << "\n";
    return ok ? 0 : kExitFail;
}

int cmd_monitor(const std::string& scenario, const std::optional<std::string>& trace_path,
                const std::optional<double>& s_phi, double d_phi)
{
    const Scenario s = load_scenario(scenario);
    if (trace_path) {
        std::ifstream is(*trace_path);
        if (!is) throw std::invalid_argument("cannot open " + *trace_path);
        print_monitor(monitor_recorded(read_trace_csv(is), s.detection));
        return 0;
    }
    const auto r = evaluate_scenario(s);
    std::optional<AffineFit> channel;
    if (s_phi) channel = AffineFit{*s_phi, d_phi, 0.0};
    print_monitor(channel ? monitor(r.trace, s.signature, channel, s.detection) : r.monitor);
    return 0;
}

int cmd_estimate(const std::string& scenario, const std::optional<std::string>& source, std::optional<std::size_t> n,
                 double ridge, const std::optional<std::string>& samples_out)
{
    const Scenario s = load_scenario(scenario);
    const SimTrace trace = run(s.sim, build_attack(s), s.signature);
    StudyConfig cfg;
    cfg.estimator.regularization = ridge;

    if (!source) {
        if (n) cfg.sample_counts = {*n};
        std::cout << "source,n,nrmse,status\n";
        for (const auto& row : estimation_study(trace, s.signature, cfg)) {
            std::cout << to_string(row.source) << ',' << row.n << ',' << g17(row.nrmse) << ',' << row.status << "\n";
        }
        return 0;
    }

    const SampleSource src = sample_source_from_string(*source);
    const std::size_t count = n.value_or(kDefaultInterceptCount);
    SampleSet set;
    std::vector<Point2> grid;
    switch (src) {
    case SampleSource::Trajectory:
        set = trajectory_samples(trace, count, s.signature);
        grid = bbox_grid(actual_positions(trace));
        break;
    case SampleSource::Spiral:
        set = spiral_samples(count, cfg.spiral_turns, cfg.spiral_radius, s.signature);
        grid = bbox_grid(sample_positions(set));
        break;
    case SampleSource::Grid: {
        const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count))));
        set = grid_samples(std::max<std::size_t>(side, 2), -1.0, 1.0, s.signature);
        grid = bbox_grid(sample_positions(set));
        break;
    }
    }
    if (samples_out) {
        std::ofstream os(*samples_out);
        write_samples_csv(os, set);
    }
    std::cout << "source,n,nrmse,status\n";
    try {
        const auto est = fit_signature(set, cfg.estimator);
        std::cout << to_string(src) << ',' << set.count() << ',' << g17(nrmse(est, s.signature, grid)) << ",ok\n";
    } catch (const UnderdeterminedError& e) {
        std::cout << to_string(src) << ',' << set.count() << ",nan,underdetermined\n";
        std::cerr << e.what() << "\n";
        return kExitFail;
    }
    return 0;
}

int cmd_vulncheck()
{
    std::cout << "family,class,constraint,example_alpha,example_beta,residual\n";
    for (const auto& f : representative_families()) {
        const auto v = classify(f);
        std::cout << f.name() << ',' << to_string(v.cls) << ',' << (v.constraint.empty() ? "-" : v.constraint);
        if (v.candidates.empty()) {
            std::cout << ",-,-,-\n";
        } else {
            const auto& [a, b] = v.candidates.front();
            std::cout << ',' << g17(a) << ',' << g17(b) << ',' << g17(v.residual) << "\n";
        }
    }
    return 0;
}

void write_half(const SimTrace& t, const std::optional<std::string>& out)
{
    if (!out) return;
    std::ofstream os(*out);
    if (!os) throw std::runtime_error("cannot write " + *out);
    write_trace_csv(os, t);
}

NetConfig net_config(const Scenario& s)
{
    NetConfig cfg;
    cfg.sim = s.sim;
    cfg.sig = s.signature;
    return cfg;
}

int cmd_serve_plant(const std::string& listen, const std::string& scenario, const std::optional<std::string>& out)
{
    Listener l(parse_endpoint(listen));
    std::cerr << "plant listening on port " << l.port() << "\n";
    const auto t = plant_serve(l, net_config(load_scenario(scenario)));
    write_half(t, out);
    std::cerr << "plant: " << t.rows.size() << " rows, " << (t.complete ? "complete" : "INCOMPLETE") << "\n";
    return t.complete ? 0 : kExitFail;
}

int cmd_serve_controller(const std::string& connect, const std::string& scenario, const std::optional<std::string>& out)
{
    const auto t = controller_serve(parse_endpoint(connect), net_config(load_scenario(scenario)));
    write_half(t, out);
    std::cerr << "controller: " << t.rows.size() << " rows, " << (t.complete ? "complete" : "INCOMPLETE") << "\n";
    return t.complete ? 0 : kExitFail;
}

int cmd_proxy(const std::string& listen, const std::string& connect, const std::optional<std::string>& attack_file,
              const std::optional<std::string>& scenario, const std::optional<double>& s_phi, double d_phi)
{
    AffineAttack attack = identity_attack();
    if (attack_file) {
        std::ifstream is(*attack_file);
        if (!is) throw std::invalid_argument("cannot open " + *attack_file);
        attack = attack_from_json(nlohmann::json::parse(is));
    } else if (scenario) {
        if (auto a = build_attack(load_scenario(*scenario))) attack = *a;
    }
    std::optional<SigChannel> channel;
    if (s_phi) channel = SigChannel{*s_phi, d_phi};
    Listener l(parse_endpoint(listen));
    std::cerr << "proxy listening on port " << l.port() << ", attack " << to_string(attack.kind.tag) << "\n";
    const auto st = proxy_serve(l, parse_endpoint(connect), attack, channel);
    std::cerr << "proxy: obs " << st.obs << ", cmd " << st.cmd << ", sig " << st.sig << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Affine false-data-injection lab for a unicycle under tracking control"};
    app.require_subcommand(1);

    std::string scenario = "scenario1";
    std::optional<std::string> out;

    auto* sim = app.add_subcommand("simulate", "run a scenario and write its artifacts");
    sim->add_option("--scenario", scenario, "built-in name or JSON file")->capture_default_str();
    sim->add_option("--out", out, "output directory (default $FDIA_LAB_OUT_DIR or ./out)");

    auto* verify = app.add_subcommand("verify", "check undetectability of a scenario against the nominal run");
    verify->add_option("--scenario", scenario)->capture_default_str();

    std::optional<std::string> trace_path;
    std::optional<double> s_phi;
    double d_phi = 0.0;
    auto* mon = app.add_subcommand("monitor", "signature monitor on a scenario or a recorded trace");
    mon->add_option("--scenario", scenario)->capture_default_str();
    mon->add_option("--trace", trace_path, "recorded trace CSV (uses its phi columns)");
    mon->add_option("--s-phi", s_phi, "attacker scaling of the plant signature stream");
    mon->add_option("--d-phi", d_phi, "attacker offset of the plant signature stream");

    std::optional<std::string> source;
    std::optional<std::size_t> n;
    double ridge = 0.0;
    std::optional<std::string> samples_out;
    auto* est = app.add_subcommand("estimate", "adversarial regression of the signature");
    est->add_option("--scenario", scenario)->capture_default_str();
    est->add_option("--source", source, "trajectory | spiral | grid (omit for the full study)");
    est->add_option("--n", n, "intercepted sample count");
    est->add_option("--ridge", ridge, "ridge regularization")->check(CLI::NonNegativeNumber);
    est->add_option("--samples", samples_out, "write the samples as CSV");

    auto* vuln = app.add_subcommand("vulncheck", "classify the representative scalar families");

    std::string listen;
    std::string connect;
    std::optional<std::string> attack_file;
    std::optional<std::string> proxy_scenario;

    auto* plant = app.add_subcommand("serve-plant", "plant endpoint");
    plant->add_option("--listen", listen, "host:port")->default_str(":" + std::to_string(kDefaultPlantPort));
    plant->add_option("--scenario", scenario)->capture_default_str();
    plant->add_option("--out", out, "plant half-trace CSV");

    auto* ctrl = app.add_subcommand("serve-controller", "controller endpoint");
    ctrl->add_option("--connect", connect, "host:port")->default_str("127.0.0.1:" + std::to_string(kDefaultProxyPort));
    ctrl->add_option("--scenario", scenario)->capture_default_str();
    ctrl->add_option("--out", out, "controller half-trace CSV");

    auto* proxy = app.add_subcommand("proxy", "man-in-the-middle between controller and plant");
    proxy->add_option("--listen", listen, "host:port")->default_str(":" + std::to_string(kDefaultProxyPort));
    proxy->add_option("--connect", connect, "plant host:port")->default_str("127.0.0.1:" + std::to_string(kDefaultPlantPort));
    auto* attack_opt = proxy->add_option("--attack", attack_file, "attack JSON file");
    proxy->add_option("--scenario", proxy_scenario, "build the attack from a scenario")->excludes(attack_opt);
    proxy->add_option("--s-phi", s_phi, "scale the Sig stream");
    proxy->add_option("--d-phi", d_phi, "offset the Sig stream");

    CLI11_PARSE(app, argc, argv);

    auto or_default = [](std::string& v, std::uint16_t port, const char* host) {
        if (v.empty()) v = std::string(host) + ":" + std::to_string(port);
    };

    try {
        if (*sim) return cmd_simulate(scenario, out);
        if (*verify) return cmd_verify(scenario);
        if (*mon) return cmd_monitor(scenario, trace_path, s_phi, d_phi);
        if (*est) return cmd_estimate(scenario, source, n, ridge, samples_out);
        if (*vuln) return cmd_vulncheck();
        if (*plant) {
            or_default(listen, kDefaultPlantPort, "");
            return cmd_serve_plant(listen, scenario, out);
        }
        if (*ctrl) {
            or_default(connect, kDefaultProxyPort, "127.0.0.1");
            return cmd_serve_controller(connect, scenario, out);
        }
        if (*proxy) {
            or_default(listen, kDefaultProxyPort, "");
            or_default(connect, kDefaultPlantPort, "127.0.0.1");
            return cmd_proxy(listen, connect, attack_file, proxy_scenario, s_phi, d_phi);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}
