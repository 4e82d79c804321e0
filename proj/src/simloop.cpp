#include "fdia_lab/simloop.hpp"

#include "fdia_lab/numfmt.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string_view>

namespace fdia_lab {

namespace {

constexpr std::size_t kTraceColumns = 17;

std::array<double, kTraceColumns> flatten(const TraceRow& r)
{
    return {r.t,
            r.p_actual.x, r.p_actual.y, r.p_actual.theta,
            r.p_observed.x, r.p_observed.y, r.p_observed.theta,
            r.q_cmd.v, r.q_cmd.omega,
            r.q_received.v, r.q_received.omega,
            r.e_observed.xe, r.e_observed.ye, r.e_observed.thetae,
            r.V, r.phi_plant, r.phi_ctrl};
}

TraceRow unflatten(const std::array<double, kTraceColumns>& c)
{
    TraceRow r;
    r.t = c[0];
    r.p_actual = {c[1], c[2], c[3]};
    r.p_observed = {c[4], c[5], c[6]};
    r.q_cmd = {c[7], c[8]};
    r.q_received = {c[9], c[10]};
    r.e_observed = {c[11], c[12], c[13]};
    r.V = c[14];
    r.phi_plant = c[15];
    r.phi_ctrl = c[16];
    return r;
}

}  // namespace

void SimConfig::validate() const
{
    if (!(dt > 0)) throw std::invalid_argument("SimConfig: dt must be positive");
    if (log_stride < 1) throw std::invalid_argument("SimConfig: log_stride must be >= 1");
    if (!(duration >= 0) || !std::isfinite(duration)) throw std::invalid_argument("SimConfig: duration must be finite and nonnegative");
    if (!gains.valid()) throw std::invalid_argument("SimConfig: gains must be strictly positive");
    if (!p0.finite()) throw std::invalid_argument("SimConfig: p0 must be finite");
    effective_ref().validate();
}

RefConfig SimConfig::effective_ref() const
{
    RefConfig r = ref;
    r.duration = duration;
    r.dt = dt;
    return r;
}

std::size_t SimConfig::last_tick() const
{
    return static_cast<std::size_t>(std::llround(duration / dt));
}

ControllerCore::ControllerCore(const SimConfig& cfg, PolySignature sig)
    : gains_(cfg.gains), ref_(cfg.effective_ref()), sig_(std::move(sig))
{
}

ControllerCore::Output ControllerCore::on_observation(std::size_t tick, const Posture& p_observed) const
{
    const RefSample r = ref_.at_tick(tick);
    Output out;
    out.e = body_frame_error(r.pose, p_observed);
    out.q_cmd = kanayama(r.feedforward, out.e, gains_);
    out.V = lyapunov(out.e, gains_);
    out.phi_ctrl = eval(sig_, p_observed.x, p_observed.y);
    return out;
}

PlantCore::PlantCore(const SimConfig& cfg, PolySignature sig) : p_(cfg.p0), dt_(cfg.dt), sig_(std::move(sig)) {}

double PlantCore::phi() const { return eval(sig_, p_.x, p_.y); }

void PlantCore::apply(const BodyVelocity& q_received) { p_ = rk4_step(p_, q_received, dt_); }

SimTrace run(const SimConfig& cfg, const std::optional<AffineAttack>& attack, const PolySignature& sig)
{
    cfg.validate();
    if (attack) validate(*attack);

    const ControllerCore controller(cfg, sig);
    PlantCore plant(cfg, sig);
    const std::size_t last = cfg.last_tick();
    const auto stride = static_cast<std::size_t>(cfg.log_stride);

    SimTrace trace;
    trace.rows.reserve(last / stride + 1);
    for (std::size_t k = 0; k <= last; ++k) {
        const Posture p_actual = plant.posture();
        const Posture p_observed = attack ? attack_state(*attack, p_actual) : p_actual;
        const auto out = controller.on_observation(k, p_observed);
        const BodyVelocity q_received = attack ? attack_command(*attack, out.q_cmd) : out.q_cmd;

        if (k % stride == 0) {
            TraceRow row;
            row.t = static_cast<double>(k) * cfg.dt;
            row.p_actual = p_actual;
            row.p_observed = p_observed;
            row.q_cmd = out.q_cmd;
            row.q_received = q_received;
            row.e_observed = out.e;
            row.V = out.V;
            row.phi_plant = plant.phi();
            row.phi_ctrl = out.phi_ctrl;
            trace.rows.push_back(row);
        }
        if (k < last) plant.apply(q_received);
    }
    return trace;
}

UndetectabilityReport undetectability_report(const SimTrace& attacked, const SimTrace& nominal,
                                             const AffineAttack& attack, double tol)
{
    if (attacked.rows.size() != nominal.rows.size()) {
        throw std::invalid_argument("undetectability_report: traces have different lengths");
    }
    UndetectabilityReport rep;
    for (std::size_t i = 0; i < attacked.rows.size(); ++i) {
        const auto& a = attacked.rows[i];
        const auto& n = nominal.rows[i];
        if (std::abs(a.t - n.t) > 1e-12) {
            throw std::invalid_argument("undetectability_report: time grids differ at row " + std::to_string(i));
        }
        rep.sup_obs_dev = std::max(rep.sup_obs_dev, (a.p_observed.vec() - n.p_observed.vec()).lpNorm<Eigen::Infinity>());
        const Posture mapped = unattack_state(attack, n.p_actual);
        rep.sup_actual_dev = std::max(rep.sup_actual_dev, (a.p_actual.vec() - mapped.vec()).lpNorm<Eigen::Infinity>());
    }
    rep.verdict = rep.sup_obs_dev <= tol;
    return rep;
}

ErrorSeries error_series(const SimTrace& trace)
{
    ErrorSeries s;
    for (const auto& r : trace.rows) {
        s.t.push_back(r.t);
        s.xe.push_back(r.e_observed.xe);
        s.ye.push_back(r.e_observed.ye);
        s.thetae.push_back(r.e_observed.thetae);
    }
    return s;
}

void write_trace_csv(std::ostream& os, const SimTrace& trace) { os << trace_csv(trace); }

std::string trace_csv(const SimTrace& trace)
{
    std::string out = kTraceCsvHeader;
    out += '\n';
    for (const auto& r : trace.rows) {
        const auto cols = flatten(r);
        for (std::size_t c = 0; c < cols.size(); ++c) {
            if (c) out += ',';
            append17(out, cols[c]);
        }
        out += '\n';
    }
    return out;
}

SimTrace read_trace_csv(std::istream& is)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("trace csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kTraceCsvHeader) throw std::invalid_argument("trace csv: unexpected header");

    SimTrace trace;
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        const auto fields = split_csv(line);
        if (fields.size() != kTraceColumns) {
            throw std::invalid_argument("trace csv: line " + std::to_string(lineno) + " has " +
                                        std::to_string(fields.size()) + " fields");
        }
        std::array<double, kTraceColumns> cols{};
        for (std::size_t c = 0; c < kTraceColumns; ++c) cols[c] = parse_double(fields[c]);
        trace.rows.push_back(unflatten(cols));
    }
    return trace;
}

nlohmann::json to_json(const SimConfig& cfg)
{
    return {
        {"ref", {{"v_ref", cfg.ref.v_ref}, {"omega_amp", cfg.ref.omega_amp}, {"omega_period", cfg.ref.omega_period}}},
        {"gains", {{"kx", cfg.gains.kx}, {"ky", cfg.gains.ky}, {"ktheta", cfg.gains.ktheta}}},
        {"p0", {cfg.p0.x, cfg.p0.y, cfg.p0.theta}},
        {"dt", cfg.dt},
        {"log_stride", cfg.log_stride},
        {"duration", cfg.duration},
    };
}

namespace {

void reject_unknown(const nlohmann::json& j, std::initializer_list<std::string_view> known, const std::string& where)
{
    for (const auto& [key, val] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw std::invalid_argument(where + ": unknown field '" + key + "'");
        }
    }
}

double number_field(const nlohmann::json& j, const char* key, double fallback, const std::string& where)
{
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw std::invalid_argument(where + "." + key + " must be a number");
    return j[key].get<double>();
}

}  // namespace

SimConfig sim_config_from_json(const nlohmann::json& j)
{
    if (!j.is_object()) throw std::invalid_argument("sim: expected an object");
    reject_unknown(j, {"ref", "gains", "p0", "dt", "log_stride", "duration"}, "sim");
    SimConfig cfg;
    if (j.contains("ref")) {
        const auto& r = j["ref"];
        reject_unknown(r, {"v_ref", "omega_amp", "omega_period"}, "sim.ref");
        cfg.ref.v_ref = number_field(r, "v_ref", cfg.ref.v_ref, "sim.ref");
        cfg.ref.omega_amp = number_field(r, "omega_amp", cfg.ref.omega_amp, "sim.ref");
        cfg.ref.omega_period = number_field(r, "omega_period", cfg.ref.omega_period, "sim.ref");
    }
    if (j.contains("gains")) {
        const auto& g = j["gains"];
        reject_unknown(g, {"kx", "ky", "ktheta"}, "sim.gains");
        cfg.gains.kx = number_field(g, "kx", cfg.gains.kx, "sim.gains");
        cfg.gains.ky = number_field(g, "ky", cfg.gains.ky, "sim.gains");
        cfg.gains.ktheta = number_field(g, "ktheta", cfg.gains.ktheta, "sim.gains");
    }
    if (j.contains("p0")) {
        const auto& p = j["p0"];
        if (!p.is_array() || p.size() != 3) throw std::invalid_argument("sim.p0 must hold 3 numbers");
        cfg.p0 = {p[0].get<double>(), p[1].get<double>(), p[2].get<double>()};
    }
    cfg.dt = number_field(j, "dt", cfg.dt, "sim");
    cfg.duration = number_field(j, "duration", cfg.duration, "sim");
    if (j.contains("log_stride")) {
        if (!j["log_stride"].is_number_integer()) throw std::invalid_argument("sim.log_stride must be an integer");
        cfg.log_stride = j["log_stride"].get<int>();
    }
    cfg.validate();
    return cfg;
}

std::string config_digest(const SimConfig& cfg)
{
    const std::string text = to_json(cfg).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (const unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = hex[h & 0xF];
    return out;
}

double max_field_diff(const SimTrace& a, const SimTrace& b)
{
    if (a.rows.size() != b.rows.size()) throw std::invalid_argument("max_field_diff: traces have different lengths");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        const auto ca = flatten(a.rows[i]);
        const auto cb = flatten(b.rows[i]);
        for (std::size_t c = 0; c < kTraceColumns; ++c) worst = std::max(worst, std::abs(ca[c] - cb[c]));
    }
    return worst;
}

}  // namespace fdia_lab
