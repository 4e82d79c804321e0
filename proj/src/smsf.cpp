#include "fdia_lab/smsf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdia_lab {

AffineFit affine_fit(std::span<const std::pair<double, double>> pairs)
{
    if (pairs.size() < 2) throw std::invalid_argument("affine_fit: need at least two pairs");

    double in_min = pairs.front().first, in_max = in_min;
    double out_min = pairs.front().second, out_max = out_min;
    double mean_in = 0.0, mean_out = 0.0;
    for (const auto& [a, b] : pairs) {
        in_min = std::min(in_min, a);
        in_max = std::max(in_max, a);
        out_min = std::min(out_min, b);
        out_max = std::max(out_max, b);
        mean_in += a;
        mean_out += b;
    }
    if (in_max - in_min < 1e-12) throw std::invalid_argument("affine_fit: degenerate phi_in spread");

    const auto n = static_cast<double>(pairs.size());
    mean_in /= n;
    mean_out /= n;
    double sxx = 0.0, sxy = 0.0;
    for (const auto& [a, b] : pairs) {
        sxx += (a - mean_in) * (a - mean_in);
        sxy += (a - mean_in) * (b - mean_out);
    }

    AffineFit fit;
    fit.s_phi = sxy / sxx;
    fit.d_phi = mean_out - fit.s_phi * mean_in;

    double sse = 0.0;
    for (const auto& [a, b] : pairs) {
        const double r = b - (fit.s_phi * a + fit.d_phi);
        sse += r * r;
    }
    const double rmse = std::sqrt(sse / n);
    const double range = out_max - out_min;
    if (range > 0.0) {
        fit.nrmse = rmse / range;
    } else {
        fit.nrmse = rmse == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    return fit;
}

ResilienceVerdict resilience_check(const PolySignature& sig, const AffineAttack& attack, const SimTrace& trace,
                                   double tol)
{
    std::vector<std::pair<double, double>> pairs;
    pairs.reserve(trace.rows.size());
    for (const auto& r : trace.rows) {
        const double dev = (attack_state(attack, r.p_actual).vec() - r.p_observed.vec()).lpNorm<Eigen::Infinity>();
        if (dev > 1e-9) throw std::invalid_argument("resilience_check: trace was not produced under this attack");
        pairs.emplace_back(eval(sig, r.p_actual.x, r.p_actual.y), eval(sig, r.p_observed.x, r.p_observed.y));
    }
    ResilienceVerdict v;
    v.fit = affine_fit(pairs);
    const bool trivial = std::abs(v.fit.s_phi - 1.0) <= tol && std::abs(v.fit.d_phi) <= tol;
    v.resilient = !(v.fit.nrmse <= tol && !trivial);
    return v;
}

void DetectionConfig::validate() const
{
    if (!(threshold > 0)) throw std::invalid_argument("DetectionConfig: threshold must be positive");
    if (window < 1) throw std::invalid_argument("DetectionConfig: window must be >= 1");
}

MonitorResult monitor_streams(std::span<const double> t, std::span<const double> received,
                              std::span<const double> expected, const DetectionConfig& cfg)
{
    cfg.validate();
    if (t.size() != received.size() || t.size() != expected.size()) {
        throw std::invalid_argument("monitor: stream lengths differ");
    }
    MonitorResult m;
    m.t.assign(t.begin(), t.end());
    m.residual.reserve(t.size());
    int run = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = std::abs(received[i] - expected[i]);
        m.residual.push_back(r);
        m.peak = std::max(m.peak, r);
        if (r > cfg.threshold) {
            if (!m.first_exceed_time) m.first_exceed_time = t[i];
            if (++run >= cfg.window && !m.flag) {
                m.flag = true;
                m.flag_time = t[i];
            }
        } else {
            run = 0;
        }
    }
    return m;
}

MonitorResult monitor(const SimTrace& trace, const PolySignature& sig, const std::optional<AffineFit>& channel,
                      const DetectionConfig& cfg)
{
    std::vector<double> t, received, expected;
    t.reserve(trace.rows.size());
    received.reserve(trace.rows.size());
    expected.reserve(trace.rows.size());
    for (const auto& r : trace.rows) {
        double plant = eval(sig, r.p_actual.x, r.p_actual.y);
        if (channel) plant = channel->s_phi * plant + channel->d_phi;
        t.push_back(r.t);
        received.push_back(plant);
        expected.push_back(eval(sig, r.p_observed.x, r.p_observed.y));
    }
    return monitor_streams(t, received, expected, cfg);
}

MonitorResult monitor_recorded(const SimTrace& trace, const DetectionConfig& cfg)
{
    std::vector<double> t, received, expected;
    for (const auto& r : trace.rows) {
        t.push_back(r.t);
        received.push_back(r.phi_plant);
        expected.push_back(r.phi_ctrl);
    }
    return monitor_streams(t, received, expected, cfg);
}

}  // namespace fdia_lab
