#pragma once

// State-monitoring signature functions: affine-resilience checks and the
// plant/controller signature comparison.

#include "fdia_lab/signature.hpp"
#include "fdia_lab/simloop.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace fdia_lab {

/// phi_out ~ s_phi * phi_in + d_phi.
struct AffineFit {
    double s_phi = 1.0;
    double d_phi = 0.0;
    double nrmse = 0.0;
};

/// Ordinary least squares. nrmse = RMSE / (max(phi_out) - min(phi_out)).
/// Throws std::invalid_argument for fewer than two pairs or a phi_in range
/// below 1e-12.
AffineFit affine_fit(std::span<const std::pair<double, double>> pairs);

struct ResilienceVerdict {
    bool resilient = true;
    AffineFit fit;
};

/// Fits Phi(p_observed) ~ s_phi * Phi(p_actual) + d_phi along the trace, i.e.
/// the channel map an attacker would need on the plant-side stream.
/// Vulnerable when a nontrivial such map fits within tol.
ResilienceVerdict resilience_check(const PolySignature& sig, const AffineAttack& attack, const SimTrace& trace,
                                   double tol);

struct DetectionConfig {
    double threshold = 1e-6;  ///< epsilon
    int window = 10;          ///< consecutive samples above threshold

    void validate() const;
};

struct MonitorResult {
    std::vector<double> t;
    std::vector<double> residual;
    bool flag = false;
    std::optional<double> first_exceed_time;  ///< first sample with r > epsilon
    std::optional<double> flag_time;          ///< sample completing the window
    double peak = 0.0;
};

/// r(t) = |received(t) - expected(t)|.
MonitorResult monitor_streams(std::span<const double> t, std::span<const double> received,
                              std::span<const double> expected, const DetectionConfig& cfg);

/// received = channel(Phi(p_actual)), expected = Phi(p_observed).
MonitorResult monitor(const SimTrace& trace, const PolySignature& sig, const std::optional<AffineFit>& channel,
                      const DetectionConfig& cfg);

/// Uses the recorded phi_plant / phi_ctrl columns (e.g. a networked trace where
/// the channel attack already happened on the wire).
MonitorResult monitor_recorded(const SimTrace& trace, const DetectionConfig& cfg);

}  // namespace fdia_lab
