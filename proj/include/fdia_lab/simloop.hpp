#pragma once

// Closed-loop execution: controller reads alpha(p), plant receives beta(q).

#include "fdia_lab/fdia.hpp"
#include "fdia_lab/signature.hpp"
#include "fdia_lab/tracking.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace fdia_lab {

struct SimConfig {
    RefConfig ref{};
    ControllerGains gains{};
    Posture p0{0.0, 0.02, 0.0};
    double dt = 0.01;
    int log_stride = 2;
    double duration = 30.0;

    void validate() const;

    /// Reference config with duration and step taken from this config.
    RefConfig effective_ref() const;
    std::size_t last_tick() const;
};

struct TraceRow {
    double t = 0.0;
    Posture p_actual;
    Posture p_observed;
    BodyVelocity q_cmd;
    BodyVelocity q_received;
    PostureError e_observed;
    double V = 0.0;
    double phi_plant = 0.0;
    double phi_ctrl = 0.0;

    bool operator==(const TraceRow&) const = default;
};

struct SimTrace {
    std::vector<TraceRow> rows;
    bool complete = true;
};

/// Controller half of the loop. Identical arithmetic in-process and over
/// the wire.
class ControllerCore {
public:
    struct Output {
        PostureError e;
        BodyVelocity q_cmd;
        double V = 0.0;
        double phi_ctrl = 0.0;
    };

    ControllerCore(const SimConfig& cfg, PolySignature sig);

    Output on_observation(std::size_t tick, const Posture& p_observed) const;

    const ReferenceTrajectory& reference() const { return ref_; }

private:
    ControllerGains gains_;
    ReferenceTrajectory ref_;
    PolySignature sig_;
};

/// Plant half of the loop.
class PlantCore {
public:
    PlantCore(const SimConfig& cfg, PolySignature sig);

    const Posture& posture() const { return p_; }
    double phi() const;
    void apply(const BodyVelocity& q_received);

private:
    Posture p_;
    double dt_;
    PolySignature sig_;
};

SimTrace run(const SimConfig& cfg, const std::optional<AffineAttack>& attack,
             const PolySignature& sig = default_signature());

struct UndetectabilityReport {
    double sup_obs_dev = 0.0;
    double sup_actual_dev = 0.0;
    bool verdict = true;
};

UndetectabilityReport undetectability_report(const SimTrace& attacked, const SimTrace& nominal,
                                             const AffineAttack& attack, double tol);

struct ErrorSeries {
    std::vector<double> t, xe, ye, thetae;
};

ErrorSeries error_series(const SimTrace& trace);

inline constexpr const char* kTraceCsvHeader =
    "t,x,y,theta,x_obs,y_obs,theta_obs,v_cmd,w_cmd,v_rx,w_rx,xe,ye,thetae,V,phi_plant,phi_ctrl";

void write_trace_csv(std::ostream& os, const SimTrace& trace);
std::string trace_csv(const SimTrace& trace);
SimTrace read_trace_csv(std::istream& is);

nlohmann::json to_json(const SimConfig& cfg);

/// Missing fields keep their defaults; unknown fields are rejected.
SimConfig sim_config_from_json(const nlohmann::json& j);

/// FNV-1a over the canonical JSON text; both ends of a networked run compare it.
std::string config_digest(const SimConfig& cfg);

/// Largest fieldwise absolute difference between two traces of equal length.
double max_field_diff(const SimTrace& a, const SimTrace& b);

}  // namespace fdia_lab
