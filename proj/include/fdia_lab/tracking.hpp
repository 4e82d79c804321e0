#pragma once

// Reference generation, Kanayama tracking law, and its Lyapunov function.

#include "fdia_lab/kinematics.hpp"

#include <cmath>
#include <cstddef>
#include <vector>

namespace fdia_lab {

template <typename Scalar>
struct ControllerGainsT {
    Scalar kx{2};
    Scalar ky{2000};
    Scalar ktheta{100};

    bool valid() const { return kx > 0 && ky > 0 && ktheta > 0; }
};

/// Posture error expressed in the robot body frame.
template <typename Scalar>
struct PostureErrorT {
    Scalar xe{0};
    Scalar ye{0};
    Scalar thetae{0};

    bool operator==(const PostureErrorT&) const = default;
};

using ControllerGains = ControllerGainsT<double>;
using PostureError = PostureErrorT<double>;

struct RefSample {
    Posture pose;
    BodyVelocity feedforward;
};

/// Sinusoidal-turn reference: v_r constant, omega_r = amp * sin(2 pi t / period).
struct RefConfig {
    double v_ref = 0.02;
    double omega_amp = 0.3;
    double omega_period = 4.0;
    double duration = 30.0;
    double dt = 0.01;  ///< integration step of the reference table

    void validate() const;
};

/// Reference posture table integrated from the origin under the feedforward.
/// Immutable after construction.
class ReferenceTrajectory {
public:
    explicit ReferenceTrajectory(const RefConfig& cfg);

    const RefConfig& config() const { return cfg_; }
    std::size_t ticks() const { return poses_.size(); }

    BodyVelocity feedforward(double t) const;

    /// Exact table entry at t = k * dt.
    RefSample at_tick(std::size_t k) const;

    /// Any t in [0, duration]; off-grid times take a partial RK4 step from
    /// the preceding node.
    RefSample sample(double t) const;

private:
    RefConfig cfg_;
    std::vector<Posture> poses_;
};

RefSample gen_reference(const ReferenceTrajectory& ref, double t);

template <typename Scalar>
PostureErrorT<Scalar> body_frame_error(const PostureT<Scalar>& ref, const PostureT<Scalar>& cur)
{
    using std::cos;
    using std::sin;
    const Scalar c = cos(cur.theta);
    const Scalar s = sin(cur.theta);
    const Scalar dx = ref.x - cur.x;
    const Scalar dy = ref.y - cur.y;
    return {c * dx + s * dy, -s * dx + c * dy, ref.theta - cur.theta};
}

/// Inverse of body_frame_error: recovers the reference posture.
template <typename Scalar>
PostureT<Scalar> reconstruct_reference(const PostureT<Scalar>& cur, const PostureErrorT<Scalar>& e)
{
    using std::cos;
    using std::sin;
    const Scalar c = cos(cur.theta);
    const Scalar s = sin(cur.theta);
    return {cur.x + c * e.xe - s * e.ye, cur.y + s * e.xe + c * e.ye, cur.theta + e.thetae};
}

template <typename Scalar>
BodyVelocityT<Scalar> kanayama(const BodyVelocityT<Scalar>& ff, const PostureErrorT<Scalar>& e,
                               const ControllerGainsT<Scalar>& g)
{
    using std::cos;
    using std::sin;
    return {ff.v * cos(e.thetae) + g.kx * e.xe,
            ff.omega + ff.v * (g.ky * e.ye + g.ktheta * sin(e.thetae))};
}

template <typename Scalar>
Scalar lyapunov(const PostureErrorT<Scalar>& e, const ControllerGainsT<Scalar>& g)
{
    using std::cos;
    return Scalar(0.5) * (e.xe * e.xe + e.ye * e.ye) + (Scalar(1) - cos(e.thetae)) / g.ky;
}

}  // namespace fdia_lab
