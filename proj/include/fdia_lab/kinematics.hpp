#pragma once

// Unicycle kinematics: posture, body-frame velocity command, and a
// fixed-step RK4 integrator with zero-order-hold input.

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace fdia_lab {

template <typename Scalar>
using Vector2 = Eigen::Matrix<Scalar, 2, 1>;
template <typename Scalar>
using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar>
using Matrix2 = Eigen::Matrix<Scalar, 2, 2>;
template <typename Scalar>
using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;
template <typename Scalar>
using Matrix32 = Eigen::Matrix<Scalar, 3, 2>;

/// World-frame posture (x [m], y [m], theta [rad]).
/// theta is unwrapped: nothing in the library normalizes it.
template <typename Scalar>
struct PostureT {
    Scalar x{0};
    Scalar y{0};
    Scalar theta{0};

    Vector3<Scalar> vec() const { return Vector3<Scalar>(x, y, theta); }

    static PostureT from(const Vector3<Scalar>& p) { return {p(0), p(1), p(2)}; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(theta); }

    bool operator==(const PostureT&) const = default;
};

/// Body-frame command: linear v [m/s], angular omega [rad/s].
template <typename Scalar>
struct BodyVelocityT {
    Scalar v{0};
    Scalar omega{0};

    Vector2<Scalar> vec() const { return Vector2<Scalar>(v, omega); }

    static BodyVelocityT from(const Vector2<Scalar>& q) { return {q(0), q(1)}; }

    bool finite() const { return std::isfinite(v) && std::isfinite(omega); }

    bool operator==(const BodyVelocityT&) const = default;
};

using Posture = PostureT<double>;
using BodyVelocity = BodyVelocityT<double>;

/// Maps a body-frame command onto the posture rate.
template <typename Scalar>
Matrix32<Scalar> jacobian(Scalar theta)
{
    using std::cos;
    using std::sin;
    Matrix32<Scalar> J;
    J << cos(theta), Scalar(0),
         sin(theta), Scalar(0),
         Scalar(0),  Scalar(1);
    return J;
}

template <typename Scalar>
Vector3<Scalar> derivative(const Vector3<Scalar>& p, const Vector2<Scalar>& q)
{
    return jacobian(p(2)) * q;
}

template <typename Scalar>
Vector3<Scalar> derivative(const PostureT<Scalar>& p, const BodyVelocityT<Scalar>& q)
{
    return derivative<Scalar>(p.vec(), q.vec());
}

/// One classical RK4 step of length dt with q held constant.
template <typename Scalar>
PostureT<Scalar> rk4_step(const PostureT<Scalar>& p, const BodyVelocityT<Scalar>& q, Scalar dt)
{
    if (!(dt > Scalar(0))) {
        throw std::invalid_argument("rk4_step: dt must be positive");
    }
    const Vector3<Scalar> p0 = p.vec();
    const Vector2<Scalar> u = q.vec();
    const Scalar half = dt / Scalar(2);

    const Vector3<Scalar> k1 = derivative<Scalar>(p0, u);
    const Vector3<Scalar> k2 = derivative<Scalar>(p0 + half * k1, u);
    const Vector3<Scalar> k3 = derivative<Scalar>(p0 + half * k2, u);
    const Vector3<Scalar> k4 = derivative<Scalar>(p0 + dt * k3, u);

    const Vector3<Scalar> next = p0 + (dt / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
    return PostureT<Scalar>::from(next);
}

}  // namespace fdia_lab
