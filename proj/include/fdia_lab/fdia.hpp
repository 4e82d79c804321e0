#pragma once

// Affine false-data-injection attacks on the observation channel
// (p -> S_x p + d_x) and the command channel (q -> S_u q + d_u).

#include "fdia_lab/kinematics.hpp"

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace fdia_lab {

enum class AttackTag { Identity, Reflection, Scaling, Custom };

std::string_view to_string(AttackTag tag);
AttackTag attack_tag_from_string(std::string_view s);

struct AttackKind {
    AttackTag tag = AttackTag::Identity;
    double beta11 = 1.0;
};

template <typename Scalar>
struct AffineAttackT {
    Matrix3<Scalar> s_x = Matrix3<Scalar>::Identity();
    Vector3<Scalar> d_x = Vector3<Scalar>::Zero();
    Matrix2<Scalar> s_u = Matrix2<Scalar>::Identity();
    Vector2<Scalar> d_u = Vector2<Scalar>::Zero();
    AttackKind kind{};
};

using AffineAttack = AffineAttackT<double>;

/// Throws std::invalid_argument if S_x is singular or any entry is non-finite.
void validate(const AffineAttack& a);

AffineAttack identity_attack();

/// Reflection about the initial-heading line, linear speed scaled by beta11.
AffineAttack build_reflection(double beta11, const Posture& p0);

/// Path scaled by 1/beta11 about p0, linear speed scaled by beta11.
AffineAttack build_scaling(double beta11, const Posture& p0);

/// Observation-side map: what the controller sees.
template <typename Scalar>
PostureT<Scalar> attack_state(const AffineAttackT<Scalar>& a, const PostureT<Scalar>& p)
{
    return PostureT<Scalar>::from(a.s_x * p.vec() + a.d_x);
}

/// Inverse of attack_state: S_x^-1 (p - d_x).
template <typename Scalar>
PostureT<Scalar> unattack_state(const AffineAttackT<Scalar>& a, const PostureT<Scalar>& p)
{
    return PostureT<Scalar>::from(a.s_x.partialPivLu().solve(p.vec() - a.d_x));
}

/// Command-side map: what the plant receives.
template <typename Scalar>
BodyVelocityT<Scalar> attack_command(const AffineAttackT<Scalar>& a, const BodyVelocityT<Scalar>& q)
{
    return BodyVelocityT<Scalar>::from(a.s_u * q.vec() + a.d_u);
}

/// ||(I - S_x) p0 - d_x||_inf. Zero means the attacked and true initial
/// observations coincide.
double check_condition1(const AffineAttack& a, const Posture& p0);

/// Max over random (theta, q) of ||S_x J(theta) (S_u q + d_u) - J(theta~) q||_inf,
/// theta~ = S_x(2,2) theta + d_x(2). Samples theta in [-2pi, 2pi], v and omega in [-1, 1].
double check_condition2(const AffineAttack& a, int n_samples, std::uint64_t seed);

struct SuVerdict {
    bool admissible = false;
    double beta11 = 0.0;
    std::string reason;  ///< empty when admissible
};

SuVerdict admissible_su(const Matrix2<double>& s_u);

nlohmann::json to_json(const AffineAttack& a);
AffineAttack attack_from_json(const nlohmann::json& j);

}  // namespace fdia_lab
