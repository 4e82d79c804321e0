#include "fdia_lab/fdia.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace fdia_lab {

namespace {

constexpr double kZeroTol = 1e-12;

Vector3<double> json_vec3(const nlohmann::json& j, const char* key)
{
    const auto& arr = j.at(key);
    if (!arr.is_array() || arr.size() != 3) {
        throw std::invalid_argument(std::string("attack json: '") + key + "' must hold 3 numbers");
    }
    return {arr[0].get<double>(), arr[1].get<double>(), arr[2].get<double>()};
}

}  // namespace

std::string_view to_string(AttackTag tag)
{
    switch (tag) {
    case AttackTag::Identity: return "identity";
    case AttackTag::Reflection: return "reflection";
    case AttackTag::Scaling: return "scaling";
    case AttackTag::Custom: return "custom";
    }
    return "custom";
}

AttackTag attack_tag_from_string(std::string_view s)
{
    if (s == "identity") return AttackTag::Identity;
    if (s == "reflection") return AttackTag::Reflection;
    if (s == "scaling") return AttackTag::Scaling;
    if (s == "custom") return AttackTag::Custom;
    throw std::invalid_argument("unknown attack kind '" + std::string(s) + "'");
}

void validate(const AffineAttack& a)
{
    if (!a.s_x.allFinite() || !a.d_x.allFinite() || !a.s_u.allFinite() || !a.d_u.allFinite()) {
        throw std::invalid_argument("attack: non-finite entry");
    }
    if (std::abs(a.s_x.determinant()) <= kZeroTol) {
        throw std::invalid_argument("attack: S_x is singular");
    }
    const auto tag = a.kind.tag;
    if ((tag == AttackTag::Reflection || tag == AttackTag::Scaling) && a.kind.beta11 == 0.0) {
        throw std::invalid_argument("attack: beta11 must be nonzero");
    }
}

AffineAttack identity_attack() { return AffineAttack{}; }

AffineAttack build_reflection(double beta11, const Posture& p0)
{
    if (beta11 == 0.0 || !std::isfinite(beta11)) {
        throw std::invalid_argument("build_reflection: beta11 must be finite and nonzero");
    }
    const double c = std::cos(2.0 * p0.theta) / beta11;
    const double s = std::sin(2.0 * p0.theta) / beta11;

    AffineAttack a;
    a.s_x << c, s, 0.0,
             s, -c, 0.0,
             0.0, 0.0, -1.0;
    a.d_x = (Matrix3<double>::Identity() - a.s_x) * p0.vec();
    a.s_u << beta11, 0.0,
             0.0, -1.0;
    a.d_u.setZero();
    a.kind = {AttackTag::Reflection, beta11};
    return a;
}

AffineAttack build_scaling(double beta11, const Posture& p0)
{
    if (beta11 == 0.0 || !std::isfinite(beta11)) {
        throw std::invalid_argument("build_scaling: beta11 must be finite and nonzero");
    }
    AffineAttack a;
    a.s_x = Vector3<double>(1.0 / beta11, 1.0 / beta11, 1.0).asDiagonal();
    a.d_x = (Matrix3<double>::Identity() - a.s_x) * p0.vec();
    a.s_u = Vector2<double>(beta11, 1.0).asDiagonal();
    a.d_u.setZero();
    a.kind = {AttackTag::Scaling, beta11};
    return a;
}

double check_condition1(const AffineAttack& a, const Posture& p0)
{
    return ((Matrix3<double>::Identity() - a.s_x) * p0.vec() - a.d_x).lpNorm<Eigen::Infinity>();
}

double check_condition2(const AffineAttack& a, int n_samples, std::uint64_t seed)
{
    if (n_samples < 1) throw std::invalid_argument("check_condition2: n_samples must be >= 1");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> theta_dist(-2.0 * std::numbers::pi, 2.0 * std::numbers::pi);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double worst = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        const double theta = theta_dist(rng);
        const double v = unit(rng);
        const double w = unit(rng);
        const Vector2<double> q(v, w);
        const double theta_obs = a.s_x(2, 2) * theta + a.d_x(2);
        const Vector3<double> attacked = a.s_x * (jacobian(theta) * (a.s_u * q + a.d_u));
        const Vector3<double> nominal = jacobian(theta_obs) * q;
        worst = std::max(worst, (attacked - nominal).lpNorm<Eigen::Infinity>());
    }
    return worst;
}

SuVerdict admissible_su(const Matrix2<double>& s_u)
{
    if (std::abs(s_u(0, 1)) > kZeroTol) return {false, 0.0, "β₁₂≠0"};
    if (std::abs(s_u(1, 0)) > kZeroTol) return {false, 0.0, "β₂₁≠0"};
    if (std::abs(std::abs(s_u(1, 1)) - 1.0) > kZeroTol) return {false, 0.0, "β₂₂∉{−1,1}"};
    if (std::abs(s_u(0, 0)) <= kZeroTol) return {false, 0.0, "β₁₁=0"};
    return {true, s_u(0, 0), {}};
}

nlohmann::json to_json(const AffineAttack& a)
{
    nlohmann::json j;
    auto& sx = j["s_x"] = nlohmann::json::array();
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) sx.push_back(a.s_x(r, c));
    j["d_x"] = {a.d_x(0), a.d_x(1), a.d_x(2)};
    j["s_u"] = {a.s_u(0, 0), a.s_u(0, 1), a.s_u(1, 0), a.s_u(1, 1)};
    j["d_u"] = {a.d_u(0), a.d_u(1)};
    j["kind"] = std::string(to_string(a.kind.tag));
    j["beta11"] = a.kind.beta11;
    return j;
}

AffineAttack attack_from_json(const nlohmann::json& j)
{
    AffineAttack a;
    const auto& sx = j.at("s_x");
    if (!sx.is_array() || sx.size() != 9) throw std::invalid_argument("attack json: 's_x' must hold 9 numbers");
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) a.s_x(r, c) = sx[static_cast<std::size_t>(3 * r + c)].get<double>();
    a.d_x = json_vec3(j, "d_x");
    const auto& su = j.at("s_u");
    if (!su.is_array() || su.size() != 4) throw std::invalid_argument("attack json: 's_u' must hold 4 numbers");
    a.s_u << su[0].get<double>(), su[1].get<double>(), su[2].get<double>(), su[3].get<double>();
    const auto& du = j.at("d_u");
    if (!du.is_array() || du.size() != 2) throw std::invalid_argument("attack json: 'd_u' must hold 2 numbers");
    a.d_u << du[0].get<double>(), du[1].get<double>();
    a.kind.tag = attack_tag_from_string(j.value("kind", std::string("custom")));
    a.kind.beta11 = j.value("beta11", a.s_u(0, 0));
    validate(a);
    return a;
}

}  // namespace fdia_lab
