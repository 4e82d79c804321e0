#include "fdia_lab/vulncheck.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <stdexcept>

namespace fdia_lab {

namespace {

std::vector<double> integer_grid(double lo, double hi, double step)
{
    const auto inv = std::llround(1.0 / step);
    const auto k0 = std::llround(lo * static_cast<double>(inv));
    const auto k1 = std::llround(hi * static_cast<double>(inv));
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(k1 - k0 + 1));
    for (auto k = k0; k <= k1; ++k) g.push_back(static_cast<double>(k) / static_cast<double>(inv));
    return g;
}

const char* superscript(int k)
{
    switch (k) {
    case 2: return "²";
    case 3: return "³";
    case 4: return "⁴";
    default: return "";
    }
}

std::string describe_family(const std::vector<std::pair<double, double>>& cands)
{
    for (int k = 1; k <= 4; ++k) {
        const bool fits = std::all_of(cands.begin(), cands.end(), [k](const auto& ab) {
            return std::abs(ab.first * std::pow(ab.second, k) - 1.0) <= 1e-6;
        });
        if (fits) return std::string("αβ") + superscript(k) + " = 1";
    }
    return "one-parameter family α(β)";
}

}  // namespace

double ScalarFamily::operator()(double x) const
{
    switch (tag) {
    case FamilyTag::Linear: return c * x;
    case FamilyTag::Cosine: return std::cos(x);
    case FamilyTag::Sine: return std::sin(x);
    case FamilyTag::Quadratic: return c * x * x;
    case FamilyTag::Exponential: return c * std::exp(x);
    }
    return 0.0;
}

std::string ScalarFamily::name() const
{
    switch (tag) {
    case FamilyTag::Linear: return "linear";
    case FamilyTag::Cosine: return "cosine";
    case FamilyTag::Sine: return "sine";
    case FamilyTag::Quadratic: return "quadratic";
    case FamilyTag::Exponential: return "exponential";
    }
    return "unknown";
}

std::vector<double> default_grid(const ScalarFamily& family)
{
    if (family.tag == FamilyTag::Cosine || family.tag == FamilyTag::Sine) {
        const auto n = static_cast<long long>(std::floor(2.0 * std::numbers::pi / 0.01));
        std::vector<double> g;
        for (long long k = -n; k <= n; ++k) g.push_back(static_cast<double>(k) / 100.0);
        return g;
    }
    return integer_grid(-2.0, 2.0, 0.01);
}

double attack_residual(const ScalarFamily& family, double alpha, double beta, const std::vector<double>& grid)
{
    if (grid.empty()) throw std::invalid_argument("attack_residual: empty grid");
    double worst = 0.0;
    for (const double x : grid) worst = std::max(worst, std::abs(alpha * family(beta * x) - family(x)));
    return worst;
}

std::string_view to_string(VulnClass c)
{
    switch (c) {
    case VulnClass::ContinuousFamily: return "continuous";
    case VulnClass::DiscreteNontrivial: return "discrete";
    case VulnClass::TrivialOnly: return "trivial-only";
    }
    return "trivial-only";
}

VulnVerdict classify(const ScalarFamily& family, double tol, const SearchRanges& ranges)
{
    if (!(tol > 0)) throw std::invalid_argument("classify: tol must be positive");
    if (!(ranges.step > 0)) throw std::invalid_argument("classify: step must be positive");

    const auto grid = default_grid(family);
    std::vector<double> g0(grid.size());
    std::transform(grid.begin(), grid.end(), g0.begin(), [&](double x) { return family(x); });

    VulnVerdict out;
    out.residual = std::numeric_limits<double>::infinity();
    std::vector<double> gb(grid.size());
    for (const double beta : integer_grid(ranges.beta_lo, ranges.beta_hi, ranges.step)) {
        if (std::abs(beta) < 0.5 * ranges.step) continue;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            gb[i] = family(beta * grid[i]);
            num += g0[i] * gb[i];
            den += gb[i] * gb[i];
        }
        if (den == 0.0) continue;
        const double alpha = num / den;
        if (alpha == 0.0 || alpha < ranges.alpha_lo || alpha > ranges.alpha_hi) continue;
        if (std::abs(beta - 1.0) < 0.5 * ranges.step && std::abs(alpha - 1.0) <= 1e-6) continue;

        double res = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) res = std::max(res, std::abs(alpha * gb[i] - g0[i]));
        out.residual = std::min(out.residual, res);
        if (res <= tol) out.candidates.emplace_back(alpha, beta);
    }

    std::set<double> betas;
    for (const auto& ab : out.candidates) betas.insert(ab.second);
    if (betas.size() >= 10) {
        out.cls = VulnClass::ContinuousFamily;
        out.constraint = describe_family(out.candidates);
    } else if (!out.candidates.empty()) {
        out.cls = VulnClass::DiscreteNontrivial;
    } else {
        out.cls = VulnClass::TrivialOnly;
    }
    if (!std::isfinite(out.residual)) out.residual = 0.0;
    return out;
}

std::vector<ScalarFamily> representative_families()
{
    return {{FamilyTag::Linear, 1.0}, {FamilyTag::Cosine, 1.0}, {FamilyTag::Sine, 1.0},
            {FamilyTag::Quadratic, 1.0}, {FamilyTag::Exponential, 1.0}};
}

}  // namespace fdia_lab
