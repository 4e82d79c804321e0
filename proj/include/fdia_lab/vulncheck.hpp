#pragma once

// Numeric classification of scalar functions g by the linear attacks
// alpha * g(beta * x) that leave them unchanged.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdia_lab {

enum class FamilyTag { Linear, Cosine, Sine, Quadratic, Exponential };

struct ScalarFamily {
    FamilyTag tag = FamilyTag::Linear;
    double c = 1.0;  ///< coefficient for Linear, Quadratic, Exponential

    double operator()(double x) const;
    std::string name() const;
};

/// theta in [-2pi, 2pi] for trigonometric families, x in [-2, 2] otherwise;
/// step 0.01.
std::vector<double> default_grid(const ScalarFamily& family);

/// max over grid of |alpha g(beta x) - g(x)|.
double attack_residual(const ScalarFamily& family, double alpha, double beta, const std::vector<double>& grid);

struct SearchRanges {
    double alpha_lo = -3.0;
    double alpha_hi = 3.0;
    double beta_lo = -3.0;
    double beta_hi = 3.0;
    double step = 0.001;
};

enum class VulnClass { ContinuousFamily, DiscreteNontrivial, TrivialOnly };

std::string_view to_string(VulnClass c);

struct VulnVerdict {
    VulnClass cls = VulnClass::TrivialOnly;
    std::string constraint;                           ///< ContinuousFamily only
    std::vector<std::pair<double, double>> candidates;  ///< (alpha, beta)
    double residual = 0.0;                            ///< best nontrivial candidate
};

/// Scans beta on the search grid; for each beta the matching alpha is the
/// least-squares optimum, kept when inside the alpha range with residual <= tol.
/// (1, 1) is never reported. Ten or more distinct betas make a continuous family.
VulnVerdict classify(const ScalarFamily& family, double tol = 1e-9, const SearchRanges& ranges = {});

/// The five representative families in a fixed order.
std::vector<ScalarFamily> representative_families();

}  // namespace fdia_lab
