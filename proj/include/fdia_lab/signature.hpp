#pragma once

// Polynomial state-monitoring signature Phi(x, y) = sum c_ij x^i y^j.

#include <map>
#include <utility>

#include <json.hpp>

namespace fdia_lab {

using Exponents = std::pair<int, int>;

struct PolySignature {
    std::map<Exponents, double> terms;
    int max_degree = 4;

    double coefficient(int i, int j) const;
    int degree() const;
};

/// x^4 + y^4 + (x - 50xy)^2 + (xy - 5y)^2, expanded.
PolySignature default_signature();

double eval(const PolySignature& sig, double x, double y);

/// Checks Phi >= 0 on the square [-half_width, half_width]^2 at the given
/// resolution, and reports whether the origin is the only grid zero.
struct GridSignCheck {
    bool nonnegative = true;
    bool zero_only_at_origin = true;
    double min_value = 0.0;
};
GridSignCheck check_grid_sign(const PolySignature& sig, double half_width = 1.0, double step = 0.01);

/// JSON object mapping "i,j" to coefficients.
nlohmann::json to_json(const PolySignature& sig);
PolySignature signature_from_json(const nlohmann::json& j, int max_degree = 4);

}  // namespace fdia_lab
