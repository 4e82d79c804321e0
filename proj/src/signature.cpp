#include "fdia_lab/signature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fdia_lab {

namespace {

double ipow(double base, int e)
{
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

}  // namespace

double PolySignature::coefficient(int i, int j) const
{
    const auto it = terms.find({i, j});
    return it == terms.end() ? 0.0 : it->second;
}

int PolySignature::degree() const
{
    int d = 0;
    for (const auto& [ex, c] : terms)
        if (c != 0.0) d = std::max(d, ex.first + ex.second);
    return d;
}

PolySignature default_signature()
{
    PolySignature s;
    s.terms = {
        {{4, 0}, 1.0},    {{0, 4}, 1.0},     {{2, 0}, 1.0},    {{0, 2}, 25.0},
        {{2, 1}, -100.0}, {{1, 2}, -10.0},   {{2, 2}, 2501.0},
    };
    s.max_degree = 4;
    return s;
}

double eval(const PolySignature& sig, double x, double y)
{
    double sum = 0.0;
    for (const auto& [ex, c] : sig.terms) sum += c * ipow(x, ex.first) * ipow(y, ex.second);
    return sum;
}

GridSignCheck check_grid_sign(const PolySignature& sig, double half_width, double step)
{
    GridSignCheck out;
    const auto n = static_cast<int>(std::llround(2.0 * half_width / step));
    out.min_value = eval(sig, -half_width, -half_width);
    for (int a = 0; a <= n; ++a) {
        for (int b = 0; b <= n; ++b) {
            // integer offsets keep the origin exactly on the grid
            const double x = static_cast<double>(a - n / 2) * step;
            const double y = static_cast<double>(b - n / 2) * step;
            const double v = eval(sig, x, y);
            out.min_value = std::min(out.min_value, v);
            if (v < 0.0) out.nonnegative = false;
            if (v == 0.0 && !(a == n / 2 && b == n / 2)) out.zero_only_at_origin = false;
        }
    }
    return out;
}

nlohmann::json to_json(const PolySignature& sig)
{
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [ex, c] : sig.terms) j[std::to_string(ex.first) + "," + std::to_string(ex.second)] = c;
    return j;
}

PolySignature signature_from_json(const nlohmann::json& j, int max_degree)
{
    if (!j.is_object()) throw std::invalid_argument("signature json: expected an object");
    PolySignature sig;
    sig.max_degree = max_degree;
    for (const auto& [key, val] : j.items()) {
        const auto comma = key.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("signature json: bad key '" + key + "'");
        const int i = std::stoi(key.substr(0, comma));
        const int k = std::stoi(key.substr(comma + 1));
        if (i < 0 || k < 0) throw std::invalid_argument("signature json: negative exponent in '" + key + "'");
        if (i + k > max_degree) throw std::invalid_argument("signature json: term '" + key + "' exceeds max degree");
        sig.terms[{i, k}] = val.get<double>();
    }
    if (sig.coefficient(0, 0) != 0.0) throw std::invalid_argument("signature json: constant term must be zero");
    return sig;
}

}  // namespace fdia_lab
