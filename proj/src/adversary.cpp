#include "fdia_lab/adversary.hpp"

#include "fdia_lab/numfmt.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>

namespace fdia_lab {

namespace {

double ipow(double base, int e)
{
    double r = 1.0;
    for (int k = 0; k < e; ++k) r *= base;
    return r;
}

}  // namespace

std::string_view to_string(SampleSource s)
{
    switch (s) {
    case SampleSource::Trajectory: return "trajectory";
    case SampleSource::Spiral: return "spiral";
    case SampleSource::Grid: return "grid";
    }
    return "trajectory";
}

SampleSource sample_source_from_string(std::string_view s)
{
    if (s == "trajectory") return SampleSource::Trajectory;
    if (s == "spiral") return SampleSource::Spiral;
    if (s == "grid") return SampleSource::Grid;
    throw std::invalid_argument("unknown sample source '" + std::string(s) + "'");
}

void EstimatorConfig::validate() const
{
    if (degree < 1) throw std::invalid_argument("EstimatorConfig: degree must be >= 1");
    if (!(regularization >= 0.0)) throw std::invalid_argument("EstimatorConfig: regularization must be >= 0");
}

std::vector<Exponents> monomial_basis(int degree)
{
    if (degree < 0) throw std::invalid_argument("monomial_basis: degree must be >= 0");
    std::vector<Exponents> basis;
    for (int d = 0; d <= degree; ++d)
        for (int i = d; i >= 0; --i) basis.emplace_back(i, d - i);
    return basis;
}

PolySignature fit_signature(const SampleSet& samples, const EstimatorConfig& cfg)
{
    cfg.validate();
    const auto basis = monomial_basis(cfg.degree);
    const auto p = static_cast<Eigen::Index>(basis.size());
    const auto n = static_cast<Eigen::Index>(samples.count());
    if (n < p) {
        throw UnderdeterminedError("fit_signature: " + std::to_string(n) + " samples for " + std::to_string(p) +
                                   " basis terms");
    }

    const bool ridge = cfg.regularization > 0.0;
    const Eigen::Index rows = ridge ? n + p : n;
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(rows, p);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(rows);
    for (Eigen::Index r = 0; r < n; ++r) {
        const auto& s = samples.points[static_cast<std::size_t>(r)];
        for (Eigen::Index c = 0; c < p; ++c) {
            const auto& [i, j] = basis[static_cast<std::size_t>(c)];
            A(r, c) = ipow(s.x, i) * ipow(s.y, j);
        }
        b(r) = s.phi;
    }
    if (ridge) A.bottomRows(p).diagonal().setConstant(std::sqrt(cfg.regularization));

    // Equilibrate columns so the rank decision is scale-free.
    Eigen::VectorXd scale = A.colwise().norm().transpose();
    for (Eigen::Index c = 0; c < p; ++c) {
        if (scale(c) == 0.0) throw UnderdeterminedError("fit_signature: basis column is identically zero");
        A.col(c) /= scale(c);
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < p) {
        throw UnderdeterminedError("fit_signature: design matrix has rank " + std::to_string(qr.rank()) + " < " +
                                   std::to_string(p) + " (insufficient workspace coverage)");
    }
    const Eigen::VectorXd coef = qr.solve(b).cwiseQuotient(scale);

    PolySignature est;
    est.max_degree = cfg.degree;
    for (Eigen::Index c = 0; c < p; ++c) est.terms[basis[static_cast<std::size_t>(c)]] = coef(c);
    return est;
}

double nrmse(const PolySignature& estimate, const PolySignature& truth, const std::vector<Point2>& eval_set)
{
    if (eval_set.empty()) throw std::invalid_argument("nrmse: empty evaluation set");
    double lo = eval(truth, eval_set.front().first, eval_set.front().second);
    double hi = lo;
    double sse = 0.0;
    for (const auto& [x, y] : eval_set) {
        const double t = eval(truth, x, y);
        const double d = eval(estimate, x, y) - t;
        lo = std::min(lo, t);
        hi = std::max(hi, t);
        sse += d * d;
    }
    if (hi - lo <= 0.0) throw std::invalid_argument("nrmse: truth has zero range on the evaluation set");
    return std::sqrt(sse / static_cast<double>(eval_set.size())) / (hi - lo);
}

SampleSet spiral_samples(std::size_t n, double turns, double radius, const PolySignature& truth)
{
    if (n < 1) throw std::invalid_argument("spiral_samples: n must be >= 1");
    SampleSet set;
    set.source = SampleSource::Spiral;
    set.points.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double s = n == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(n - 1);
        const double r = radius * s;
        const double a = 2.0 * std::numbers::pi * turns * s;
        const double x = r * std::cos(a);
        const double y = r * std::sin(a);
        set.points.push_back({x, y, eval(truth, x, y)});
    }
    return set;
}

SampleSet grid_samples(std::size_t n, double lo, double hi, const PolySignature& truth)
{
    if (n < 2) throw std::invalid_argument("grid_samples: n must be >= 2");
    SampleSet set;
    set.source = SampleSource::Grid;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            const double x = lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(n - 1);
            const double y = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(n - 1);
            set.points.push_back({x, y, eval(truth, x, y)});
        }
    }
    return set;
}

SampleSet trajectory_samples(const SimTrace& trace, std::size_t n, const PolySignature& truth)
{
    if (n > trace.rows.size()) {
        throw std::invalid_argument("trajectory_samples: trace has only " + std::to_string(trace.rows.size()) + " rows");
    }
    SampleSet set;
    set.source = SampleSource::Trajectory;
    for (std::size_t k = 0; k < n; ++k) {
        const auto& p = trace.rows[k].p_actual;
        set.points.push_back({p.x, p.y, eval(truth, p.x, p.y)});
    }
    return set;
}

std::vector<Point2> bbox_grid(const std::vector<Point2>& cloud, std::size_t n, double inflate)
{
    if (cloud.empty()) throw std::invalid_argument("bbox_grid: empty point cloud");
    if (n < 2) throw std::invalid_argument("bbox_grid: n must be >= 2");
    double x0 = cloud.front().first, x1 = x0, y0 = cloud.front().second, y1 = y0;
    for (const auto& [x, y] : cloud) {
        x0 = std::min(x0, x);
        x1 = std::max(x1, x);
        y0 = std::min(y0, y);
        y1 = std::max(y1, y);
    }
    const double mx = 0.5 * inflate * (x1 - x0);
    const double my = 0.5 * inflate * (y1 - y0);
    x0 -= mx;
    x1 += mx;
    y0 -= my;
    y1 += my;

    std::vector<Point2> grid;
    grid.reserve(n * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) {
            grid.emplace_back(x0 + (x1 - x0) * static_cast<double>(a) / static_cast<double>(n - 1),
                              y0 + (y1 - y0) * static_cast<double>(b) / static_cast<double>(n - 1));
        }
    }
    return grid;
}

std::vector<Point2> actual_positions(const SimTrace& trace)
{
    std::vector<Point2> pts;
    pts.reserve(trace.rows.size());
    for (const auto& r : trace.rows) pts.emplace_back(r.p_actual.x, r.p_actual.y);
    return pts;
}

std::vector<Point2> sample_positions(const SampleSet& samples)
{
    std::vector<Point2> pts;
    pts.reserve(samples.count());
    for (const auto& s : samples.points) pts.emplace_back(s.x, s.y);
    return pts;
}

SpoofResult spoof(const SimTrace& trace, const PolySignature& estimate, const DetectionConfig& cfg)
{
    std::vector<double> t, received, expected;
    t.reserve(trace.rows.size());
    received.reserve(trace.rows.size());
    expected.reserve(trace.rows.size());
    for (const auto& r : trace.rows) {
        t.push_back(r.t);
        received.push_back(eval(estimate, r.p_observed.x, r.p_observed.y));
        expected.push_back(r.phi_ctrl);
    }
    SpoofResult out;
    out.monitor = monitor_streams(t, received, expected, cfg);
    out.caught = out.monitor.flag;
    return out;
}

std::vector<StudyRow> estimation_study(const SimTrace& trace, const PolySignature& truth, const StudyConfig& cfg)
{
    std::vector<StudyRow> rows;
    const auto traj_grid = bbox_grid(actual_positions(trace));

    auto score = [&](SampleSource source, std::size_t n, const SampleSet& set, const std::vector<Point2>& grid) {
        StudyRow row{source, n, 0.0, "ok"};
        try {
            row.nrmse = nrmse(fit_signature(set, cfg.estimator), truth, grid);
        } catch (const UnderdeterminedError&) {
            row.status = "underdetermined";
            row.nrmse = std::numeric_limits<double>::quiet_NaN();
        }
        rows.push_back(row);
    };

    for (const std::size_t n : cfg.sample_counts) {
        if (n > trace.rows.size()) {
            rows.push_back({SampleSource::Trajectory, n, std::numeric_limits<double>::quiet_NaN(), "insufficient-trace"});
        } else {
            score(SampleSource::Trajectory, n, trajectory_samples(trace, n, truth), traj_grid);
        }
    }
    for (const std::size_t n : cfg.sample_counts) {
        const auto set = spiral_samples(n, cfg.spiral_turns, cfg.spiral_radius, truth);
        score(SampleSource::Spiral, n, set, bbox_grid(sample_positions(set)));
    }
    return rows;
}

void write_samples_csv(std::ostream& os, const SampleSet& samples)
{
    std::string out = "x,y,phi\n";
    for (const auto& s : samples.points) {
        append17(out, s.x);
        out += ',';
        append17(out, s.y);
        out += ',';
        append17(out, s.phi);
        out += '\n';
    }
    os << out;
}

SampleSet read_samples_csv(std::istream& is, SampleSource source)
{
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("samples csv: empty input");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "x,y,phi") throw std::invalid_argument("samples csv: expected header 'x,y,phi'");
    SampleSet set;
    set.source = source;
    while (std::getline(is, line)) {
        if (line.empty() || line == "\r") continue;
        const auto f = split_csv(line);
        if (f.size() != 3) throw std::invalid_argument("samples csv: expected 3 fields per row");
        set.points.push_back({parse_double(f[0]), parse_double(f[1]), parse_double(f[2])});
    }
    return set;
}

}  // namespace fdia_lab
