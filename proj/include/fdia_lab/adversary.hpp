#pragma once

// Adversarial estimation of a polynomial signature from intercepted
// (x, y, Phi) samples, and spoofing of the monitored stream.

#include "fdia_lab/signature.hpp"
#include "fdia_lab/simloop.hpp"
#include "fdia_lab/smsf.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace fdia_lab {

enum class SampleSource { Trajectory, Spiral, Grid };

std::string_view to_string(SampleSource s);
SampleSource sample_source_from_string(std::string_view s);

struct Sample {
    double x = 0.0;
    double y = 0.0;
    double phi = 0.0;
};

struct SampleSet {
    std::vector<Sample> points;
    SampleSource source = SampleSource::Trajectory;

    std::size_t count() const { return points.size(); }
};

/// Sample count suggested by ten times the basis size (VC dimension) of a
/// bivariate quartic.
inline constexpr std::size_t kDefaultInterceptCount = 150;

struct EstimatorConfig {
    int degree = 4;
    double regularization = 0.0;  ///< ridge parameter, >= 0

    void validate() const;
};

/// Thrown when the design matrix does not have full column rank.
class UnderdeterminedError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// All (i, j) with i + j <= degree; ascending total degree, x-power first.
std::vector<Exponents> monomial_basis(int degree);

PolySignature fit_signature(const SampleSet& samples, const EstimatorConfig& cfg);

using Point2 = std::pair<double, double>;

/// RMSE(estimate - truth) / range(truth) over eval_set.
double nrmse(const PolySignature& estimate, const PolySignature& truth, const std::vector<Point2>& eval_set);

/// Archimedean spiral r = radius * s, angle = 2 pi turns s, s uniform in [0, 1].
SampleSet spiral_samples(std::size_t n, double turns, double radius, const PolySignature& truth = default_signature());

/// Uniform n x n grid over [lo, hi]^2.
SampleSet grid_samples(std::size_t n, double lo, double hi, const PolySignature& truth = default_signature());

/// First n logged rows of the plant's actual trajectory.
SampleSet trajectory_samples(const SimTrace& trace, std::size_t n, const PolySignature& truth = default_signature());

/// n x n grid over the (x, y) bounding box inflated by `inflate` (fraction of
/// each side length, split evenly on both ends).
std::vector<Point2> bbox_grid(const std::vector<Point2>& cloud, std::size_t n = 50, double inflate = 0.2);

std::vector<Point2> actual_positions(const SimTrace& trace);
std::vector<Point2> sample_positions(const SampleSet& samples);

struct SpoofResult {
    MonitorResult monitor;
    bool caught = false;
};

/// The attacker replaces the plant-side stream with estimate(p_observed); the
/// controller compares against its own phi_ctrl column.
SpoofResult spoof(const SimTrace& trace, const PolySignature& estimate, const DetectionConfig& cfg);

struct StudyConfig {
    std::vector<std::size_t> sample_counts{150, 500, 1000};
    double spiral_turns = 3.0;
    double spiral_radius = 1.0;
    EstimatorConfig estimator{};
};

struct StudyRow {
    SampleSource source = SampleSource::Trajectory;
    std::size_t n = 0;
    double nrmse = 0.0;
    std::string status;  ///< "ok", "underdetermined", or "insufficient-trace"
};

/// Fits at each sample count on the trajectory (from `trace`) and spiral
/// sources and scores on held-out 50x50 bounding-box grids.
std::vector<StudyRow> estimation_study(const SimTrace& trace, const PolySignature& truth, const StudyConfig& cfg);

void write_samples_csv(std::ostream& os, const SampleSet& samples);
SampleSet read_samples_csv(std::istream& is, SampleSource source);

}  // namespace fdia_lab
