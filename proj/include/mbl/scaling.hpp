#pragma once

// Finite-size scaling of the steady-state rate: pairwise crossings and a
// two-parameter data collapse R ~ L^(beta/nu) f(L^(1/nu) (h - h_c)).

#include "mbl/errors.hpp"
#include "mbl/sweep.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace mbl::scaling {

struct ScalingPoint {
    double h;
    double value;
    double error;
};

// Curves R_SS(h) for several sizes at one fixed l/L and environment.
struct ScalingDataset {
    std::map<int, std::vector<ScalingPoint>> curves; // sorted by h within each size

    void add(int sites, ScalingPoint point);
    std::size_t point_count() const;
    // Throws AnalysisError: fewer than 2 sizes, non-finite values, negative errors.
    void validate() const;

    static ScalingDataset from_records(std::span<const SteadyStateRecord> records);
};

struct Crossing {
    int    size_a;
    int    size_b;
    double h;
    double slope_gap; // |d(R_a - R_b)/dh| at the crossing
};

struct CrossingAnalysis {
    std::vector<Crossing>            crossings;  // one per size pair that crosses
    std::vector<std::pair<int, int>> degenerate; // identical curves on the shared window
    std::vector<std::pair<int, int>> no_crossing;
    double                           pooled_mean   = 0.0;
    double                           pooled_spread = 0.0; // sample stddev, 0 for one pair
};

// Linear interpolation on the shared h window of each size pair. When a pair
// crosses several times, the crossing with the largest slope gap is kept.
CrossingAnalysis crossing_points(const ScalingDataset &dataset);

struct CollapseParams {
    double h_c  = 0.0;
    double nu   = 1.0;
    double beta = 0.0;
};

struct CollapsedPoint {
    int    sites;
    double h;
    double x;
    double y;
    double dy;
};

struct HWindow {
    double lo;
    double hi;
};

std::vector<CollapsedPoint> collapse_transform(const ScalingDataset &dataset, const CollapseParams &params,
                                               std::optional<HWindow> window = std::nullopt);

struct QualityOptions {
    int                    neighbors = 4;
    std::optional<HWindow> window;
};

// Reduced chi^2 of every point against a local weighted linear fit through the
// nearest points of the other sizes (half on each side in x). Points without
// neighbours on both sides are excluded. Throws AnalysisError below 2 usable points.
double collapse_quality(const ScalingDataset &dataset, const CollapseParams &params,
                        const QualityOptions &options = {});

enum class BetaMode { free, pinned };

std::string_view to_string(BetaMode mode);
BetaMode parse_beta_mode(std::string_view text);

struct Bounds {
    double lo;
    double hi;
};

struct CollapseOptions {
    BetaMode      beta_mode         = BetaMode::free;
    Bounds        h_c_bounds        = {1.0, 6.0};
    Bounds        nu_bounds         = {0.3, 4.0};
    Bounds        beta_bounds       = {-0.5, 0.5};
    double        window_half_width = 1.5;
    int           neighbors         = 4;
    int           multistarts       = 5;
    int           bootstrap         = 100;
    std::uint64_t seed              = 7;
    int           max_evaluations   = 4000;
    unsigned      threads           = 1;
};

struct CollapseFit {
    CollapseParams           params;
    CollapseParams           errors{0.0, 0.0, 0.0}; // bootstrap standard errors; beta error 0 when pinned
    double                   quality     = 0.0;
    BetaMode                 beta_mode   = BetaMode::free;
    HWindow                  window      = {0.0, 0.0};
    CollapseParams           initial;
    int                      evaluations = 0;
    bool                     converged   = false;
    std::vector<std::string> at_bound; // parameter names that ended on a bound
    int                      bootstrap_samples = 0;
};

class CollapseFitError : public AnalysisError {
  public:
    CollapseFitError(const std::string &what, CollapseFit best) : AnalysisError(what), best_(std::move(best)) {}
    const CollapseFit &best() const { return best_; }

  private:
    CollapseFit best_;
};

// Multistart Nelder-Mead on collapse_quality inside the h window centred on
// the initial h_c (taken from the crossings when not given), followed by a
// parametric bootstrap. Throws CollapseFitError when no start converges.
CollapseFit fit_collapse(const ScalingDataset &dataset, std::optional<CollapseParams> initial,
                         const CollapseOptions &options);

// Derivative-free simplex minimizer on a box; exposed for tests.
struct SimplexResult {
    std::vector<double> x;
    double              value       = 0.0;
    int                 evaluations = 0;
    bool                converged   = false;
};

SimplexResult nelder_mead(const std::function<double(std::span<const double>)> &f, std::vector<double> start,
                          std::vector<double> step, std::span<const Bounds> bounds, int max_evaluations,
                          double x_tolerance = 1e-7, double f_tolerance = 1e-12);

} // namespace mbl::scaling
