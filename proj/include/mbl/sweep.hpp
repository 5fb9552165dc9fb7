#pragma once

// Disorder sampling, per-realization pipeline, steady-state extraction and the
// parallel sweep driver.

#include "mbl/environment.hpp"
#include "mbl/holevo.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mbl {

struct Ratio {
    int numerator   = 1;
    int denominator = 3;

    double value() const { return static_cast<double>(numerator) / denominator; }
    std::string to_string() const;
    static Ratio parse(const std::string &text); // "1/3"
};

struct TimeGridParams {
    int    transient_points  = 16;    // log-spaced on (0, T0)
    int    window_points     = 64;    // uniform on [T0, T1]
    double transient_decades = 2.0;   // first transient point at T0 * 10^-decades
    double t1_scale          = 1.0;   // T1 = t1_scale * L^2
    double t0_fraction       = 0.125; // T0 = t0_fraction * T1
};

struct TimeGrid {
    std::vector<double> times; // t = 0, transient points, window points
    double              t0 = 0.0;
    double              t1 = 0.0;
};

TimeGrid make_time_grid(int sites, const TimeGridParams &params);

struct SweepConfig {
    std::vector<int>      sizes;
    Ratio                 ratio{1, 3};
    std::optional<int>    message_sites; // overrides the ratio; single-size runs only
    EnvironmentKind       environment = EnvironmentKind::neel;
    std::vector<double>   disorder_strengths;
    std::optional<int>    realizations; // default depends on L
    std::uint64_t         seed     = 20200101;
    double                exchange = 1.0;
    std::optional<double> t_neel; // default L
    TimeGridParams        grid;
    bool                  full_space = false; // dense oracle path instead of sector blocks

    int message_sites_for(int sites) const;
    int realizations_for(int sites) const;
    double t_neel_for(int sites) const;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

// 200 realizations at L <= 9, 100 up to L = 12, 50 beyond.
int default_realizations(int sites);

struct RealizationResult {
    int                 sites         = 0;
    int                 message_sites = 0;
    double              disorder      = 0.0;
    EnvironmentKind     environment   = EnvironmentKind::neel;
    std::uint64_t       index         = 0;
    std::uint64_t       seed          = 0; // realization key
    bool                ok            = false;
    std::string         error;
    std::vector<double> fields;
    std::vector<double> times;
    std::vector<double> rates;
    double              steady_state = 0.0;
};

RealizationResult run_realization(const SweepConfig &config, int sites, double disorder, std::uint64_t index);

// Time average of the piecewise-linear interpolant of `values` over [t0, t1].
// Needs at least 8 grid points inside the window and a grid covering it.
double steady_state_average(std::span<const double> times, std::span<const double> values, double t0, double t1);

struct SampleSummary {
    double      mean      = 0.0;
    double      std_error = 0.0; // NaN for a single sample
    std::size_t count     = 0;
};

// Sample mean and standard error (sample stddev / sqrt(n)).
SampleSummary disorder_average(std::span<const double> samples);

struct SteadyStateRecord {
    int             sites         = 0;
    int             message_sites = 0;
    double          disorder      = 0.0;
    EnvironmentKind environment   = EnvironmentKind::neel;
    double          mean          = 0.0;
    double          std_error     = 0.0;
    std::size_t     count         = 0;
};

struct AveragedTrace {
    int                 sites         = 0;
    int                 message_sites = 0;
    double              disorder      = 0.0;
    EnvironmentKind     environment   = EnvironmentKind::neel;
    std::vector<double> times;
    std::vector<double> mean;
    std::vector<double> std_error;
    std::size_t         count = 0;
};

struct SweepResult {
    std::vector<RealizationResult> realizations; // ordered by (size, disorder, index)
    std::vector<SteadyStateRecord> aggregate;     // ordered by (size, disorder)
    std::vector<AveragedTrace>     traces;        // same order as aggregate
    std::size_t                    failures = 0;

    double failure_fraction() const;
};

struct SweepProgress {
    std::size_t done  = 0;
    std::size_t total = 0;
};

// Runs every realization on up to `threads` workers (0 = hardware concurrency).
// Output depends only on the config, never on the worker count.
SweepResult run_sweep(const SweepConfig &config, unsigned threads,
                      const std::function<void(const SweepProgress &)> &progress = {});

unsigned resolve_threads(unsigned requested);

// Runs fn(i) for i in [0, count) on a pool of workers; exceptions propagate after join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &fn);

} // namespace mbl
