#include "mbl/sweep.hpp"

#include "mbl/errors.hpp"
#include "mbl/full_space.hpp"
#include "mbl/random.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <set>
#include <thread>

namespace mbl {

std::string Ratio::to_string() const { return std::to_string(numerator) + "/" + std::to_string(denominator); }

Ratio Ratio::parse(const std::string &text) {
    const auto slash = text.find('/');
    try {
        if(slash == std::string::npos) throw ConfigError("");
        std::size_t used = 0;
        Ratio       r{std::stoi(text.substr(0, slash), &used), 0};
        if(used != slash) throw ConfigError("");
        const auto tail = text.substr(slash + 1);
        r.denominator   = std::stoi(tail, &used);
        if(used != tail.size()) throw ConfigError("");
        if(r.numerator < 1 || r.denominator <= r.numerator) throw ConfigError("");
        return r;
    } catch(const std::exception &) {
        throw ConfigError("ratio must look like 'p/q' with 0 < p < q, got '" + text + "'");
    }
}

TimeGrid make_time_grid(int sites, const TimeGridParams &params) {
    TimeGrid grid;
    grid.t1 = params.t1_scale * static_cast<double>(sites) * static_cast<double>(sites);
    grid.t0 = params.t0_fraction * grid.t1;
    grid.times.push_back(0.0);
    for(int i = 0; i < params.transient_points; ++i) {
        const double exponent = -params.transient_decades * (1.0 - static_cast<double>(i) / params.transient_points);
        grid.times.push_back(grid.t0 * std::pow(10.0, exponent));
    }
    for(int i = 0; i < params.window_points; ++i) {
        const double frac = params.window_points == 1 ? 0.0 : static_cast<double>(i) / (params.window_points - 1);
        grid.times.push_back(i + 1 == params.window_points ? grid.t1 : grid.t0 + frac * (grid.t1 - grid.t0));
    }
    return grid;
}

int default_realizations(int sites) {
    if(sites <= 9) return 200;
    if(sites <= 12) return 100;
    return 50;
}

int SweepConfig::message_sites_for(int sites) const {
    if(message_sites) return *message_sites;
    if((sites * ratio.numerator) % ratio.denominator != 0)
        throw ConfigError("size " + std::to_string(sites) + " is incompatible with ratio " + ratio.to_string());
    return sites * ratio.numerator / ratio.denominator;
}

int SweepConfig::realizations_for(int sites) const { return realizations ? *realizations : default_realizations(sites); }

double SweepConfig::t_neel_for(int sites) const { return t_neel ? *t_neel : static_cast<double>(sites); }

void SweepConfig::validate() const {
    if(sizes.empty()) throw ConfigError("physics.sizes: at least one system size is required");
    std::set<int> seen;
    for(int L : sizes) {
        if(L < 3 || L > 24) throw ConfigError("physics.sizes: size " + std::to_string(L) + " outside [3, 24]");
        if(!seen.insert(L).second) throw ConfigError("physics.sizes: duplicate size " + std::to_string(L));
        const int l = message_sites_for(L);
        if(l < 1 || l >= L)
            throw ConfigError("physics: message length " + std::to_string(l) + " must satisfy 1 <= l < L=" +
                              std::to_string(L));
        if(full_space && L > full_space::max_sites)
            throw ConfigError("physics.full_space: dense path limited to L <= " +
                              std::to_string(full_space::max_sites));
    }
    if(message_sites && sizes.size() != 1)
        throw ConfigError("physics.message_sites: only valid with a single size; use physics.ratio for sweeps");
    if(disorder_strengths.empty()) throw ConfigError("disorder.strengths: at least one disorder strength is required");
    std::set<double> hs;
    for(double h : disorder_strengths) {
        if(!(h >= 0.0) || !std::isfinite(h)) throw ConfigError("disorder.strengths: values must be finite and >= 0");
        if(!hs.insert(h).second) throw ConfigError("disorder.strengths: duplicate value " + std::to_string(h));
    }
    if(realizations && *realizations < 1) throw ConfigError("disorder.realizations: must be >= 1");
    if(!(exchange > 0.0) || !std::isfinite(exchange)) throw ConfigError("physics.exchange: must be positive");
    if(t_neel && !(*t_neel >= 0.0)) throw ConfigError("physics.t_neel: must be >= 0");
    if(grid.transient_points < 0) throw ConfigError("time_grid.transient_points: must be >= 0");
    if(grid.window_points < 8) throw ConfigError("time_grid.window_points: at least 8 points are required");
    if(!(grid.transient_decades > 0.0)) throw ConfigError("time_grid.transient_decades: must be positive");
    if(!(grid.t1_scale > 0.0)) throw ConfigError("time_grid.t1_scale: must be positive");
    if(!(grid.t0_fraction > 0.0 && grid.t0_fraction < 1.0))
        throw ConfigError("time_grid.t0_fraction: must lie in (0, 1) so that T0 < T1");
}

namespace {

PureStateVector prepare_environment(const SweepConfig &config, const DisorderedChainSpec &spec) {
    const int n = spec.environment_sites();
    switch(config.environment) {
        case EnvironmentKind::neel: return neel_state(n);
        case EnvironmentKind::evolved_neel: {
            const auto env_chain = spec.environment_chain();
            const auto h_env     = build_hamiltonian(env_chain, {neel_state(n).sector()});
            return evolved_neel_state(h_env, config.t_neel_for(spec.sites()));
        }
        case EnvironmentKind::mid_spectrum_eigenstate:
            return mid_spectrum_eigenstate(build_hamiltonian(spec.environment_chain())).state;
    }
    throw DomainError("unknown environment kind");
}

} // namespace

RealizationResult run_realization(const SweepConfig &config, int sites, double disorder, std::uint64_t index) {
    RealizationResult r;
    r.sites         = sites;
    r.message_sites = config.message_sites_for(sites);
    r.disorder      = disorder;
    r.environment   = config.environment;
    r.index         = index;
    r.seed          = realization_key(config.seed, sites, disorder, index);
    try {
        r.fields = sample_fields(disorder, sites, r.seed);
        const DisorderedChainSpec spec(sites, r.message_sites, r.fields, Topology::ring, config.exchange, disorder);
        const auto                env      = prepare_environment(config, spec);
        const auto                grid     = make_time_grid(sites, config.grid);
        const auto                ensemble = MessageEnsemble::uniform(r.message_sites);

        HolevoTrace trace;
        if(config.full_space) {
            trace = full_space::holevo_rate_trace(spec, env, ensemble, grid.times);
        } else {
            const auto sectors = message_sectors(r.message_sites, env.sector());
            const auto h       = build_hamiltonian(spec, sectors);
            trace              = holevo_rate_trace(spec, decompose(h, sectors), env, ensemble, grid.times);
        }
        r.times        = trace.times();
        r.rates        = trace.rates();
        r.steady_state = steady_state_average(r.times, r.rates, grid.t0, grid.t1);
        r.ok           = true;
    } catch(const std::exception &e) {
        r.ok    = false;
        r.error = e.what();
        r.times.clear();
        r.rates.clear();
    }
    return r;
}

double steady_state_average(std::span<const double> times, std::span<const double> values, double t0, double t1) {
    if(times.size() != values.size()) throw DomainError("times and values differ in length");
    if(!(t1 > t0)) throw DomainError("steady-state window needs T0 < T1");
    for(std::size_t i = 1; i < times.size(); ++i)
        if(!(times[i] > times[i - 1])) throw DomainError("time grid must be strictly ascending");
    const double slack = 1e-12 * std::max(1.0, std::abs(t1));
    if(times.empty() || times.front() > t0 + slack || times.back() < t1 - slack)
        throw DomainError("time grid does not cover the steady-state window");
    const auto inside = std::count_if(times.begin(), times.end(),
                                      [&](double t) { return t >= t0 - slack && t <= t1 + slack; });
    if(inside < 8) throw DomainError("steady-state window needs at least 8 grid points");

    auto value_at = [&](double t) {
        auto it = std::upper_bound(times.begin(), times.end(), t);
        if(it == times.begin()) return values.front();
        if(it == times.end()) return values.back();
        const auto   k = static_cast<std::size_t>(it - times.begin());
        const double w = (t - times[k - 1]) / (times[k] - times[k - 1]);
        return values[k - 1] + w * (values[k] - values[k - 1]);
    };

    // Knots: T0, interior grid points, T1.
    double integral = 0.0;
    double prev_t   = t0;
    double prev_v   = value_at(t0);
    for(std::size_t i = 0; i < times.size(); ++i) {
        if(times[i] <= t0 || times[i] >= t1) continue;
        integral += 0.5 * (values[i] + prev_v) * (times[i] - prev_t);
        prev_t = times[i];
        prev_v = values[i];
    }
    integral += 0.5 * (value_at(t1) + prev_v) * (t1 - prev_t);
    return integral / (t1 - t0);
}

SampleSummary disorder_average(std::span<const double> samples) {
    if(samples.empty()) throw DomainError("disorder average of no samples");
    SampleSummary out;
    out.count       = samples.size();
    const double n  = static_cast<double>(samples.size());
    out.mean        = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
    if(samples.size() == 1) {
        out.std_error = std::numeric_limits<double>::quiet_NaN();
        return out;
    }
    double ss = 0.0;
    for(double x : samples) ss += (x - out.mean) * (x - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    return out;
}

double SweepResult::failure_fraction() const {
    return realizations.empty() ? 0.0 : static_cast<double>(failures) / static_cast<double>(realizations.size());
}

unsigned resolve_threads(unsigned requested) {
    if(requested > 0) return requested;
    return std::max(1U, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)> &fn) {
    threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
    if(threads <= 1) {
        for(std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr       failure;
    std::mutex               failure_mutex;
    {
        std::vector<std::jthread> pool;
        pool.reserve(threads);
        for(unsigned w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for(std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                    try {
                        fn(i);
                    } catch(...) {
                        std::lock_guard lock(failure_mutex);
                        if(!failure) failure = std::current_exception();
                    }
                }
            });
    }
    if(failure) std::rethrow_exception(failure);
}

SweepResult run_sweep(const SweepConfig &config, unsigned threads,
                      const std::function<void(const SweepProgress &)> &progress) {
    config.validate();

    struct Cell {
        int           sites;
        double        disorder;
        std::uint64_t index;
    };
    std::vector<Cell> cells;
    for(int L : config.sizes)
        for(double h : config.disorder_strengths)
            for(int i = 0; i < config.realizations_for(L); ++i) cells.push_back({L, h, static_cast<std::uint64_t>(i)});

    SweepResult out;
    out.realizations.resize(cells.size());
    std::atomic<std::size_t> done{0};
    std::mutex               progress_mutex;
    parallel_for(cells.size(), threads, [&](std::size_t i) {
        out.realizations[i] = run_realization(config, cells[i].sites, cells[i].disorder, cells[i].index);
        const std::size_t finished = done.fetch_add(1) + 1;
        if(progress) {
            std::lock_guard lock(progress_mutex);
            progress({finished, cells.size()});
        }
    });

    // Keyed reduction in (size, disorder, index) order.
    std::size_t at = 0;
    for(int L : config.sizes)
        for(double h : config.disorder_strengths) {
            const auto          n = static_cast<std::size_t>(config.realizations_for(L));
            std::vector<double> steady;
            AveragedTrace       avg;
            avg.sites         = L;
            avg.message_sites = config.message_sites_for(L);
            avg.disorder      = h;
            avg.environment   = config.environment;
            avg.times         = make_time_grid(L, config.grid).times;
            std::vector<std::vector<double>> columns(avg.times.size());
            for(std::size_t k = 0; k < n; ++k, ++at) {
                const auto &r = out.realizations[at];
                if(!r.ok) {
                    ++out.failures;
                    continue;
                }
                steady.push_back(r.steady_state);
                for(std::size_t t = 0; t < columns.size(); ++t) columns[t].push_back(r.rates[t]);
            }
            SteadyStateRecord rec{L, avg.message_sites, h, config.environment, 0.0, 0.0, 0};
            if(!steady.empty()) {
                const auto s  = disorder_average(steady);
                rec.mean      = s.mean;
                rec.std_error = s.std_error;
                rec.count     = s.count;
                for(const auto &col : columns) {
                    const auto c = disorder_average(col);
                    avg.mean.push_back(c.mean);
                    avg.std_error.push_back(c.std_error);
                }
                avg.count = steady.size();
            } else {
                rec.mean      = std::numeric_limits<double>::quiet_NaN();
                rec.std_error = std::numeric_limits<double>::quiet_NaN();
            }
            out.aggregate.push_back(rec);
            out.traces.push_back(std::move(avg));
        }
    return out;
}

} // namespace mbl
