#include "mbl/scaling.hpp"

#include "mbl/random.hpp"

#include <algorithm>
#include <array>
#include <optional>
#include <cmath>
#include <limits>
#include <numeric>
#include <tuple>

namespace mbl::scaling {

void ScalingDataset::add(int sites, ScalingPoint point) {
    auto &curve = curves[sites];
    auto  it    = std::upper_bound(curve.begin(), curve.end(), point.h,
                                   [](double h, const ScalingPoint &p) { return h < p.h; });
    curve.insert(it, point);
}

std::size_t ScalingDataset::point_count() const {
    std::size_t n = 0;
    for(const auto &[_, c] : curves) n += c.size();
    return n;
}

void ScalingDataset::validate() const {
    if(curves.size() < 2) throw AnalysisError("scaling analysis needs at least two system sizes");
    for(const auto &[L, curve] : curves) {
        if(L < 1) throw AnalysisError("invalid system size " + std::to_string(L));
        if(curve.size() < 2) throw AnalysisError("size " + std::to_string(L) + " has fewer than two points");
        for(std::size_t i = 0; i < curve.size(); ++i) {
            const auto &p = curve[i];
            if(!std::isfinite(p.h) || !std::isfinite(p.value))
                throw AnalysisError("non-finite point in size " + std::to_string(L));
            if(!(p.error >= 0.0) || !std::isfinite(p.error))
                throw AnalysisError("point errors must be finite and non-negative (size " + std::to_string(L) + ")");
            if(i > 0 && !(p.h > curve[i - 1].h))
                throw AnalysisError("duplicate disorder value in size " + std::to_string(L));
        }
    }
}

ScalingDataset ScalingDataset::from_records(std::span<const SteadyStateRecord> records) {
    ScalingDataset ds;
    for(const auto &r : records) {
        if(r.count == 0 || !std::isfinite(r.mean)) continue;
        ds.add(r.sites, {r.disorder, r.mean, std::isfinite(r.std_error) ? r.std_error : 0.0});
    }
    return ds;
}

namespace {

double interpolate(const std::vector<ScalingPoint> &curve, double h) {
    auto it = std::lower_bound(curve.begin(), curve.end(), h, [](const ScalingPoint &p, double x) { return p.h < x; });
    if(it == curve.end()) return curve.back().value;
    if(it->h == h || it == curve.begin()) return it->value;
    const auto  &hi = *it;
    const auto  &lo = *(it - 1);
    const double w  = (h - lo.h) / (hi.h - lo.h);
    return lo.value + w * (hi.value - lo.value);
}

} // namespace

CrossingAnalysis crossing_points(const ScalingDataset &dataset) {
    dataset.validate();
    CrossingAnalysis out;
    std::vector<int> sizes;
    for(const auto &[L, _] : dataset.curves) sizes.push_back(L);

    for(std::size_t a = 0; a < sizes.size(); ++a)
        for(std::size_t b = a + 1; b < sizes.size(); ++b) {
            const auto  &ca = dataset.curves.at(sizes[a]);
            const auto  &cb = dataset.curves.at(sizes[b]);
            const double lo = std::max(ca.front().h, cb.front().h);
            const double hi = std::min(ca.back().h, cb.back().h);
            if(!(hi > lo)) {
                out.no_crossing.emplace_back(sizes[a], sizes[b]);
                continue;
            }
            std::vector<double> grid;
            for(const auto *c : {&ca, &cb})
                for(const auto &p : *c)
                    if(p.h >= lo && p.h <= hi) grid.push_back(p.h);
            grid.push_back(lo);
            grid.push_back(hi);
            std::sort(grid.begin(), grid.end());
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

            std::vector<double> gap(grid.size());
            for(std::size_t i = 0; i < grid.size(); ++i) gap[i] = interpolate(ca, grid[i]) - interpolate(cb, grid[i]);

            if(std::all_of(gap.begin(), gap.end(), [](double g) { return g == 0.0; })) {
                out.degenerate.emplace_back(sizes[a], sizes[b]);
                continue;
            }

            std::optional<Crossing> best;
            auto consider = [&](double h, double slope) {
                const Crossing c{sizes[a], sizes[b], h, std::abs(slope)};
                if(!best || c.slope_gap > best->slope_gap) best = c;
            };
            for(std::size_t i = 0; i + 1 < grid.size(); ++i) {
                const double g0 = gap[i];
                const double g1 = gap[i + 1];
                const double dh = grid[i + 1] - grid[i];
                if(g0 * g1 < 0.0) {
                    consider(grid[i] + dh * g0 / (g0 - g1), (g1 - g0) / dh);
                } else if(g1 == 0.0 && i + 2 < grid.size()) {
                    // Touches zero exactly at a grid point: a crossing only if the sign flips across it.
                    const double g2 = gap[i + 2];
                    if(g0 * g2 < 0.0) consider(grid[i + 1], (g2 - g0) / (grid[i + 2] - grid[i]));
                }
            }
            if(best)
                out.crossings.push_back(*best);
            else
                out.no_crossing.emplace_back(sizes[a], sizes[b]);
        }

    if(out.crossings.empty()) throw AnalysisError("no size pair crosses inside its shared disorder window");
    const double n = static_cast<double>(out.crossings.size());
    out.pooled_mean =
        std::accumulate(out.crossings.begin(), out.crossings.end(), 0.0, [](double s, const Crossing &c) { return s + c.h; }) / n;
    if(out.crossings.size() > 1) {
        double ss = 0.0;
        for(const auto &c : out.crossings) ss += (c.h - out.pooled_mean) * (c.h - out.pooled_mean);
        out.pooled_spread = std::sqrt(ss / (n - 1.0));
    }
    return out;
}

std::vector<CollapsedPoint> collapse_transform(const ScalingDataset &dataset, const CollapseParams &params,
                                               std::optional<HWindow> window) {
    if(!(params.nu > 0.0)) throw AnalysisError("nu must be positive");
    std::vector<CollapsedPoint> out;
    for(const auto &[L, curve] : dataset.curves) {
        const double size   = static_cast<double>(L);
        const double xscale = std::pow(size, 1.0 / params.nu);
        const double yscale = std::pow(size, -params.beta / params.nu);
        for(const auto &p : curve) {
            if(window && (p.h < window->lo || p.h > window->hi)) continue;
            out.push_back({L, p.h, xscale * (p.h - params.h_c), yscale * p.value, yscale * p.error});
        }
    }
    return out;
}

double collapse_quality(const ScalingDataset &dataset, const CollapseParams &params, const QualityOptions &options) {
    if(options.neighbors < 2) throw AnalysisError("collapse quality needs at least two neighbours per point");
    const auto pts = collapse_transform(dataset, params, options.window);

    const auto   left_quota  = static_cast<std::size_t>((options.neighbors + 1) / 2);
    const auto   right_quota = static_cast<std::size_t>(options.neighbors / 2);
    double       total       = 0.0;
    std::size_t  used        = 0;

    // Candidate ordering depends only on point values, never on input order.
    auto closer = [](double xi) {
        return [xi](const CollapsedPoint *a, const CollapsedPoint *b) {
            return std::make_tuple(std::abs(a->x - xi), a->x, a->y, a->dy, a->sites) <
                   std::make_tuple(std::abs(b->x - xi), b->x, b->y, b->dy, b->sites);
        };
    };

    std::vector<const CollapsedPoint *> left, right;
    for(const auto &pi : pts) {
        left.clear();
        right.clear();
        for(const auto &pj : pts) {
            if(pj.sites == pi.sites) continue;
            (pj.x <= pi.x ? left : right).push_back(&pj);
        }
        if(left.empty() || right.empty()) continue;
        std::sort(left.begin(), left.end(), closer(pi.x));
        std::sort(right.begin(), right.end(), closer(pi.x));
        left.resize(std::min(left.size(), left_quota));
        right.resize(std::min(right.size(), right_quota));

        std::vector<const CollapsedPoint *> nb(left);
        nb.insert(nb.end(), right.begin(), right.end());

        const bool weighted = std::all_of(nb.begin(), nb.end(), [](const CollapsedPoint *p) { return p->dy > 0.0; });
        double     s = 0.0, su = 0.0, suu = 0.0;
        for(const auto *p : nb) {
            const double w = weighted ? 1.0 / (p->dy * p->dy) : 1.0;
            const double u = p->x - pi.x;
            s += w;
            su += w * u;
            suu += w * u * u;
        }
        const double det      = s * suu - su * su;
        const bool   sloped   = det > 1e-14 * s * suu && det > 0.0;
        double       estimate = 0.0;
        double       variance = 0.0;
        for(const auto *p : nb) {
            const double w = weighted ? 1.0 / (p->dy * p->dy) : 1.0;
            const double u = p->x - pi.x;
            const double c = sloped ? w * (suu - su * u) / det : w / s;
            estimate += c * p->y;
            variance += c * c * p->dy * p->dy;
        }
        double denom = pi.dy * pi.dy + variance;
        if(!(denom > 0.0)) denom = 1.0;
        total += (pi.y - estimate) * (pi.y - estimate) / denom;
        ++used;
    }
    if(used < 2) throw AnalysisError("fewer than two points overlap other sizes in the collapse");
    return total / static_cast<double>(used);
}

std::string_view to_string(BetaMode mode) { return mode == BetaMode::free ? "free" : "pinned"; }

BetaMode parse_beta_mode(std::string_view text) {
    if(text == "free") return BetaMode::free;
    if(text == "pinned") return BetaMode::pinned;
    throw DomainError("beta mode must be 'free' or 'pinned', got '" + std::string(text) + "'");
}

SimplexResult nelder_mead(const std::function<double(std::span<const double>)> &f, std::vector<double> start,
                          std::vector<double> step, std::span<const Bounds> bounds, int max_evaluations,
                          double x_tolerance, double f_tolerance) {
    const std::size_t n = start.size();
    if(step.size() != n || bounds.size() != n) throw DomainError("simplex dimensions disagree");

    auto clamp = [&](std::vector<double> &x) {
        for(std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], bounds[i].lo, bounds[i].hi);
    };
    SimplexResult result;
    auto          eval = [&](const std::vector<double> &x) {
        ++result.evaluations;
        const double v = f(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::max();
    };

    clamp(start);
    std::vector<std::vector<double>> simplex(n + 1, start);
    for(std::size_t i = 0; i < n; ++i) {
        simplex[i + 1][i] += step[i];
        clamp(simplex[i + 1]);
        if(simplex[i + 1][i] == start[i]) {
            simplex[i + 1][i] -= step[i];
            clamp(simplex[i + 1]);
        }
    }
    std::vector<double> values(n + 1);
    for(std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

    std::vector<std::size_t> order(n + 1);
    while(true) {
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const auto best = order.front(), worst = order.back(), second = order[n - 1];

        double spread = 0.0;
        for(std::size_t i = 0; i <= n; ++i)
            for(std::size_t j = 0; j < n; ++j) spread = std::max(spread, std::abs(simplex[i][j] - simplex[best][j]));
        const double fspread = values[worst] - values[best];
        if((spread <= x_tolerance && fspread <= f_tolerance + 1e-9 * std::abs(values[best])) || spread <= 1e-12) {
            result.converged = true;
            break;
        }
        if(result.evaluations >= max_evaluations) break;

        std::vector<double> centroid(n, 0.0);
        for(std::size_t k = 0; k < n; ++k)
            for(std::size_t j = 0; j < n; ++j) centroid[j] += simplex[order[k]][j] / static_cast<double>(n);
        auto along = [&](double coeff, const std::vector<double> &toward) {
            std::vector<double> x(n);
            for(std::size_t j = 0; j < n; ++j) x[j] = centroid[j] + coeff * (toward[j] - centroid[j]);
            clamp(x);
            return x;
        };

        const auto   xr = along(-1.0, simplex[worst]);
        const double fr = eval(xr);
        if(fr < values[best]) {
            const auto   xe = along(2.0, xr);
            const double fe = eval(xe);
            if(fe < fr) {
                simplex[worst] = xe;
                values[worst]  = fe;
            } else {
                simplex[worst] = xr;
                values[worst]  = fr;
            }
            continue;
        }
        if(fr < values[second]) {
            simplex[worst] = xr;
            values[worst]  = fr;
            continue;
        }
        const bool   outside = fr < values[worst];
        const auto   xc      = outside ? along(0.5, xr) : along(0.5, simplex[worst]);
        const double fc      = eval(xc);
        if(fc < (outside ? fr : values[worst])) {
            simplex[worst] = xc;
            values[worst]  = fc;
            continue;
        }
        for(std::size_t i = 0; i <= n; ++i) {
            if(i == best) continue;
            for(std::size_t j = 0; j < n; ++j) simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            values[i] = eval(simplex[i]);
        }
    }
    const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
    result.x        = simplex[best];
    result.value    = values[best];
    return result;
}

namespace {

struct Problem {
    const ScalingDataset  *dataset;
    const CollapseOptions *options;
    HWindow                window;
    double                 pinned_beta = 0.0;

    bool free_beta() const { return options->beta_mode == BetaMode::free; }

    CollapseParams unpack(std::span<const double> x) const {
        return {x[0], x[1], free_beta() ? x[2] : pinned_beta};
    }
    std::vector<double> pack(const CollapseParams &p) const {
        if(free_beta()) return {p.h_c, p.nu, p.beta};
        return {p.h_c, p.nu};
    }
    std::vector<Bounds> bounds() const {
        std::vector<Bounds> b{options->h_c_bounds, options->nu_bounds};
        if(free_beta()) b.push_back(options->beta_bounds);
        return b;
    }
    std::vector<double> steps(const CollapseParams &p) const {
        std::vector<double> s{0.25, std::max(0.1, 0.25 * p.nu)};
        if(free_beta()) s.push_back(0.05);
        return s;
    }

    SimplexResult minimize(const ScalingDataset &data, const CollapseParams &start) const {
        const QualityOptions qo{options->neighbors, window};
        auto                 objective = [&](std::span<const double> x) {
            try {
                return collapse_quality(data, unpack(x), qo);
            } catch(const AnalysisError &) {
                return std::numeric_limits<double>::max();
            }
        };
        const auto b = bounds();
        return nelder_mead(objective, pack(start), steps(start), b, options->max_evaluations, 1e-6, 1e-10);
    }
};

CollapseParams clamp_params(CollapseParams p, const CollapseOptions &o) {
    p.h_c  = std::clamp(p.h_c, o.h_c_bounds.lo, o.h_c_bounds.hi);
    p.nu   = std::clamp(p.nu, o.nu_bounds.lo, o.nu_bounds.hi);
    p.beta = std::clamp(p.beta, o.beta_bounds.lo, o.beta_bounds.hi);
    return p;
}

std::vector<CollapseParams> multistart_points(const CollapseParams &init, int count, const CollapseOptions &o) {
    static constexpr std::array<std::array<double, 3>, 7> offsets{{{0.0, 1.0, 0.0},
                                                                   {-0.3, 0.75, 0.03},
                                                                   {0.3, 1.33, -0.03},
                                                                   {-0.15, 1.6, -0.05},
                                                                   {0.15, 0.6, 0.05},
                                                                   {-0.45, 1.0, 0.0},
                                                                   {0.45, 1.0, 0.0}}};
    std::vector<CollapseParams> out;
    for(int i = 0; i < count; ++i) {
        const auto &off   = offsets[static_cast<std::size_t>(i) % offsets.size()];
        const double grow = 1.0 + 0.5 * static_cast<double>(static_cast<std::size_t>(i) / offsets.size());
        out.push_back(clamp_params({init.h_c + grow * off[0], init.nu * std::pow(off[1], grow), init.beta + off[2]}, o));
    }
    return out;
}

} // namespace

CollapseFit fit_collapse(const ScalingDataset &dataset, std::optional<CollapseParams> initial,
                         const CollapseOptions &options) {
    dataset.validate();
    if(options.multistarts < 1) throw AnalysisError("at least one multistart is required");
    if(options.bootstrap < 0) throw AnalysisError("bootstrap count must be non-negative");
    if(!(options.window_half_width > 0.0)) throw AnalysisError("collapse window half-width must be positive");

    CollapseParams init = initial ? *initial : CollapseParams{crossing_points(dataset).pooled_mean, 1.0, 0.0};
    if(options.beta_mode == BetaMode::pinned) init.beta = 0.0;
    init = clamp_params(init, options);

    Problem problem{&dataset, &options, {init.h_c - options.window_half_width, init.h_c + options.window_half_width},
                    0.0};

    const auto                 starts = multistart_points(init, options.multistarts, options);
    std::vector<SimplexResult> runs(starts.size());
    parallel_for(starts.size(), options.threads, [&](std::size_t i) { runs[i] = problem.minimize(dataset, starts[i]); });

    std::size_t best = 0;
    for(std::size_t i = 1; i < runs.size(); ++i)
        if(runs[i].value < runs[best].value) best = i;

    CollapseFit fit;
    fit.params    = problem.unpack(runs[best].x);
    fit.quality   = runs[best].value;
    fit.beta_mode = options.beta_mode;
    fit.window    = problem.window;
    fit.initial   = init;
    fit.converged = runs[best].converged;
    for(const auto &r : runs) fit.evaluations += r.evaluations;

    auto near_bound = [](double v, Bounds b) {
        const double tol = 1e-6 * (b.hi - b.lo);
        return v <= b.lo + tol || v >= b.hi - tol;
    };
    if(near_bound(fit.params.h_c, options.h_c_bounds)) fit.at_bound.emplace_back("h_c");
    if(near_bound(fit.params.nu, options.nu_bounds)) fit.at_bound.emplace_back("nu");
    if(options.beta_mode == BetaMode::free && near_bound(fit.params.beta, options.beta_bounds))
        fit.at_bound.emplace_back("beta");

    if(fit.quality >= std::numeric_limits<double>::max())
        throw CollapseFitError("collapse quality could not be evaluated anywhere in the parameter box; too few points overlap inside the h window", fit);
    if(!fit.converged)
        throw CollapseFitError("simplex did not converge within " + std::to_string(options.max_evaluations) +
                                   " evaluations",
                               fit);

    // Parametric bootstrap: perturb every point by its own standard error and refit.
    if(options.bootstrap > 0) {
        std::vector<CollapseParams> samples(static_cast<std::size_t>(options.bootstrap));
        parallel_for(samples.size(), options.threads, [&](std::size_t b) {
            CounterRng     rng(derive_key(options.seed, b));
            ScalingDataset resampled;
            for(const auto &[L, curve] : dataset.curves)
                for(const auto &p : curve) resampled.add(L, {p.h, p.value + p.error * rng.gaussian(), p.error});
            samples[b] = problem.unpack(problem.minimize(resampled, fit.params).x);
        });
        auto stddev = [&](auto member) {
            if(samples.size() < 2) return 0.0;
            double mean = 0.0;
            for(const auto &s : samples) mean += s.*member;
            mean /= static_cast<double>(samples.size());
            double ss = 0.0;
            for(const auto &s : samples) ss += (s.*member - mean) * (s.*member - mean);
            return std::sqrt(ss / static_cast<double>(samples.size() - 1));
        };
        fit.errors.h_c        = stddev(&CollapseParams::h_c);
        fit.errors.nu         = stddev(&CollapseParams::nu);
        fit.errors.beta       = options.beta_mode == BetaMode::free ? stddev(&CollapseParams::beta) : 0.0;
        fit.bootstrap_samples = options.bootstrap;
    } else {
        fit.errors = {0.0, 0.0, 0.0};
    }
    return fit;
}

} // namespace mbl::scaling
