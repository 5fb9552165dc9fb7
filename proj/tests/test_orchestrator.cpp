#include "doctest.h"

#include "oracles.hpp"

#include "mbl/errors.hpp"
#include "mbl/random.hpp"
#include "mbl/results_io.hpp"
#include "mbl/sweep.hpp"

#include <cstring>
#include <numbers>
#include <set>
#include <sstream>

using namespace mbl;

namespace {

SweepConfig small_config() {
    SweepConfig c;
    c.sizes              = {6, 9};
    c.ratio              = {1, 3};
    c.disorder_strengths = {0.5, 3.0};
    c.realizations       = 4;
    c.seed               = 99;
    c.grid.window_points = 16;
    return c;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool same_bits(const std::vector<double> &a, const std::vector<double> &b) {
    if(a.size() != b.size()) return false;
    for(std::size_t i = 0; i < a.size(); ++i)
        if(!same_bits(a[i], b[i])) return false;
    return true;
}

} // namespace

TEST_CASE("field sampling") {
    CHECK(sample_fields(0.0, 5, 123) == std::vector<double>(5, 0.0));
    CHECK(sample_fields(2.0, 7, 42) == sample_fields(2.0, 7, 42));
    CHECK(sample_fields(2.0, 7, 42) != sample_fields(2.0, 7, 43));
    CHECK_THROWS_AS(sample_fields(-1.0, 3, 1), DomainError);

    const double h = 3.0;
    const int    n = 100000;
    const auto   f = sample_fields(h, n, realization_key(1, 12, h, 0));
    oracle::Welford w;
    for(double x : f) {
        CHECK(x >= -h);
        CHECK(x < h);
        w.add(x);
    }
    const double var       = h * h / 3.0;
    const double var_stdev = std::sqrt((std::pow(h, 4) / 5.0 - var * var) / n);
    CHECK(std::abs(w.mean) <= 3.0 * std::sqrt(var / n));
    CHECK(std::abs(w.m2 / (n - 1) - var) <= 3.0 * var_stdev);
}

TEST_CASE("realization keys separate every cell") {
    std::set<std::uint64_t> keys;
    for(int L : {6, 9, 12})
        for(double h : {0.5, 1.0, 2.0})
            for(std::uint64_t i = 0; i < 50; ++i) keys.insert(realization_key(7, L, h, i));
    CHECK(keys.size() == 3 * 3 * 50);
    CHECK(realization_key(7, 6, 0.0, 1) == realization_key(7, 6, -0.0, 1));
    CHECK(realization_key(7, 6, 1.0, 1) != realization_key(8, 6, 1.0, 1));
}

TEST_CASE("counter RNG gaussian moments") {
    CounterRng      rng(5);
    oracle::Welford w;
    for(int i = 0; i < 100000; ++i) w.add(rng.gaussian());
    CHECK(std::abs(w.mean) <= 3.0 / std::sqrt(100000.0));
    CHECK(std::abs(w.m2 / (w.n - 1) - 1.0) <= 3.0 * std::sqrt(2.0 / 100000.0));
}

TEST_CASE("time grid layout") {
    const auto g = make_time_grid(12, {});
    CHECK(g.t1 == 144.0);
    CHECK(g.t0 == 18.0);
    REQUIRE(g.times.size() == 1 + 16 + 64);
    CHECK(g.times[0] == 0.0);
    CHECK(g.times[1] == doctest::Approx(0.18));
    CHECK(g.times[17] == 18.0);
    CHECK(g.times.back() == 144.0);
    for(std::size_t i = 1; i < g.times.size(); ++i) CHECK(g.times[i] > g.times[i - 1]);
}

TEST_CASE("single realization") {
    SweepConfig c = small_config();
    const auto  r = run_realization(c, 6, 2.0, 3);
    REQUIRE(r.ok);
    CHECK(r.message_sites == 2);
    CHECK(r.fields.size() == 6);
    CHECK(std::abs(r.rates.front() - 1.0) <= 1e-9);
    CHECK(r.times == make_time_grid(6, c.grid).times);
    for(double x : r.rates) {
        CHECK(x >= 0.0);
        CHECK(x <= 1.0 + 1e-12);
    }

    const auto again = run_realization(c, 6, 2.0, 3);
    CHECK(same_bits(r.rates, again.rates));
    CHECK(same_bits(r.steady_state, again.steady_state));

    SweepConfig dense = c;
    dense.full_space  = true;
    const auto d      = run_realization(dense, 6, 2.0, 3);
    REQUIRE(d.ok);
    for(std::size_t i = 0; i < d.rates.size(); ++i) CHECK(std::abs(d.rates[i] - r.rates[i]) <= 1e-8);

    for(auto env : {EnvironmentKind::evolved_neel, EnvironmentKind::mid_spectrum_eigenstate}) {
        SweepConfig e = c;
        e.environment = env;
        const auto x  = run_realization(e, 6, 2.0, 3);
        REQUIRE(x.ok);
        CHECK(std::abs(x.rates.front() - 1.0) <= 1e-9);
    }
}

TEST_CASE("failed realizations are recorded rather than thrown") {
    SweepConfig c        = small_config();
    c.grid.window_points = 4;
    const auto r         = run_realization(c, 6, 1.0, 0);
    CHECK_FALSE(r.ok);
    CHECK_FALSE(r.error.empty());
    CHECK_THROWS_AS(run_sweep(c, 1), ConfigError);

    SweepResult s;
    s.realizations.resize(10);
    s.failures = 2;
    CHECK(s.failure_fraction() == doctest::Approx(0.2));
}

TEST_CASE("strong disorder retains more than weak disorder in most realizations") {
    SweepConfig c;
    c.sizes              = {8};
    c.message_sites      = 2;
    c.disorder_strengths = {0.5, 6.0};
    c.seed               = 2024;
    int wins             = 0;
    for(std::uint64_t i = 0; i < 20; ++i) {
        const auto weak   = run_realization(c, 8, 0.5, i);
        const auto strong = run_realization(c, 8, 6.0, i);
        REQUIRE(weak.ok);
        REQUIRE(strong.ok);
        if(strong.steady_state > weak.steady_state) ++wins;
    }
    CHECK(wins > 10);
}

TEST_CASE("steady-state average") {
    TimeGridParams coarse, fine;
    fine.window_points = 1024;
    const auto gc      = make_time_grid(9, coarse);
    const auto gf      = make_time_grid(9, fine);
    auto       eval    = [](const TimeGrid &g, auto f) {
        std::vector<double> v;
        for(double t : g.times) v.push_back(f(t));
        return steady_state_average(g.times, v, g.t0, g.t1);
    };

    CHECK(eval(gc, [](double) { return 0.37; }) == doctest::Approx(0.37).epsilon(1e-14));
    const double linear = eval(gc, [](double t) { return 0.2 + 0.01 * t; });
    CHECK(std::abs(linear - (0.2 + 0.01 * 0.5 * (gc.t0 + gc.t1))) <= 1e-12);

    const double period = (gc.t1 - gc.t0) / 3.7;
    auto         wave   = [&](double t) { return 0.5 + 0.1 * std::sin(2.0 * std::numbers::pi * t / period); };
    CHECK(std::abs(eval(gc, wave) - eval(gf, wave)) <= 1e-3);

    std::vector<double> t{0, 1, 2, 3}, v{1, 1, 1, 1};
    CHECK_THROWS_AS(steady_state_average(t, v, 0.0, 3.0), DomainError);
    std::vector<double> t2{0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, v2(10, 1.0);
    CHECK_THROWS_AS(steady_state_average(t2, v2, 1.0, 12.0), DomainError);
    CHECK(steady_state_average(t2, v2, 1.0, 8.0) == doctest::Approx(1.0));
}

TEST_CASE("disorder average") {
    const std::vector<double> one{0.4};
    const auto                s1 = disorder_average(one);
    CHECK(s1.mean == 0.4);
    CHECK(std::isnan(s1.std_error));
    CHECK(s1.count == 1);

    const std::vector<double> same(10, 0.25);
    CHECK(disorder_average(same).std_error == 0.0);

    std::mt19937_64                        gen(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double>                    xs(1000);
    oracle::Welford                        w;
    for(auto &x : xs) {
        x = u(gen);
        w.add(x);
    }
    const auto s = disorder_average(xs);
    CHECK(std::abs(s.mean - w.mean) <= 1e-12);
    CHECK(std::abs(s.std_error - w.std_error()) <= 1e-12);
    CHECK_THROWS_AS(disorder_average(std::vector<double>{}), DomainError);
}

TEST_CASE("sweep output is independent of the worker count") {
    const auto c  = small_config();
    const auto a  = run_sweep(c, 1);
    const auto b  = run_sweep(c, 3);
    auto       as = [](const SweepResult &r) {
        std::ostringstream out;
        io::write_results(out, "h", r.realizations);
        io::write_aggregate(out, "h", r.aggregate);
        for(const auto &t : r.traces) io::write_trace(out, "h", t);
        return out.str();
    };
    CHECK(as(a) == as(b));
    CHECK(a.failures == 0);
    REQUIRE(a.aggregate.size() == 4);
    CHECK(a.aggregate[0].sites == 6);
    CHECK(a.aggregate[0].disorder == 0.5);
    CHECK(a.aggregate[3].sites == 9);
    CHECK(a.aggregate[3].message_sites == 3);
    CHECK(a.aggregate[0].count == 4);

    // The aggregate is the mean of the per-realization steady states.
    oracle::Welford w;
    for(int i = 0; i < 4; ++i) w.add(a.realizations[static_cast<std::size_t>(i)].steady_state);
    CHECK(std::abs(a.aggregate[0].mean - w.mean) <= 1e-12);
    CHECK(std::abs(a.aggregate[0].std_error - w.std_error()) <= 1e-12);
}

TEST_CASE("results and aggregate files round-trip bit-exactly") {
    const auto         r = run_sweep(small_config(), 2);
    std::ostringstream rs, as;
    io::write_results(rs, "abc123", r.realizations);
    io::write_aggregate(as, "abc123", r.aggregate);

    std::istringstream ri(rs.str()), ai(as.str());
    std::string        hash;
    const auto         rows = io::read_results(ri, &hash);
    CHECK(hash == "abc123");
    REQUIRE(rows.size() == r.realizations.size());
    for(std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].seed == r.realizations[i].seed);
        CHECK(same_bits(rows[i].fields, r.realizations[i].fields));
        CHECK(same_bits(rows[i].rates, r.realizations[i].rates));
        CHECK(same_bits(rows[i].times, r.realizations[i].times));
        CHECK(same_bits(rows[i].steady_state, r.realizations[i].steady_state));
    }
    const auto agg = io::read_aggregate(ai);
    REQUIRE(agg.size() == r.aggregate.size());
    for(std::size_t i = 0; i < agg.size(); ++i) {
        CHECK(same_bits(agg[i].mean, r.aggregate[i].mean));
        CHECK(same_bits(agg[i].std_error, r.aggregate[i].std_error));
    }

    for(double x : {0.1, 1.0 / 3.0, 1e-300, 6.02e23, -0.0, 5e-324})
        CHECK(same_bits(io::parse_double(io::format_double(x)), x));
    CHECK(std::isnan(io::parse_double("nan")));

    std::istringstream bad("not,a,header\n");
    CHECK_THROWS_AS(io::read_aggregate(bad), DomainError);
}

TEST_CASE("sweep configuration validation") {
    auto c = small_config();
    CHECK_NOTHROW(c.validate());
    auto e1               = c;
    e1.disorder_strengths = {};
    CHECK_THROWS_AS(e1.validate(), ConfigError);
    auto e2  = c;
    e2.sizes = {7};
    CHECK_THROWS_AS(e2.validate(), ConfigError);
    auto e3          = c;
    e3.message_sites = 2;
    CHECK_THROWS_AS(e3.validate(), ConfigError);
    auto e4         = c;
    e4.realizations = 0;
    CHECK_THROWS_AS(e4.validate(), ConfigError);
    auto e5               = c;
    e5.disorder_strengths = {1.0, 1.0};
    CHECK_THROWS_AS(e5.validate(), ConfigError);

    CHECK(Ratio::parse("1/3").value() == doctest::Approx(1.0 / 3.0));
    CHECK_THROWS_AS(Ratio::parse("3/3"), ConfigError);
    CHECK_THROWS_AS(Ratio::parse("one third"), ConfigError);
    CHECK(default_realizations(9) == 200);
    CHECK(default_realizations(12) == 100);
}
