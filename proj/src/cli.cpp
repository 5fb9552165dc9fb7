#include "mbl/cli.hpp"

#include "mbl/config.hpp"
#include "mbl/errors.hpp"
#include "mbl/kernels.hpp"
#include "mbl/results_io.hpp"
#include "mbl/scaling.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

namespace mbl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Overrides {
    std::string         config_path;
    std::string         out_dir = ".";
    std::optional<unsigned>      threads;
    std::optional<std::uint64_t> seed;
    std::vector<int>    sizes;
    std::string         ratio;
    std::string         env;
    std::string         beta_mode;
    std::string         aggregate;
    bool                quiet = false;
};

std::string utc_now() {
    const auto  now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm     tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_file(const fs::path &path, const std::string &content) {
    if(path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if(!out) throw ComputationError("cannot write " + path.string());
    out << content;
    if(!out) throw ComputationError("failed writing " + path.string());
}

ExperimentConfig resolve_config(const Overrides &o, bool required) {
    ExperimentConfig config;
    if(!o.config_path.empty()) {
        if(!fs::exists(o.config_path)) throw ConfigError("config file not found: " + o.config_path);
        config = load_config(o.config_path);
    } else if(required) {
        throw ConfigError("--config is required");
    }
    auto &s = config.sweep;
    if(!o.sizes.empty()) {
        s.sizes = o.sizes;
        if(s.sizes.size() > 1) s.message_sites.reset();
    }
    if(!o.ratio.empty()) {
        try {
            s.ratio = Ratio::parse(o.ratio);
        } catch(const std::exception &e) {
            throw ConfigError(std::string("--ratio: ") + e.what());
        }
        s.message_sites.reset();
    }
    if(!o.env.empty()) {
        try {
            s.environment = parse_environment(o.env);
        } catch(const std::exception &e) {
            throw ConfigError(std::string("--env: ") + e.what());
        }
    }
    if(o.seed) {
        s.seed               = *o.seed;
        config.analysis.seed = *o.seed;
    }
    if(!o.beta_mode.empty()) {
        try {
            config.analysis.beta_mode = scaling::parse_beta_mode(o.beta_mode);
        } catch(const std::exception &e) {
            throw ConfigError(std::string("--beta-mode: ") + e.what());
        }
    }
    if(o.threads) config.threads = *o.threads;
    return config;
}

json manifest(const std::string &command, const ExperimentConfig &config, unsigned threads,
              const std::string &started) {
    json m;
    m["tool"]           = tool_name;
    m["version"]        = tool_version;
    m["schema_version"] = io::schema_version;
    m["command"]        = command;
    m["config"]         = to_json(config);
    m["config_hash"]    = config_hash(config);
    m["kernel_backend"] = std::string(kernels::name(kernels::active().backend));
    m["threads"]        = threads;
    m["started_at"]     = started;
    return m;
}

std::function<void(const SweepProgress &)> reporter(std::ostream &err, bool quiet) {
    if(quiet) return {};
    return [&err, last = std::size_t{0}](const SweepProgress &p) mutable {
        const std::size_t pct = p.total ? 100 * p.done / p.total : 100;
        if(pct / 10 > last / 10 || p.done == p.total) {
            err << "  " << p.done << "/" << p.total << " realizations\n" << std::flush;
            last = pct;
        }
    };
}

int sweep_like(const std::string &command, const Overrides &o, std::ostream &out, std::ostream &err) {
    const auto  config  = resolve_config(o, true);
    const auto  started = utc_now();
    const auto  threads = resolve_threads(config.threads);
    const auto  hash    = config_hash(config);
    const fs::path dir(o.out_dir);

    const auto result = run_sweep(config.sweep, threads, reporter(err, o.quiet));

    json outputs = json::array();
    if(command == "sweep") {
        std::ostringstream results, aggregate;
        io::write_results(results, hash, result.realizations);
        io::write_aggregate(aggregate, hash, result.aggregate);
        write_file(dir / "results.csv", results.str());
        write_file(dir / "aggregate.csv", aggregate.str());
        outputs.push_back("results.csv");
        outputs.push_back("aggregate.csv");
    }
    for(const auto &trace : result.traces) {
        std::ostringstream text;
        io::write_trace(text, hash, trace);
        const auto name = io::trace_file_name(trace);
        write_file(dir / name, text.str());
        outputs.push_back(name);
    }

    const double fraction = result.failure_fraction();
    const bool   partial  = exit_code_for_failures(fraction) == exit_partial_failure;
    auto         m        = manifest(command, config, threads, started);
    m["outputs"]          = outputs;
    m["realizations"]     = result.realizations.size();
    m["failures"]         = result.failures;
    m["failure_fraction"] = fraction;
    m["status"]           = partial ? "partial_failure" : "ok";
    m["finished_at"]      = utc_now();
    write_file(dir / "manifest.json", m.dump(2) + "\n");

    for(const auto &r : result.aggregate)
        out << "L=" << r.sites << " l=" << r.message_sites << " h=" << io::format_double(r.disorder)
            << " R_ss=" << io::format_double(r.mean) << " +- " << io::format_double(r.std_error) << " (n=" << r.count
            << ")\n";
    if(result.failures) {
        err << result.failures << " of " << result.realizations.size() << " realizations failed";
        for(const auto &r : result.realizations)
            if(!r.ok) {
                err << "; first failure: L=" << r.sites << " h=" << io::format_double(r.disorder) << " #" << r.index
                    << ": " << r.error;
                break;
            }
        err << "\n";
    }
    if(partial) {
        err << "error: failure fraction " << fraction << " exceeds " << failure_threshold << "\n";
        return exit_partial_failure;
    }
    return exit_ok;
}

json params_json(const scaling::CollapseParams &p) { return {{"h_c", p.h_c}, {"nu", p.nu}, {"beta", p.beta}}; }

json fit_json(const scaling::CollapseFit &f) {
    return {
        {"beta_mode", std::string(scaling::to_string(f.beta_mode))},
        {"params", params_json(f.params)},
        {"errors", params_json(f.errors)},
        {"quality", f.quality},
        {"window", {f.window.lo, f.window.hi}},
        {"initial", params_json(f.initial)},
        {"evaluations", f.evaluations},
        {"converged", f.converged},
        {"at_bound", f.at_bound},
        {"bootstrap_samples", f.bootstrap_samples},
    };
}

struct FitOutcome {
    std::optional<scaling::CollapseFit> fit;
    json                                report;
    std::string                         error;
};

FitOutcome run_fit(const scaling::ScalingDataset &data, std::optional<scaling::CollapseParams> initial,
                   const scaling::CollapseOptions &options) {
    FitOutcome o;
    try {
        o.fit    = scaling::fit_collapse(data, initial, options);
        o.report = fit_json(*o.fit);
    } catch(const scaling::CollapseFitError &e) {
        o.error           = e.what();
        o.report          = fit_json(e.best());
        o.report["error"] = o.error;
    } catch(const AnalysisError &e) {
        o.error  = e.what();
        o.report = {{"beta_mode", std::string(scaling::to_string(options.beta_mode))}, {"error", o.error}};
    }
    return o;
}

int collapse(const Overrides &o, std::ostream &out, std::ostream &err) {
    const auto config  = resolve_config(o, false);
    const auto started = utc_now();
    const fs::path dir(o.out_dir);

    if(!fs::exists(o.aggregate)) throw ConfigError("aggregate file not found: " + o.aggregate);
    std::string source_hash;
    std::vector<SteadyStateRecord> records;
    try {
        records = io::read_aggregate_file(o.aggregate, &source_hash);
    } catch(const DomainError &e) {
        throw AnalysisError(o.aggregate + ": " + e.what());
    }

    // One (environment, l/L) group per fit.
    std::map<std::pair<std::string, std::string>, std::vector<SteadyStateRecord>> groups;
    for(const auto &r : records) {
        if(!o.env.empty() && r.environment != config.sweep.environment) continue;
        const int g = std::gcd(r.message_sites, r.sites);
        const Ratio ratio{r.message_sites / g, r.sites / g};
        if(!o.ratio.empty() && (ratio.numerator != config.sweep.ratio.numerator ||
                                ratio.denominator != config.sweep.ratio.denominator))
            continue;
        groups[{std::string(to_string(r.environment)), ratio.to_string()}].push_back(r);
    }
    if(groups.empty()) throw AnalysisError("no aggregate rows match the requested environment and ratio");
    if(groups.size() > 1) {
        std::string list;
        for(const auto &[key, _] : groups) list += " (" + key.first + ", " + key.second + ")";
        throw AnalysisError("aggregate holds several groups:" + list + "; select one with --env and --ratio");
    }
    const auto &[key, rows] = *groups.begin();

    const auto data = scaling::ScalingDataset::from_records(rows);
    data.validate();

    json report;
    report["environment"]    = key.first;
    report["ratio"]          = key.second;
    report["sizes"]          = json::array();
    for(const auto &[L, _] : data.curves) report["sizes"].push_back(L);
    report["source"]         = o.aggregate;
    report["source_hash"]    = source_hash;

    std::optional<scaling::CollapseParams> initial;
    try {
        const auto cross = scaling::crossing_points(data);
        json       list  = json::array();
        for(const auto &c : cross.crossings)
            list.push_back({{"sizes", {c.size_a, c.size_b}}, {"h", c.h}, {"slope_gap", c.slope_gap}});
        report["crossings"] = {{"pairs", list},
                               {"pooled_mean", cross.pooled_mean},
                               {"pooled_spread", cross.pooled_spread},
                               {"degenerate", cross.degenerate},
                               {"no_crossing", cross.no_crossing}};
        initial = scaling::CollapseParams{cross.pooled_mean, 1.0, 0.0};
    } catch(const AnalysisError &e) {
        report["crossings"] = {{"error", e.what()}};
    }
    if(!initial) {
        const double mid = 0.5 * (config.analysis.h_c_bounds.lo + config.analysis.h_c_bounds.hi);
        initial          = scaling::CollapseParams{mid, 1.0, 0.0};
    }

    auto options    = config.analysis;
    options.threads = resolve_threads(config.threads);
    auto other      = options;
    other.beta_mode = options.beta_mode == scaling::BetaMode::free ? scaling::BetaMode::pinned : scaling::BetaMode::free;

    const auto primary   = run_fit(data, initial, options);
    const auto alternate = run_fit(data, initial, other);
    report["fit"]        = primary.report;
    report["alternate"]  = alternate.report;

    json outputs = json::array({"collapse_fit.json"});
    if(primary.fit) {
        std::ostringstream table;
        table << "L,h,x,y,dy,in_window\n";
        const auto &f = *primary.fit;
        for(const auto &p : scaling::collapse_transform(data, f.params))
            table << p.sites << ',' << io::format_double(p.h) << ',' << io::format_double(p.x) << ','
                  << io::format_double(p.y) << ',' << io::format_double(p.dy) << ','
                  << (p.h >= f.window.lo && p.h <= f.window.hi ? 1 : 0) << '\n';
        write_file(dir / "collapse_table.csv", table.str());
        outputs.push_back("collapse_table.csv");
    }
    write_file(dir / "collapse_fit.json", report.dump(2) + "\n");

    auto m           = manifest("collapse", config, options.threads, started);
    m["outputs"]     = outputs;
    m["status"]      = primary.fit ? "ok" : "analysis_error";
    m["finished_at"] = utc_now();
    write_file(dir / "manifest.json", m.dump(2) + "\n");

    if(!primary.fit) {
        err << "error: " << primary.error << "\n";
        return exit_analysis_error;
    }
    const auto &p = primary.fit->params;
    const auto &e = primary.fit->errors;
    out << "beta_mode=" << scaling::to_string(options.beta_mode) << " h_c=" << p.h_c << " +- " << e.h_c
        << " nu=" << p.nu << " +- " << e.nu << " beta=" << p.beta << " +- " << e.beta
        << " quality=" << primary.fit->quality << "\n";
    if(!primary.fit->at_bound.empty()) {
        out << "warning: parameters at bound:";
        for(const auto &b : primary.fit->at_bound) out << ' ' << b;
        out << "\n";
    }
    return exit_ok;
}

int validate(const Overrides &o, std::ostream &out) {
    const auto config = resolve_config(o, true);
    out << "config ok: " << o.config_path << "\n";
    out << "config_hash=" << config_hash(config) << "\n";
    out << to_json(config).dump(2) << "\n";
    return exit_ok;
}

void add_common(CLI::App *sub, Overrides &o, bool sweep_flags) {
    sub->add_option("--config", o.config_path, "Experiment config (JSON)");
    sub->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--threads", o.threads, "Worker threads (0 = all cores)");
    sub->add_option("--seed", o.seed, "Override the master seed");
    sub->add_option("--env", o.env, "Environment: neel, evolved or eigenstate");
    sub->add_option("--ratio", o.ratio, "Message fraction l/L, e.g. 1/3");
    if(sweep_flags) {
        sub->add_option("--sizes", o.sizes, "Comma-separated system sizes")->delimiter(',');
        sub->add_flag("--quiet", o.quiet, "Suppress progress output");
    }
}

} // namespace

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Information retention of disordered spin rings", tool_name};
    app.set_version_flag("--version", tool_version);
    app.require_subcommand(1);

    Overrides o;
    auto *trace = app.add_subcommand("trace", "Disorder-averaged R(t) per (L, h)");
    add_common(trace, o, true);
    auto *sweep = app.add_subcommand("sweep", "Steady-state rate over sizes and disorder strengths");
    add_common(sweep, o, true);
    auto *coll = app.add_subcommand("collapse", "Crossings and finite-size collapse of an aggregate table");
    coll->add_option("aggregate", o.aggregate, "aggregate.csv written by sweep")->required();
    add_common(coll, o, false);
    coll->add_option("--beta-mode", o.beta_mode, "free or pinned (beta = 0)");
    auto *check = app.add_subcommand("validate-config", "Parse and resolve a config without running");
    check->add_option("--config", o.config_path, "Experiment config (JSON)")->required();

    std::vector<std::string> argv_store{tool_name};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<const char *> argv;
    for(const auto &a : argv_store) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch(const CLI::ParseError &e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_config_error;
    }

    try {
        if(*trace) return sweep_like("trace", o, out, err);
        if(*sweep) return sweep_like("sweep", o, out, err);
        if(*coll) return collapse(o, out, err);
        if(*check) return validate(o, out);
    } catch(const ConfigError &e) {
        err << "config error: " << e.what() << "\n";
        return exit_config_error;
    } catch(const std::exception &e) {
        err << "error: " << e.what() << "\n";
        return exit_analysis_error;
    }
    return exit_config_error;
}

} // namespace mbl::cli
