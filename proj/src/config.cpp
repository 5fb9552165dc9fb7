#include "mbl/config.hpp"

#include "mbl/errors.hpp"

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace mbl {

namespace {

using nlohmann::json;
using scaling::Bounds;

std::string line_column(const std::string &text, std::size_t byte) {
    std::size_t line = 1, column = 1;
    for(std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if(text[i] == '\n') {
            ++line;
            column = 1;
        } else {
            ++column;
        }
    }
    return std::to_string(line) + ":" + std::to_string(column);
}

class Section {
  public:
    Section(const json &node, std::string path) : node_(node), path_(std::move(path)) {
        if(!node_.is_object()) throw ConfigError(path_ + ": expected an object");
    }

    const json *find(const std::string &key) {
        seen_.insert(key);
        auto it = node_.find(key);
        if(it == node_.end() || it->is_null()) return nullptr;
        return &*it;
    }

    std::string field(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }

    template<typename T>
    std::optional<T> get(const std::string &key) {
        const json *v = find(key);
        if(!v) return std::nullopt;
        try {
            if constexpr(std::is_same_v<T, double>) {
                if(!v->is_number()) throw ConfigError("");
            } else if constexpr(std::is_same_v<T, bool>) {
                if(!v->is_boolean()) throw ConfigError("");
            } else if constexpr(std::is_same_v<T, std::string>) {
                if(!v->is_string()) throw ConfigError("");
            } else if constexpr(std::is_integral_v<T>) {
                if(!v->is_number_integer()) throw ConfigError("");
                if constexpr(std::is_unsigned_v<T>)
                    if(v->is_number_integer() && !v->is_number_unsigned()) throw ConfigError("");
            }
            return v->get<T>();
        } catch(const std::exception &) {
            throw ConfigError(field(key) + ": expected " + type_name<T>() + ", got " + v->dump());
        }
    }

    template<typename T>
    void read(const std::string &key, T &target) {
        if(auto v = get<T>(key)) target = *v;
    }

    template<typename T>
    std::optional<std::vector<T>> list(const std::string &key) {
        const json *v = find(key);
        if(!v) return std::nullopt;
        if(!v->is_array()) throw ConfigError(field(key) + ": expected a list");
        std::vector<T> out;
        for(std::size_t i = 0; i < v->size(); ++i) {
            const auto &e = (*v)[i];
            const bool  ok = std::is_integral_v<T> ? e.is_number_integer() : e.is_number();
            if(!ok)
                throw ConfigError(field(key) + "[" + std::to_string(i) + "]: expected " + type_name<T>() + ", got " +
                                  e.dump());
            out.push_back(e.get<T>());
        }
        return out;
    }

    Bounds bounds(const std::string &key, Bounds fallback) {
        auto v = list<double>(key);
        if(!v) return fallback;
        if(v->size() != 2 || !((*v)[0] < (*v)[1]))
            throw ConfigError(field(key) + ": expected [lo, hi] with lo < hi");
        return {(*v)[0], (*v)[1]};
    }

    std::optional<Section> child(const std::string &key) {
        const json *v = find(key);
        if(!v) return std::nullopt;
        return Section(*v, field(key));
    }

    void reject_unknown() const {
        for(auto it = node_.begin(); it != node_.end(); ++it)
            if(!seen_.count(it.key())) throw ConfigError(field(it.key()) + ": unknown field");
    }

  private:
    template<typename T>
    static std::string type_name() {
        if constexpr(std::is_same_v<T, double>) return "a number";
        else if constexpr(std::is_same_v<T, bool>) return "true or false";
        else if constexpr(std::is_same_v<T, std::string>) return "a string";
        else if constexpr(std::is_unsigned_v<T>) return "a non-negative integer";
        else return "an integer";
    }

    const json           &node_;
    std::string           path_;
    std::set<std::string> seen_;
};

void read_physics(Section s, SweepConfig &c) {
    if(auto v = s.list<int>("sizes")) c.sizes = *v;
    if(auto v = s.get<std::string>("ratio")) {
        try {
            c.ratio = Ratio::parse(*v);
        } catch(const std::exception &e) {
            throw ConfigError(s.field("ratio") + ": " + e.what());
        }
    }
    if(auto v = s.get<int>("message_sites")) c.message_sites = *v;
    if(auto v = s.get<std::string>("environment")) {
        try {
            c.environment = parse_environment(*v);
        } catch(const std::exception &) {
            throw ConfigError(s.field("environment") + ": expected neel, evolved or eigenstate, got '" + *v + "'");
        }
    }
    s.read("exchange", c.exchange);
    if(auto v = s.get<double>("t_neel")) c.t_neel = *v;
    s.read("full_space", c.full_space);
    s.reject_unknown();
}

void read_disorder(Section s, SweepConfig &c) {
    if(auto v = s.list<double>("strengths")) c.disorder_strengths = *v;
    if(auto v = s.get<int>("realizations")) c.realizations = *v;
    s.read("seed", c.seed);
    s.reject_unknown();
}

void read_grid(Section s, TimeGridParams &g) {
    s.read("transient_points", g.transient_points);
    s.read("window_points", g.window_points);
    s.read("transient_decades", g.transient_decades);
    s.read("t1_scale", g.t1_scale);
    s.read("t0_fraction", g.t0_fraction);
    s.reject_unknown();
}

void read_analysis(Section s, scaling::CollapseOptions &a) {
    if(auto v = s.get<std::string>("beta_mode")) {
        try {
            a.beta_mode = scaling::parse_beta_mode(*v);
        } catch(const std::exception &) {
            throw ConfigError(s.field("beta_mode") + ": expected free or pinned, got '" + *v + "'");
        }
    }
    a.h_c_bounds  = s.bounds("h_c_bounds", a.h_c_bounds);
    a.nu_bounds   = s.bounds("nu_bounds", a.nu_bounds);
    a.beta_bounds = s.bounds("beta_bounds", a.beta_bounds);
    s.read("window_half_width", a.window_half_width);
    s.read("neighbors", a.neighbors);
    s.read("multistarts", a.multistarts);
    s.read("bootstrap", a.bootstrap);
    s.read("seed", a.seed);
    s.read("max_evaluations", a.max_evaluations);
    s.reject_unknown();

    if(!(a.window_half_width > 0.0)) throw ConfigError(s.field("window_half_width") + ": must be positive");
    if(a.neighbors < 2) throw ConfigError(s.field("neighbors") + ": must be at least 2");
    if(a.multistarts < 1) throw ConfigError(s.field("multistarts") + ": must be at least 1");
    if(a.bootstrap < 0) throw ConfigError(s.field("bootstrap") + ": must be non-negative");
    if(a.max_evaluations < 10) throw ConfigError(s.field("max_evaluations") + ": must be at least 10");
    if(!(a.nu_bounds.lo > 0.0)) throw ConfigError(s.field("nu_bounds") + ": lower bound must be positive");
}

json bounds_json(Bounds b) { return json::array({b.lo, b.hi}); }

} // namespace

ExperimentConfig parse_config(const std::string &text, const std::string &source) {
    json root;
    try {
        root = json::parse(text);
    } catch(const json::parse_error &e) {
        throw ConfigError(source + ":" + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": invalid JSON (" +
                          e.what() + ")");
    }

    ExperimentConfig config;
    try {
        Section top(root, "");
        if(auto s = top.child("physics")) read_physics(*s, config.sweep);
        if(auto s = top.child("disorder")) read_disorder(*s, config.sweep);
        if(auto s = top.child("time_grid")) read_grid(*s, config.sweep.grid);
        if(auto s = top.child("analysis")) read_analysis(*s, config.analysis);
        if(auto s = top.child("run")) {
            s->read("threads", config.threads);
            s->reject_unknown();
        }
        top.reject_unknown();
        config.sweep.validate();
    } catch(const ConfigError &e) {
        throw ConfigError(source + ": " + e.what());
    }
    return config;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if(!in) throw ConfigError("cannot read config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), path.string());
}

json to_json(const ExperimentConfig &config) {
    const auto &c = config.sweep;
    const auto &a = config.analysis;
    json        j;
    j["physics"] = {
        {"sizes", c.sizes},
        {"ratio", c.ratio.to_string()},
        {"message_sites", c.message_sites ? json(*c.message_sites) : json(nullptr)},
        {"environment", std::string(to_string(c.environment))},
        {"exchange", c.exchange},
        {"t_neel", c.t_neel ? json(*c.t_neel) : json(nullptr)},
        {"full_space", c.full_space},
    };
    j["disorder"] = {
        {"strengths", c.disorder_strengths},
        {"realizations", c.realizations ? json(*c.realizations) : json(nullptr)},
        {"seed", c.seed},
    };
    j["time_grid"] = {
        {"transient_points", c.grid.transient_points}, {"window_points", c.grid.window_points},
        {"transient_decades", c.grid.transient_decades}, {"t1_scale", c.grid.t1_scale},
        {"t0_fraction", c.grid.t0_fraction},
    };
    j["analysis"] = {
        {"beta_mode", std::string(scaling::to_string(a.beta_mode))},
        {"h_c_bounds", bounds_json(a.h_c_bounds)},
        {"nu_bounds", bounds_json(a.nu_bounds)},
        {"beta_bounds", bounds_json(a.beta_bounds)},
        {"window_half_width", a.window_half_width},
        {"neighbors", a.neighbors},
        {"multistarts", a.multistarts},
        {"bootstrap", a.bootstrap},
        {"seed", a.seed},
        {"max_evaluations", a.max_evaluations},
    };
    return j;
}

std::string config_hash(const ExperimentConfig &config) {
    const std::string text = to_json(config).dump();
    std::uint64_t     h    = 0xcbf29ce484222325ULL;
    for(unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace mbl
