#include "mbl/results_io.hpp"

#include "mbl/errors.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace mbl::io {

namespace {

constexpr std::string_view results_header =
    "schema_version,config_hash,L,l,h,env,realization,seed,status,r_ss,fields,times,rates,error";
constexpr std::string_view aggregate_header = "schema_version,config_hash,L,l,h,env,mean,stderr,n";

std::vector<std::string> split(const std::string &line, char sep) {
    std::vector<std::string> out;
    std::string              cell;
    std::istringstream       ss(line);
    while(std::getline(ss, cell, sep)) out.push_back(cell);
    if(!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

std::string join(const std::vector<double> &values) {
    std::string out;
    for(std::size_t i = 0; i < values.size(); ++i) {
        if(i) out += ';';
        out += format_double(values[i]);
    }
    return out;
}

std::vector<double> parse_series(const std::string &text) {
    std::vector<double> out;
    if(text.empty()) return out;
    for(const auto &cell : split(text, ';')) out.push_back(parse_double(cell));
    return out;
}

template<typename Int>
Int parse_int(const std::string &text) {
    Int value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if(ec != std::errc{} || ptr != text.data() + text.size()) throw DomainError("malformed integer '" + text + "'");
    return value;
}

std::string sanitize(std::string text) {
    for(char &c : text)
        if(c == ',' || c == '\n' || c == '\r') c = ' ';
    return text;
}

void check_header(std::istream &in, std::string_view expected) {
    std::string line;
    if(!std::getline(in, line) || line != expected)
        throw DomainError("unexpected header; expected '" + std::string(expected) + "'");
}

} // namespace

std::string format_double(double value) {
    if(std::isnan(value)) return "nan";
    if(std::isinf(value)) return value > 0 ? "inf" : "-inf";
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if(ec != std::errc{}) throw DomainError("could not format double");
    return {buf, ptr};
}

double parse_double(std::string_view text) {
    if(text == "nan") return std::numeric_limits<double>::quiet_NaN();
    if(text == "inf") return std::numeric_limits<double>::infinity();
    if(text == "-inf") return -std::numeric_limits<double>::infinity();
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if(ec != std::errc{} || ptr != text.data() + text.size())
        throw DomainError("malformed number '" + std::string(text) + "'");
    return value;
}

void write_results(std::ostream &out, const std::string &config_hash, const std::vector<RealizationResult> &rows) {
    out << results_header << '\n';
    for(const auto &r : rows) {
        out << schema_version << ',' << config_hash << ',' << r.sites << ',' << r.message_sites << ','
            << format_double(r.disorder) << ',' << to_string(r.environment) << ',' << r.index << ',' << r.seed << ','
            << (r.ok ? "ok" : "failed") << ',' << format_double(r.ok ? r.steady_state : std::nan("")) << ','
            << join(r.fields) << ',' << join(r.times) << ',' << join(r.rates) << ',' << sanitize(r.error) << '\n';
    }
}

std::vector<RealizationResult> read_results(std::istream &in, std::string *config_hash) {
    check_header(in, results_header);
    std::vector<RealizationResult> rows;
    std::string                    line;
    while(std::getline(in, line)) {
        if(line.empty()) continue;
        const auto cells = split(line, ',');
        if(cells.size() != 14) throw DomainError("results row has " + std::to_string(cells.size()) + " columns");
        if(parse_int<int>(cells[0]) != schema_version) throw DomainError("unsupported results schema " + cells[0]);
        if(config_hash) *config_hash = cells[1];
        RealizationResult r;
        r.sites         = parse_int<int>(cells[2]);
        r.message_sites = parse_int<int>(cells[3]);
        r.disorder      = parse_double(cells[4]);
        r.environment   = parse_environment(cells[5]);
        r.index         = parse_int<std::uint64_t>(cells[6]);
        r.seed          = parse_int<std::uint64_t>(cells[7]);
        r.ok            = cells[8] == "ok";
        r.steady_state  = r.ok ? parse_double(cells[9]) : 0.0;
        r.fields        = parse_series(cells[10]);
        r.times         = parse_series(cells[11]);
        r.rates         = parse_series(cells[12]);
        r.error         = cells[13];
        rows.push_back(std::move(r));
    }
    return rows;
}

void write_aggregate(std::ostream &out, const std::string &config_hash, const std::vector<SteadyStateRecord> &rows) {
    out << aggregate_header << '\n';
    for(const auto &r : rows)
        out << schema_version << ',' << config_hash << ',' << r.sites << ',' << r.message_sites << ','
            << format_double(r.disorder) << ',' << to_string(r.environment) << ',' << format_double(r.mean) << ','
            << format_double(r.std_error) << ',' << r.count << '\n';
}

std::vector<SteadyStateRecord> read_aggregate(std::istream &in, std::string *config_hash) {
    check_header(in, aggregate_header);
    std::vector<SteadyStateRecord> rows;
    std::string                    line;
    while(std::getline(in, line)) {
        if(line.empty()) continue;
        const auto cells = split(line, ',');
        if(cells.size() != 9) throw DomainError("aggregate row has " + std::to_string(cells.size()) + " columns");
        if(parse_int<int>(cells[0]) != schema_version) throw DomainError("unsupported aggregate schema " + cells[0]);
        if(config_hash) *config_hash = cells[1];
        SteadyStateRecord r;
        r.sites         = parse_int<int>(cells[2]);
        r.message_sites = parse_int<int>(cells[3]);
        r.disorder      = parse_double(cells[4]);
        r.environment   = parse_environment(cells[5]);
        r.mean          = parse_double(cells[6]);
        r.std_error     = parse_double(cells[7]);
        r.count         = parse_int<std::size_t>(cells[8]);
        rows.push_back(r);
    }
    return rows;
}

std::vector<SteadyStateRecord> read_aggregate_file(const std::filesystem::path &path, std::string *config_hash) {
    std::ifstream in(path);
    if(!in) throw DomainError("cannot open aggregate file " + path.string());
    return read_aggregate(in, config_hash);
}

void write_trace(std::ostream &out, const std::string &config_hash, const AveragedTrace &trace) {
    out << "# schema_version=" << schema_version << " config_hash=" << config_hash << " L=" << trace.sites
        << " l=" << trace.message_sites << " h=" << format_double(trace.disorder)
        << " env=" << to_string(trace.environment) << " n=" << trace.count << '\n';
    out << "t,mean_R,stderr_R\n";
    for(std::size_t i = 0; i < trace.mean.size(); ++i)
        out << format_double(trace.times[i]) << ',' << format_double(trace.mean[i]) << ','
            << format_double(trace.std_error[i]) << '\n';
}

std::string trace_file_name(const AveragedTrace &trace) {
    return "trace_L" + std::to_string(trace.sites) + "_l" + std::to_string(trace.message_sites) + "_" +
           std::string(to_string(trace.environment)) + "_h" + format_double(trace.disorder) + ".csv";
}

} // namespace mbl::io
