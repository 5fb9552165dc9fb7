#pragma once

// Persistence of sweep output.
//
// results.csv   one row per realization; series columns hold ';'-separated values
// aggregate.csv one SteadyStateRecord per (L, l, h, env); stderr "nan" when n = 1
// trace_*.csv   disorder-averaged R(t) per (L, h)
//
// Doubles are written in shortest round-trip form, so reading back is bit-exact.

#include "mbl/sweep.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mbl::io {

inline constexpr int schema_version = 1;

std::string format_double(double value);
double parse_double(std::string_view text); // accepts "nan", "inf", "-inf"

void write_results(std::ostream &out, const std::string &config_hash, const std::vector<RealizationResult> &rows);
std::vector<RealizationResult> read_results(std::istream &in, std::string *config_hash = nullptr);

void write_aggregate(std::ostream &out, const std::string &config_hash, const std::vector<SteadyStateRecord> &rows);
std::vector<SteadyStateRecord> read_aggregate(std::istream &in, std::string *config_hash = nullptr);
std::vector<SteadyStateRecord> read_aggregate_file(const std::filesystem::path &path,
                                                   std::string *config_hash = nullptr);

void write_trace(std::ostream &out, const std::string &config_hash, const AveragedTrace &trace);
std::string trace_file_name(const AveragedTrace &trace);

} // namespace mbl::io
