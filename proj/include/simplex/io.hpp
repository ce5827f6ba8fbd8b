#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "simplex/integrator.hpp"
#include "simplex/moments.hpp"
#include "simplex/realizability.hpp"
#include "simplex/statistics.hpp"

namespace simplex {

/// 17 significant digits; NaN is written as "nan" whatever its sign.
std::string format_double(double v);
double parse_double(const std::string& text);

/// Numeric table with a header row. Cells are written with format_double, so
/// write(read(text)) == text for any text produced by write.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    std::string write() const;
    static CsvTable read(const std::string& text);
};

/// t, mean_i, cov_i_j (i <= j), third_i, fourth_i, skew_i, kurt_i; undefined
/// shape statistics are nan.
std::vector<std::string> moments_header(std::size_t dimension);
std::vector<double> moments_row(double t, const MomentSet& m);

/// t, particle, Y_1..Y_N.
CsvTable ensemble_table(double t, const Ensemble& ensemble);

/// t, mean_rate_i, cov_rate_i_j (i <= j), third_rate_i, third_rate_printed_i,
/// fourth_rate_i, fourth_rate_printed_i over the reduced coordinates.
std::vector<std::string> rates_header(std::size_t reduced_dimension);
std::vector<double> rates_row(double t, const MomentRates& r);

nlohmann::ordered_json to_json(const AuditCheck& check);
nlohmann::ordered_json to_json(const AuditReport& report);
nlohmann::ordered_json to_json(const MomentSet& m);
nlohmann::ordered_json to_json(const MomentRates& r);
nlohmann::ordered_json to_json(const StationaryEstimate& est);
nlohmann::ordered_json to_json(const StepCounters& c);

/// Fixed-width table of every check, failures marked.
void print_report(std::ostream& out, const AuditReport& report);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& contents);

}  // namespace simplex
