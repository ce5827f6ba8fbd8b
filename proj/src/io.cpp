#include "simplex/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

namespace simplex {

using nlohmann::ordered_json;

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& text) {
    const char* begin = text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (text.empty() || end != begin + text.size())
        throw Error(ErrorCode::InvalidParameter, "not a number: '" + text + "'");
    return v;
}

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, sep)) out.push_back(cell);
    if (!line.empty() && line.back() == sep) out.emplace_back();
    return out;
}

}  // namespace

std::string CsvTable::write() const {
    std::string out;
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_double(row[i]);
        }
        out += '\n';
    }
    return out;
}

CsvTable CsvTable::read(const std::string& text) {
    CsvTable table;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::InvalidParameter, "empty CSV");
    table.header = split(line, ',');
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const auto cells = split(line, ',');
        if (cells.size() != table.header.size())
            throw Error(ErrorCode::InvalidParameter, "CSV line " + std::to_string(lineno) + " has " +
                                                         std::to_string(cells.size()) + " cells, expected " +
                                                         std::to_string(table.header.size()));
        std::vector<double> row;
        for (const auto& c : cells) row.push_back(parse_double(c));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<std::string> moments_header(std::size_t n) {
    std::vector<std::string> h{"t"};
    for (std::size_t a = 1; a <= n; ++a) h.push_back("mean_" + std::to_string(a));
    for (std::size_t a = 1; a <= n; ++a)
        for (std::size_t b = a; b <= n; ++b) h.push_back("cov_" + std::to_string(a) + "_" + std::to_string(b));
    for (const char* name : {"third_", "fourth_", "skew_", "kurt_"})
        for (std::size_t a = 1; a <= n; ++a) h.push_back(name + std::to_string(a));
    return h;
}

std::vector<double> moments_row(double t, const MomentSet& m) {
    const std::size_t n = m.dimension;
    std::vector<double> row{t};
    row.insert(row.end(), m.mean.begin(), m.mean.end());
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) row.push_back(m.covariance(a, b));
    row.insert(row.end(), m.third.begin(), m.third.end());
    row.insert(row.end(), m.fourth.begin(), m.fourth.end());
    for (const auto& s : m.skewness) row.push_back(s.value_or(NAN));
    for (const auto& k : m.kurtosis) row.push_back(k.value_or(NAN));
    return row;
}

CsvTable ensemble_table(double t, const Ensemble& ensemble) {
    CsvTable table;
    table.header = {"t", "particle"};
    const std::size_t n = ensemble.dimension();
    for (std::size_t a = 1; a <= n; ++a) table.header.push_back("Y_" + std::to_string(a));
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        std::vector<double> row{t, static_cast<double>(i)};
        for (std::size_t a = 0; a < n; ++a) row.push_back(ensemble.fraction(i, a));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::vector<std::string> rates_header(std::size_t k) {
    std::vector<std::string> h{"t"};
    for (std::size_t a = 1; a <= k; ++a) h.push_back("mean_rate_" + std::to_string(a));
    for (std::size_t a = 1; a <= k; ++a)
        for (std::size_t b = a; b <= k; ++b) h.push_back("cov_rate_" + std::to_string(a) + "_" + std::to_string(b));
    for (const char* name : {"third_rate_", "third_rate_printed_", "fourth_rate_", "fourth_rate_printed_"})
        for (std::size_t a = 1; a <= k; ++a) h.push_back(name + std::to_string(a));
    return h;
}

std::vector<double> rates_row(double t, const MomentRates& r) {
    const std::size_t k = r.reduced_dimension;
    std::vector<double> row{t};
    row.insert(row.end(), r.mean_rate.begin(), r.mean_rate.end());
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) row.push_back(r.cov_rate(a, b));
    for (const auto* v : {&r.third_rate, &r.third_rate_variant, &r.fourth_rate, &r.fourth_rate_variant})
        row.insert(row.end(), v->begin(), v->end());
    return row;
}

namespace {

ordered_json matrix_json(const Matrix& m) {
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        ordered_json row = ordered_json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

ordered_json optional_vector(const std::vector<std::optional<double>>& v) {
    ordered_json out = ordered_json::array();
    for (const auto& x : v) out.push_back(x ? ordered_json(*x) : ordered_json(nullptr));
    return out;
}

}  // namespace

ordered_json to_json(const AuditCheck& c) {
    ordered_json j{{"constraint", c.constraint}, {"subject", c.subject}, {"violation", c.violation},
                   {"allowed", c.allowed}, {"pass", c.pass}};
    if (c.location) j["location"] = *c.location;
    if (c.index) j["index"] = {c.index->first, c.index->second};
    return j;
}

ordered_json to_json(const AuditReport& r) {
    ordered_json j;
    j["overall_pass"] = r.overall_pass;
    j["notes"] = ordered_json::object();
    for (const auto& [k, v] : r.notes) j["notes"][k] = v;
    j["checks"] = ordered_json::array();
    for (const auto& c : r.checks) j["checks"].push_back(to_json(c));
    j["informational"] = ordered_json::array();
    for (const auto& c : r.informational) j["informational"].push_back(to_json(c));
    return j;
}

ordered_json to_json(const MomentSet& m) {
    return {{"dimension", m.dimension}, {"ensemble_size", m.ensemble_size}, {"mean", m.mean},
            {"covariance", matrix_json(m.covariance)}, {"third", m.third}, {"fourth", m.fourth},
            {"skewness", optional_vector(m.skewness)}, {"kurtosis", optional_vector(m.kurtosis)}};
}

ordered_json to_json(const MomentRates& r) {
    return {{"mean_rate", r.mean_rate},
            {"cov_rate", matrix_json(r.cov_rate)},
            {"third_rate", r.third_rate},
            {"third_rate_printed", r.third_rate_variant},
            {"fourth_rate", r.fourth_rate},
            {"fourth_rate_printed", r.fourth_rate_variant}};
}

ordered_json to_json(const StationaryEstimate& e) {
    return {{"t_from", e.t_from},
            {"snapshots", e.snapshots},
            {"mean", e.mean},
            {"mean_se", e.mean_se},
            {"covariance", matrix_json(e.covariance)},
            {"covariance_se", matrix_json(e.covariance_se)},
            {"third", e.third},
            {"third_se", e.third_se},
            {"fourth", e.fourth},
            {"fourth_se", e.fourth_se}};
}

ordered_json to_json(const StepCounters& c) {
    return {{"particle_steps", c.particle_steps},
            {"resampled_steps", c.resampled_steps},
            {"clipped_steps", c.clipped_steps},
            {"realizability_violations", c.realizability_violations}};
}

void print_report(std::ostream& out, const AuditReport& report) {
    char line[256];
    std::snprintf(line, sizeof line, "%-26s %-22s %12s %12s  %s\n", "constraint", "subject", "violation",
                  "allowed", "result");
    out << line;
    auto row = [&](const AuditCheck& c, const char* verdict) {
        std::snprintf(line, sizeof line, "%-26s %-22s %12.4g %12.4g  %s\n", c.constraint.c_str(),
                      c.subject.c_str(), c.violation, c.allowed, verdict);
        out << line;
    };
    for (const auto& c : report.checks) row(c, c.pass ? "ok" : "FAIL");
    for (const auto& c : report.informational) row(c, c.pass ? "(ok)" : "(fail)");
    for (const auto& [k, v] : report.notes) out << k << ": " << v << '\n';
    out << (report.overall_pass ? "PASS" : "FAIL") << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::ConfigError, "cannot open '" + path + "'");
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + path + "'");
    out << contents;
    if (!out) throw Error(ErrorCode::ConfigError, "write to '" + path + "' failed");
}

}  // namespace simplex
