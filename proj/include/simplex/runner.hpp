#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "simplex/config.hpp"
#include "simplex/statistics.hpp"

namespace simplex {

inline constexpr const char* kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;

struct CliOptions {
    std::string config_path;
    std::optional<std::string> outdir;
    std::optional<std::uint64_t> seed;
    bool skip_audit = false;
    unsigned threads = 1;
};

/// --outdir, then output.dir, then $SIMPLEX_OUTDIR, then ".".
std::string resolve_outdir(const CliOptions& options, const RunConfig& cfg);

/// Boundary audit of the configured process with its own random stream.
AuditReport run_audit(const RunConfig& cfg, const ProcessDefinition& proc);

struct CompareOutcome {
    Trajectory trajectory;
    AuditReport rates;
    StationaryEstimate stationary;
    std::optional<MomentSet> oracle;  // analytic invariant moments when available
    std::optional<AuditReport> oracle_report;
    std::optional<StationaryEstimate> reference;  // stationary moments of compare.reference_process
    std::optional<AuditReport> reference_report;

    bool pass() const;
};

/// Simulation, rate cross-validation and stationary comparisons for one config.
CompareOutcome run_compare(const RunConfig& cfg, unsigned threads = 1);

int cmd_check(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_simulate(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_compare(const CliOptions& options, std::ostream& out, std::ostream& err);
int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace simplex
