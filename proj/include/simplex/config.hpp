#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "simplex/core.hpp"
#include "simplex/ensemble.hpp"
#include "simplex/integrator.hpp"
#include "simplex/realizability.hpp"

namespace simplex {

inline constexpr int kSchemaVersion = 1;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutdirVariable = "SIMPLEX_OUTDIR";

struct ProcessSpec {
    std::string name;  // beta | wright_fisher | dirichlet | gen_dirichlet | broken
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
};

struct InitialCondition {
    enum class Kind { Delta, Uniform, List };
    Kind kind = Kind::Uniform;
    /// Full N-component points: one for Delta, any number for List (assigned
    /// to particles cyclically).
    std::vector<std::vector<double>> points;
};

struct OutputSpec {
    std::optional<std::string> dir;
    bool csv = true;
    bool json = true;
    std::vector<double> ensemble_times;  // snapshots to dump as ensemble_<t>.csv
};

struct AuditSpec {
    std::size_t samples_per_face = 1000;
    ToleranceSet tolerances;
};

struct CompareSpec {
    double tol_multiplier = 3.0;
    std::optional<double> stationary_from;  // defaults to t_end / 2
    std::size_t batches = 20;
    std::optional<ProcessSpec> reference;
};

struct RunConfig {
    int schema_version = kSchemaVersion;
    ProcessSpec process;
    IntegratorConfig integrator;
    double t_end = 1.0;
    std::size_t record_every = 100;
    std::size_t ensemble_size = 1000;
    InitialCondition initial;
    std::uint64_t seed = 0;
    OutputSpec output;
    AuditSpec audit;
    CompareSpec compare;
    /// Dotted config path -> values, expanded as a cartesian product in file order.
    std::vector<std::pair<std::string, std::vector<nlohmann::ordered_json>>> sweep;
    nlohmann::ordered_json document;  // the parsed source, echoed into run_meta.json

    double stationary_from() const { return compare.stationary_from.value_or(t_end / 2.0); }
};

/// Validates the document (unknown keys are rejected) and every referenced
/// process. Throws Error(ConfigError) for structural problems; parameter errors
/// keep their own codes.
RunConfig parse_config(const nlohmann::ordered_json& document);
RunConfig load_config(const std::string& path);

ProcessDefinition make_process(const ProcessSpec& spec);

/// The initial ensemble; uniform draws use their own stream of `seed`.
Ensemble initial_ensemble(const RunConfig& cfg, std::size_t dimension);

/// Sets document[a][b][c] = value for path "a.b.c", creating objects on the way.
void set_path(nlohmann::ordered_json& document, const std::string& dotted, const nlohmann::ordered_json& value);

}  // namespace simplex
