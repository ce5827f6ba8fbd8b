#include "simplex/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <functional>
#include <ostream>

#include "simplex/io.hpp"
#include "simplex/processes.hpp"

namespace simplex {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::string resolve_outdir(const CliOptions& options, const RunConfig& cfg) {
    if (options.outdir) return *options.outdir;
    if (cfg.output.dir) return *cfg.output.dir;
    if (const char* env = std::getenv(kOutdirVariable); env && *env) return env;
    return ".";
}

AuditReport run_audit(const RunConfig& cfg, const ProcessDefinition& proc) {
    return audit_boundary(proc, cfg.audit.samples_per_face, RandomSource(cfg.seed, 2), cfg.audit.tolerances);
}

bool CompareOutcome::pass() const {
    return rates.overall_pass && (!oracle_report || oracle_report->overall_pass) &&
           (!reference_report || reference_report->overall_pass);
}

CompareOutcome run_compare(const RunConfig& cfg, unsigned threads) {
    const auto proc = make_process(cfg.process);
    const auto init = initial_ensemble(cfg, proc.dimension());
    const RandomSource rng(cfg.seed, 0);
    const SimulateOptions options{threads, true};

    CompareOutcome out;
    out.trajectory = simulate(proc, init, cfg.integrator, cfg.t_end, cfg.record_every, rng, options);
    out.rates = cross_validate_rates(out.trajectory, proc, cfg.compare.tol_multiplier, cfg.compare.batches);
    out.stationary = stationary_average(out.trajectory, cfg.stationary_from(), cfg.compare.batches);
    try {
        out.oracle = analytic_stationary(proc);
        out.oracle_report = compare_stationary(out.stationary, *out.oracle, cfg.compare.tol_multiplier);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::Unsupported) throw;
    }
    if (cfg.compare.reference) {
        const auto ref = make_process(*cfg.compare.reference);
        const auto ref_traj = simulate(ref, init, cfg.integrator, cfg.t_end, cfg.record_every, rng, options);
        out.reference = stationary_average(ref_traj, cfg.stationary_from(), cfg.compare.batches);
        out.reference_report = compare_stationary(out.stationary, *out.reference, cfg.compare.tol_multiplier);
    }
    return out;
}

namespace {

RunConfig load(const CliOptions& options) {
    RunConfig cfg = load_config(options.config_path);
    if (options.seed) {
        ordered_json doc = cfg.document;
        doc["seed"] = *options.seed;
        cfg = parse_config(doc);
    }
    return cfg;
}

std::string prepare_outdir(const CliOptions& options, const RunConfig& cfg) {
    const std::string dir = resolve_outdir(options, cfg);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::ConfigError, "cannot create output directory '" + dir + "': " + ec.message());
    return dir;
}

std::string join(const std::string& dir, const std::string& file) { return (fs::path(dir) / file).string(); }

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm utc{};
    gmtime_r(&now, &utc);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &utc);
    return buf;
}

bool is_config_error(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidParameter:
        case ErrorCode::DirichletConstraintViolated:
        case ErrorCode::InsufficientSnapshots:
        case ErrorCode::EnsembleTooSmall: return true;
        default: return false;
    }
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return is_config_error(e.code()) ? kExitConfig : kExitFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

/// Runs the audit unless skipped; prints it and returns false on failure.
bool audit_gate(const CliOptions& options, const RunConfig& cfg, const ProcessDefinition& proc, std::ostream& out,
                std::ostream& err) {
    if (options.skip_audit) return true;
    const auto report = run_audit(cfg, proc);
    if (report.overall_pass) return true;
    print_report(out, report);
    err << "error: process '" << proc.name() << "' fails the boundary audit; rerun with --skip-audit to override\n";
    return false;
}

std::string time_label(double t) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", t);
    return buf;
}

CsvTable moments_table(const Trajectory& traj, std::size_t n) {
    CsvTable table;
    table.header = moments_header(n);
    for (const auto& s : traj.snapshots)
        if (s.moments) table.rows.push_back(moments_row(s.t, *s.moments));
    return table;
}

ordered_json compare_json(const CompareOutcome& c) {
    ordered_json j;
    j["pass"] = c.pass();
    j["rates"] = to_json(c.rates);
    j["stationary"] = to_json(c.stationary);
    j["oracle"] = c.oracle ? to_json(*c.oracle) : ordered_json(nullptr);
    j["oracle_report"] = c.oracle_report ? to_json(*c.oracle_report) : ordered_json(nullptr);
    j["reference"] = c.reference ? to_json(*c.reference) : ordered_json(nullptr);
    j["reference_report"] = c.reference_report ? to_json(*c.reference_report) : ordered_json(nullptr);
    j["counters"] = to_json(c.trajectory.counters);
    return j;
}

void write_compare(const std::string& dir, const RunConfig& cfg, const CompareOutcome& c) {
    const auto proc = make_process(cfg.process);
    if (cfg.output.json) write_file(join(dir, "compare.json"), compare_json(c).dump(2) + "\n");
    if (cfg.output.csv) {
        write_file(join(dir, "moments.csv"), moments_table(c.trajectory, proc.dimension()).write());
        CsvTable rates;
        rates.header = rates_header(proc.reduced_dimension());
        for (const auto& s : c.trajectory.snapshots)
            if (s.ensemble && s.ensemble->size() >= 2) rates.rows.push_back(rates_row(s.t, estimate_rates(*s.ensemble, proc, s.t)));
        write_file(join(dir, "rates.csv"), rates.write());
    }
}

void print_compare(std::ostream& out, const CompareOutcome& c) {
    out << "== rate cross-validation\n";
    print_report(out, c.rates);
    if (c.oracle_report) {
        out << "== stationary moments vs analytic invariant law\n";
        print_report(out, *c.oracle_report);
    } else {
        out << "== no analytic invariant law for this process\n";
    }
    if (c.reference_report) {
        out << "== stationary moments vs reference process\n";
        print_report(out, *c.reference_report);
    }
    out << (c.pass() ? "PASS" : "FAIL") << '\n';
}

}  // namespace

int cmd_check(const CliOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load(options);
        const auto proc = make_process(cfg.process);
        const auto report = run_audit(cfg, proc);
        const std::string dir = prepare_outdir(options, cfg);
        write_file(join(dir, "audit.json"), to_json(report).dump(2) + "\n");
        print_report(out, report);
        return report.overall_pass ? kExitOk : kExitFailure;
    });
}

int cmd_simulate(const CliOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load(options);
        const auto proc = make_process(cfg.process);
        if (!audit_gate(options, cfg, proc, out, err)) return kExitFailure;
        const std::string dir = prepare_outdir(options, cfg);
        const auto init = initial_ensemble(cfg, proc.dimension());

        CsvTable moments;
        moments.header = moments_header(proc.dimension());
        ordered_json moments_json = ordered_json::array();
        std::size_t bound_failures = 0;
        auto observer = [&](const Snapshot& snap, const Ensemble& ensemble) {
            if (snap.moments) {
                moments.rows.push_back(moments_row(snap.t, *snap.moments));
                if (cfg.output.json) moments_json.push_back({{"t", snap.t}, {"moments", to_json(*snap.moments)}});
                if (!audit_moment_bounds(*snap.moments, ensemble.size(), cfg.audit.tolerances).overall_pass)
                    ++bound_failures;
            }
            for (double te : cfg.output.ensemble_times)
                if (std::abs(snap.t - te) <= cfg.integrator.dt / 2)
                    write_file(join(dir, "ensemble_" + time_label(snap.t) + ".csv"),
                               ensemble_table(snap.t, ensemble).write());
        };
        const auto traj = simulate(proc, init, cfg.integrator, cfg.t_end, cfg.record_every,
                                   RandomSource(cfg.seed, 0), {options.threads, false}, observer);

        if (cfg.output.csv) write_file(join(dir, "moments.csv"), moments.write());
        if (cfg.output.json) write_file(join(dir, "moments.json"), moments_json.dump(2) + "\n");
        ordered_json meta;
        meta["version"] = kVersion;
        meta["timestamp"] = timestamp();
        meta["seed"] = cfg.seed;
        meta["audit"] = options.skip_audit ? "skipped" : "pass";
        meta["snapshots"] = traj.snapshots.size();
        meta["counters"] = to_json(traj.counters);
        meta["moment_bound_failures"] = bound_failures;
        meta["config"] = cfg.document;
        write_file(join(dir, "run_meta.json"), meta.dump(2) + "\n");

        out << "simulated " << traj.counters.particle_steps << " particle-steps, " << traj.snapshots.size()
            << " snapshots, " << traj.counters.resampled_steps << " resampled, " << traj.counters.clipped_steps
            << " clipped\n";
        if (traj.counters.realizability_violations > 0 || bound_failures > 0) {
            err << "error: " << traj.counters.realizability_violations << " realizability violations, "
                << bound_failures << " snapshots failing the moment bounds\n";
            return kExitFailure;
        }
        return kExitOk;
    });
}

int cmd_compare(const CliOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig cfg = load(options);
        const auto proc = make_process(cfg.process);
        if (!audit_gate(options, cfg, proc, out, err)) return kExitFailure;
        const std::string dir = prepare_outdir(options, cfg);
        const auto outcome = run_compare(cfg, options.threads);
        write_compare(dir, cfg, outcome);
        print_compare(out, outcome);
        return outcome.pass() ? kExitOk : kExitFailure;
    });
}

int cmd_sweep(const CliOptions& options, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        const RunConfig base = load(options);
        if (base.sweep.empty()) throw Error(ErrorCode::ConfigError, "sweep.grid is empty");
        for (const auto& [path, values] : base.sweep)
            if (values.empty()) throw Error(ErrorCode::ConfigError, "sweep.grid." + path + " is empty");
        const std::string dir = prepare_outdir(options, base);

        std::vector<RunConfig> points;
        std::vector<std::vector<double>> coords;
        std::vector<std::size_t> idx(base.sweep.size(), 0);
        while (true) {
            ordered_json doc = base.document;
            doc.erase("sweep");
            std::vector<double> coord;
            for (std::size_t g = 0; g < base.sweep.size(); ++g) {
                const auto& value = base.sweep[g].second[idx[g]];
                set_path(doc, base.sweep[g].first, value);
                coord.push_back(value.is_number() ? value.get<double>() : static_cast<double>(idx[g]));
            }
            points.push_back(parse_config(doc));
            coords.push_back(std::move(coord));
            std::size_t g = base.sweep.size();
            while (g > 0 && ++idx[g - 1] == base.sweep[g - 1].second.size()) idx[--g] = 0;
            if (g == 0) break;
        }

        const std::size_t n = make_process(base.process).dimension();
        CsvTable table;
        table.header = {"point"};
        for (const auto& [path, values] : base.sweep) table.header.push_back(path);
        for (const char* h : {"pass", "rates_pass", "oracle_pass", "reference_pass"}) table.header.push_back(h);
        for (std::size_t a = 1; a <= n; ++a)
            for (const char* suffix : {"", "_se", "_err"}) table.header.push_back("mean_" + std::to_string(a) + suffix);
        for (std::size_t a = 1; a <= n; ++a)
            for (std::size_t b = a; b <= n; ++b)
                for (const char* suffix : {"", "_se", "_err"})
                    table.header.push_back("cov_" + std::to_string(a) + "_" + std::to_string(b) + suffix);
        table.header.push_back("runtime_s");

        bool all_pass = true;
        for (std::size_t p = 0; p < points.size(); ++p) {
            const auto& cfg = points[p];
            const auto proc = make_process(cfg.process);
            if (proc.dimension() != n) throw Error(ErrorCode::ConfigError, "sweep changes the process dimension");
            const auto started = std::chrono::steady_clock::now();
            std::vector<double> row{static_cast<double>(p)};
            row.insert(row.end(), coords[p].begin(), coords[p].end());

            if (!options.skip_audit && !run_audit(cfg, proc).overall_pass) {
                err << "point " << p << ": boundary audit failed\n";
                all_pass = false;
                row.push_back(0.0);
                row.resize(table.header.size(), NAN);
                table.rows.push_back(std::move(row));
                continue;
            }
            const auto c = run_compare(cfg, options.threads);
            const double runtime =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
            const std::string point_dir = join(dir, "point_" + std::to_string(p));
            fs::create_directories(point_dir);
            write_compare(point_dir, cfg, c);

            all_pass = all_pass && c.pass();
            auto flag = [](const std::optional<AuditReport>& r) { return r ? (r->overall_pass ? 1.0 : 0.0) : NAN; };
            row.push_back(c.pass() ? 1.0 : 0.0);
            row.push_back(c.rates.overall_pass ? 1.0 : 0.0);
            row.push_back(flag(c.oracle_report));
            row.push_back(flag(c.reference_report));
            const auto& st = c.stationary;
            for (std::size_t a = 0; a < n; ++a) {
                row.push_back(st.mean[a]);
                row.push_back(st.mean_se[a]);
                row.push_back(c.oracle ? st.mean[a] - c.oracle->mean[a] : NAN);
            }
            for (std::size_t a = 0; a < n; ++a)
                for (std::size_t b = a; b < n; ++b) {
                    row.push_back(st.covariance(a, b));
                    row.push_back(st.covariance_se(a, b));
                    row.push_back(c.oracle ? st.covariance(a, b) - c.oracle->covariance(a, b) : NAN);
                }
            row.push_back(runtime);
            table.rows.push_back(std::move(row));
            out << "point " << p << ": " << (c.pass() ? "PASS" : "FAIL") << '\n';
        }
        write_file(join(dir, "sweep.csv"), table.write());
        out << (all_pass ? "PASS" : "FAIL") << '\n';
        return all_pass ? kExitOk : kExitFailure;
    });
}

}  // namespace simplex
