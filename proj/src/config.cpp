#include "simplex/config.hpp"

#include <cmath>
#include <set>

#include "simplex/io.hpp"
#include "simplex/processes.hpp"

namespace simplex {

using nlohmann::ordered_json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw Error(ErrorCode::ConfigError, where + ": " + what);
}

void allow_keys(const ordered_json& obj, const std::string& where, std::initializer_list<const char*> keys) {
    if (!obj.is_object()) fail(where, "expected an object");
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : obj.items())
        if (!allowed.count(k)) fail(where, "unknown key '" + k + "'");
}

double number(const ordered_json& v, const std::string& where) {
    if (!v.is_number()) fail(where, "expected a number");
    return v.get<double>();
}

std::size_t count(const ordered_json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<long long>() < 0) fail(where, "expected a non-negative integer");
    return v.get<std::size_t>();
}

std::vector<double> numbers(const ordered_json& v, const std::string& where) {
    if (!v.is_array()) fail(where, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& x : v) out.push_back(number(x, where));
    return out;
}

const ordered_json& required(const ordered_json& obj, const char* key, const std::string& where) {
    if (!obj.contains(key)) fail(where, std::string("missing '") + key + "'");
    return obj.at(key);
}

ProcessSpec parse_process_spec(const ordered_json& j, const std::string& where) {
    allow_keys(j, where, {"name", "params"});
    const auto& name = required(j, "name", where);
    if (!name.is_string()) fail(where + ".name", "expected a string");
    ProcessSpec spec{name.get<std::string>(), j.value("params", ordered_json::object())};
    if (!spec.params.is_object()) fail(where + ".params", "expected an object");
    make_process(spec);  // validates
    return spec;
}

}  // namespace

ProcessDefinition make_process(const ProcessSpec& spec) {
    const auto& p = spec.params;
    const std::string where = "process.params";
    if (spec.name == "beta") {
        allow_keys(p, where, {"b", "S", "kappa"});
        return beta_process({number(required(p, "b", where), where + ".b"),
                             number(required(p, "S", where), where + ".S"),
                             number(required(p, "kappa", where), where + ".kappa")});
    }
    if (spec.name == "wright_fisher") {
        allow_keys(p, where, {"omega"});
        return wright_fisher_process({numbers(required(p, "omega", where), where + ".omega")});
    }
    if (spec.name == "dirichlet") {
        allow_keys(p, where, {"b", "S", "kappa", "dirichlet_invariant"});
        const auto& flag = p.value("dirichlet_invariant", ordered_json(false));
        if (!flag.is_boolean()) fail(where + ".dirichlet_invariant", "expected a boolean");
        return dirichlet_process({numbers(required(p, "b", where), where + ".b"),
                                  numbers(required(p, "S", where), where + ".S"),
                                  numbers(required(p, "kappa", where), where + ".kappa"), flag.get<bool>()});
    }
    if (spec.name == "gen_dirichlet") {
        allow_keys(p, where, {"b", "S", "kappa", "c", "reduction"});
        GenDirichletParams g{numbers(required(p, "b", where), where + ".b"),
                             numbers(required(p, "S", where), where + ".S"),
                             numbers(required(p, "kappa", where), where + ".kappa"), Matrix()};
        const auto& reduction = p.value("reduction", ordered_json(false));
        const bool reduce = reduction != false;
        if (reduce == p.contains("c")) fail(where, "give exactly one of 'c' or 'reduction'");
        if (reduction == true || reduction == "column") {
            g.c = GenDirichletParams::reduction_coupling(g.kappa);
        } else if (reduction == "row") {
            g.c = GenDirichletParams::row_reduction_coupling(g.kappa);
        } else if (reduce) {
            fail(where + ".reduction", "expected true, \"column\" or \"row\"");
        } else {
            const auto& c = p.at("c");
            if (!c.is_array()) fail(where + ".c", "expected a K x (K-1) array of rows");
            const std::size_t rows = c.size();
            const std::size_t cols = rows ? c.at(0).size() : 0;
            g.c = Matrix(rows, cols);
            for (std::size_t i = 0; i < rows; ++i) {
                const auto row = numbers(c.at(i), where + ".c");
                if (row.size() != cols) fail(where + ".c", "rows have different lengths");
                for (std::size_t k = 0; k < cols; ++k) g.c(i, k) = row[k];
            }
        }
        return gen_dirichlet_process(g);
    }
    if (spec.name == "broken") {
        allow_keys(p, where, {"style", "dimension"});
        const std::string style = p.value("style", std::string("constant_diffusion"));
        const std::size_t n = p.contains("dimension") ? count(p.at("dimension"), where + ".dimension") : 3;
        if (style == "constant_diffusion") return broken_process(BrokenStyle::ConstantDiffusion, n);
        if (style == "outward_drift") return broken_process(BrokenStyle::OutwardDrift, n);
        fail(where + ".style", "expected constant_diffusion or outward_drift");
    }
    fail("process.name", "unknown process '" + spec.name + "'");
}

RunConfig parse_config(const ordered_json& doc) {
    allow_keys(doc, "config",
               {"schema_version", "process", "integrator", "ensemble", "seed", "output", "audit", "compare", "sweep"});
    RunConfig cfg;
    cfg.document = doc;

    const auto& version = required(doc, "schema_version", "config");
    if (!version.is_number_integer() || version.get<int>() != kSchemaVersion)
        fail("schema_version", "expected " + std::to_string(kSchemaVersion));

    cfg.process = parse_process_spec(required(doc, "process", "config"), "process");

    if (doc.contains("integrator")) {
        const auto& j = doc.at("integrator");
        allow_keys(j, "integrator", {"dt", "t_end", "boundary_policy", "record_every", "max_resample", "scheme"});
        if (j.contains("dt")) cfg.integrator.dt = number(j.at("dt"), "integrator.dt");
        if (j.contains("t_end")) cfg.t_end = number(j.at("t_end"), "integrator.t_end");
        if (j.contains("record_every")) cfg.record_every = count(j.at("record_every"), "integrator.record_every");
        if (j.contains("max_resample"))
            cfg.integrator.max_resample = static_cast<int>(count(j.at("max_resample"), "integrator.max_resample"));
        if (j.contains("boundary_policy")) {
            if (!j.at("boundary_policy").is_string()) fail("integrator.boundary_policy", "expected a string");
            cfg.integrator.boundary_policy = parse_boundary_policy(j.at("boundary_policy").get<std::string>());
        }
        if (j.contains("scheme") && j.at("scheme") != "euler_maruyama")
            fail("integrator.scheme", "only euler_maruyama is available");
    }
    try {
        cfg.integrator.validate();
    } catch (const Error& e) {
        fail("integrator", e.what());
    }
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) fail("integrator.t_end", "must be > 0");
    if (cfg.record_every < 1) fail("integrator.record_every", "must be >= 1");

    const std::size_t n = make_process(cfg.process).dimension();
    if (doc.contains("ensemble")) {
        const auto& j = doc.at("ensemble");
        allow_keys(j, "ensemble", {"size", "initial"});
        if (j.contains("size")) cfg.ensemble_size = count(j.at("size"), "ensemble.size");
        if (j.contains("initial")) {
            const auto& init = j.at("initial");
            allow_keys(init, "ensemble.initial", {"type", "point", "points"});
            const std::string type = init.value("type", std::string("uniform"));
            auto check_point = [&](const std::vector<double>& p, const std::string& where) {
                if (p.size() != n) fail(where, "expected " + std::to_string(n) + " components");
                double sum = 0.0;
                for (double v : p) {
                    if (!(v >= 0.0)) fail(where, "components must be >= 0");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > 1e-9) fail(where, "components must sum to 1");
            };
            if (type == "delta") {
                cfg.initial.kind = InitialCondition::Kind::Delta;
                auto p = numbers(required(init, "point", "ensemble.initial"), "ensemble.initial.point");
                check_point(p, "ensemble.initial.point");
                cfg.initial.points = {std::move(p)};
            } else if (type == "list") {
                cfg.initial.kind = InitialCondition::Kind::List;
                const auto& pts = required(init, "points", "ensemble.initial");
                if (!pts.is_array() || pts.empty()) fail("ensemble.initial.points", "expected a non-empty array");
                for (const auto& pt : pts) {
                    auto p = numbers(pt, "ensemble.initial.points");
                    check_point(p, "ensemble.initial.points");
                    cfg.initial.points.push_back(std::move(p));
                }
            } else if (type == "uniform") {
                cfg.initial.kind = InitialCondition::Kind::Uniform;
            } else {
                fail("ensemble.initial.type", "expected delta, uniform or list");
            }
        }
    }
    if (cfg.ensemble_size < 1) fail("ensemble.size", "must be >= 1");

    if (doc.contains("seed")) {
        const auto& s = doc.at("seed");
        if (!s.is_number_integer() || (!s.is_number_unsigned() && s.get<long long>() < 0))
            fail("seed", "expected a non-negative integer");
        cfg.seed = s.get<std::uint64_t>();
    }

    if (doc.contains("output")) {
        const auto& j = doc.at("output");
        allow_keys(j, "output", {"dir", "formats", "ensemble_times"});
        if (j.contains("dir")) {
            if (!j.at("dir").is_string()) fail("output.dir", "expected a string");
            cfg.output.dir = j.at("dir").get<std::string>();
        }
        if (j.contains("formats")) {
            const auto& f = j.at("formats");
            if (!f.is_array()) fail("output.formats", "expected an array");
            cfg.output.csv = cfg.output.json = false;
            for (const auto& x : f) {
                if (x == "csv") cfg.output.csv = true;
                else if (x == "json") cfg.output.json = true;
                else fail("output.formats", "expected csv and/or json");
            }
        }
        if (j.contains("ensemble_times")) cfg.output.ensemble_times = numbers(j.at("ensemble_times"), "output.ensemble_times");
    }

    if (doc.contains("audit")) {
        const auto& j = doc.at("audit");
        allow_keys(j, "audit", {"samples_per_face", "diffusion_zero_tol", "drift_sign_tol", "moment_stat_tol", "unit_sum"});
        auto& tol = cfg.audit.tolerances;
        if (j.contains("samples_per_face")) cfg.audit.samples_per_face = count(j.at("samples_per_face"), "audit.samples_per_face");
        if (j.contains("diffusion_zero_tol")) tol.diffusion_zero_tol = number(j.at("diffusion_zero_tol"), "audit.diffusion_zero_tol");
        if (j.contains("drift_sign_tol")) tol.drift_sign_tol = number(j.at("drift_sign_tol"), "audit.drift_sign_tol");
        if (j.contains("moment_stat_tol")) tol.moment_stat_tol = number(j.at("moment_stat_tol"), "audit.moment_stat_tol");
        if (j.contains("unit_sum")) {
            const auto& u = j.at("unit_sum");
            if (u == "normal") tol.unit_sum = UnitSumCriterion::Normal;
            else if (u == "entrywise") tol.unit_sum = UnitSumCriterion::Entrywise;
            else fail("audit.unit_sum", "expected normal or entrywise");
        }
        try {
            tol.validate();
        } catch (const Error& e) {
            fail("audit", e.what());
        }
        if (cfg.audit.samples_per_face < 1) fail("audit.samples_per_face", "must be >= 1");
    }

    if (doc.contains("compare")) {
        const auto& j = doc.at("compare");
        allow_keys(j, "compare", {"tol_multiplier", "stationary_from", "batches", "reference_process"});
        if (j.contains("tol_multiplier")) cfg.compare.tol_multiplier = number(j.at("tol_multiplier"), "compare.tol_multiplier");
        if (j.contains("stationary_from")) cfg.compare.stationary_from = number(j.at("stationary_from"), "compare.stationary_from");
        if (j.contains("batches")) cfg.compare.batches = count(j.at("batches"), "compare.batches");
        if (j.contains("reference_process")) {
            cfg.compare.reference = parse_process_spec(j.at("reference_process"), "compare.reference_process");
            if (make_process(*cfg.compare.reference).dimension() != n)
                fail("compare.reference_process", "dimension differs from process");
        }
        if (!(cfg.compare.tol_multiplier > 0.0)) fail("compare.tol_multiplier", "must be > 0");
        if (cfg.compare.batches < 2) fail("compare.batches", "must be >= 2");
    }

    if (doc.contains("sweep")) {
        const auto& j = doc.at("sweep");
        allow_keys(j, "sweep", {"grid"});
        const auto& grid = j.value("grid", ordered_json::object());
        if (!grid.is_object()) fail("sweep.grid", "expected an object of path -> list");
        for (const auto& [path, values] : grid.items()) {
            if (!values.is_array()) fail("sweep.grid." + path, "expected a list of values");
            cfg.sweep.emplace_back(path, std::vector<ordered_json>(values.begin(), values.end()));
        }
    }
    return cfg;
}

RunConfig load_config(const std::string& path) {
    const std::string text = read_file(path);
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const ordered_json::parse_error& e) {
        throw Error(ErrorCode::ConfigError, path + ": " + e.what());
    }
    return parse_config(doc);
}

Ensemble initial_ensemble(const RunConfig& cfg, std::size_t n) {
    Ensemble e(n, cfg.ensemble_size);
    auto stream = RandomSource(cfg.seed, 1).sequential(0);
    for (std::size_t i = 0; i < cfg.ensemble_size; ++i) {
        const SimplexState s = cfg.initial.kind == InitialCondition::Kind::Uniform
                                   ? sample_uniform(n, stream)
                                   : SimplexState::make(cfg.initial.points[i % cfg.initial.points.size()]);
        const auto r = s.reduced();
        std::copy(r.values().begin(), r.values().end(), e.particle(i).begin());
    }
    return e;
}

void set_path(ordered_json& doc, const std::string& dotted, const ordered_json& value) {
    ordered_json* node = &doc;
    std::size_t start = 0;
    while (true) {
        const auto dot = dotted.find('.', start);
        const std::string key = dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (key.empty()) fail("sweep.grid", "bad path '" + dotted + "'");
        if (!node->is_object()) fail("sweep.grid", "path '" + dotted + "' crosses a non-object");
        if (dot == std::string::npos) {
            (*node)[key] = value;
            return;
        }
        node = &(*node)[key];
        if (node->is_null()) *node = ordered_json::object();
        start = dot + 1;
    }
}

}  // namespace simplex
