#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <set>
#include <sstream>

#include <unistd.h>

#include "generators.hpp"
#include "simplex/config.hpp"
#include "simplex/io.hpp"
#include "simplex/runner.hpp"

using namespace simplex;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() /
                ("simplex_cli_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    fs::path path_;
};

ordered_json beta_doc(std::size_t m = 500, double t_end = 0.5) {
    ordered_json doc;
    doc["schema_version"] = 1;
    doc["process"] = {{"name", "beta"}, {"params", {{"b", 2.0}, {"S", 0.5}, {"kappa", 1.0}}}};
    doc["integrator"] = {{"dt", 0.001}, {"t_end", t_end}, {"record_every", 50}};
    doc["ensemble"] = {{"size", m}, {"initial", {{"type", "delta"}, {"point", {0.9, 0.1}}}}};
    doc["seed"] = 7;
    return doc;
}

std::string write_config(const TempDir& dir, const ordered_json& doc, const std::string& name = "config.json") {
    const auto path = dir.file(name);
    write_file(path, doc.dump(2));
    return path;
}

struct Result {
    int code;
    std::string out, err;
};

Result invoke(int (*cmd)(const CliOptions&, std::ostream&, std::ostream&), CliOptions options) {
    std::ostringstream out, err;
    const int code = cmd(options, out, err);
    return {code, out.str(), err.str()};
}

CliOptions options_for(const std::string& config, const std::string& outdir, unsigned threads = 1) {
    CliOptions o;
    o.config_path = config;
    o.outdir = outdir;
    o.threads = threads;
    return o;
}

}  // namespace

TEST(FormatDouble, PropertyRoundTripsExactly) {
    gen::Rng rng(71);
    std::uniform_int_distribution<std::uint64_t> bits;
    for (int i = 0; i < 100000; ++i) {
        double v;
        const std::uint64_t b = bits(rng);
        std::memcpy(&v, &b, sizeof v);
        if (!std::isfinite(v)) continue;
        ASSERT_EQ(parse_double(format_double(v)), v) << format_double(v);
    }
    EXPECT_TRUE(std::isnan(parse_double(format_double(NAN))));
    EXPECT_EQ(format_double(0.5), "0.5");
    EXPECT_THROW(parse_double("1.5x"), Error);
    EXPECT_THROW(parse_double(""), Error);
}

TEST(CsvTable, PropertyByteForByteRoundTrip) {
    gen::Rng rng(72);
    for (int trial = 0; trial < 50; ++trial) {
        CsvTable t;
        const auto cols = gen::dimension(rng, 1, 8);
        for (std::size_t c = 0; c < cols; ++c) t.header.push_back("c" + std::to_string(c));
        for (std::size_t r = 0; r < gen::dimension(rng, 0, 20); ++r) {
            std::vector<double> row;
            for (std::size_t c = 0; c < cols; ++c)
                row.push_back(c == 0 && r % 7 == 3 ? NAN : gen::uniform(rng, -1e3, 1e3) * std::pow(10.0, gen::uniform(rng, -20, 20)));
            t.rows.push_back(row);
        }
        const auto text = t.write();
        EXPECT_EQ(CsvTable::read(text).write(), text);
    }
    EXPECT_THROW(CsvTable::read("a,b\n1\n"), Error);
}

TEST(Config, ParsesExampleConfigs) {
    for (const char* name : {"beta", "wright_fisher", "dirichlet", "gen_dirichlet", "broken", "beta_dt_sweep"}) {
        const auto cfg = load_config(std::string(SIMPLEX_SOURCE_DIR) + "/configs/" + name + ".json");
        EXPECT_EQ(cfg.schema_version, 1) << name;
        EXPECT_NO_THROW(make_process(cfg.process)) << name;
    }
}

TEST(Config, RejectsMalformedInput) {
    auto expect_code = [](const ordered_json& doc, ErrorCode code, const std::string& what) {
        try {
            const auto cfg = parse_config(doc);
            make_process(cfg.process);
            initial_ensemble(cfg, make_process(cfg.process).dimension());
            FAIL() << what;
        } catch (const Error& e) {
            EXPECT_EQ(e.code(), code) << what << ": " << e.what();
        }
    };
    auto doc = beta_doc();
    doc["unknown"] = 1;
    expect_code(doc, ErrorCode::ConfigError, "unknown key");
    doc = beta_doc();
    doc["schema_version"] = 2;
    expect_code(doc, ErrorCode::ConfigError, "schema version");
    doc = beta_doc();
    doc["ensemble"]["initial"]["point"] = {0.9, 0.2};
    expect_code(doc, ErrorCode::ConfigError, "point sum");
    doc = beta_doc();
    doc["process"]["name"] = "nope";
    expect_code(doc, ErrorCode::ConfigError, "process name");
    doc = beta_doc();
    doc["integrator"]["dt"] = -1.0;
    expect_code(doc, ErrorCode::ConfigError, "dt");
    doc = beta_doc();
    doc["ensemble"]["size"] = 0;
    expect_code(doc, ErrorCode::ConfigError, "size");
    doc = beta_doc();
    doc["process"]["params"]["S"] = 1.5;
    expect_code(doc, ErrorCode::InvalidParameter, "S out of range");
    doc = beta_doc();
    doc["process"] = {{"name", "dirichlet"},
                      {"params", {{"b", {4, 5}}, {"S", {0.5, 0.6}}, {"kappa", {1, 2}}, {"dirichlet_invariant", true}}}};
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    expect_code(doc, ErrorCode::DirichletConstraintViolated, "invariant constraint");
}

TEST(Config, SetPathCreatesNestedObjects) {
    ordered_json doc = {{"a", {{"b", 1}}}};
    set_path(doc, "a.b", 2);
    set_path(doc, "a.c.d", "x");
    EXPECT_EQ(doc["a"]["b"], 2);
    EXPECT_EQ(doc["a"]["c"]["d"], "x");
}

TEST(Config, InitialEnsembles) {
    auto doc = beta_doc(6);
    doc["process"] = {{"name", "wright_fisher"}, {"params", {{"omega", {1, 1, 1}}}}};
    doc["ensemble"]["initial"] = {{"type", "list"}, {"points", {{1, 0, 0}, {0.2, 0.3, 0.5}}}};
    const auto e = initial_ensemble(parse_config(doc), 3);
    ASSERT_EQ(e.size(), 6u);
    EXPECT_EQ(e.fraction(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(e.fraction(3, 2), 0.5);
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    const auto u = initial_ensemble(parse_config(doc), 3);
    EXPECT_EQ(u, initial_ensemble(parse_config(doc), 3));
    for (std::size_t i = 0; i < u.size(); ++i) EXPECT_TRUE(is_realizable(u.particle(i)));
}

TEST(ResolveOutdir, Precedence) {
    auto cfg = parse_config(beta_doc());
    CliOptions o;
    ::unsetenv(kOutdirVariable);
    EXPECT_EQ(resolve_outdir(o, cfg), ".");
    ::setenv(kOutdirVariable, "/tmp/from_env", 1);
    EXPECT_EQ(resolve_outdir(o, cfg), "/tmp/from_env");
    cfg.output.dir = "from_config";
    EXPECT_EQ(resolve_outdir(o, cfg), "from_config");
    o.outdir = "from_flag";
    EXPECT_EQ(resolve_outdir(o, cfg), "from_flag");
    ::unsetenv(kOutdirVariable);
}

TEST(CmdCheck, ExitCodes) {
    TempDir dir;
    auto doc = beta_doc();
    doc["process"] = {{"name", "dirichlet"},
                      {"params", {{"b", {4, 5}}, {"S", {0.5, 0.6}}, {"kappa", {1, 1}}, {"dirichlet_invariant", true}}}};
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    auto r = invoke(cmd_check, options_for(write_config(dir, doc), dir.file("ok")));
    EXPECT_EQ(r.code, kExitOk) << r.err;
    EXPECT_TRUE(fs::exists(dir.file("ok/audit.json")));
    EXPECT_NE(r.out.find("PASS"), std::string::npos);

    doc["process"] = {{"name", "broken"}, {"params", {{"style", "constant_diffusion"}}}};
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    r = invoke(cmd_check, options_for(write_config(dir, doc), dir.file("broken")));
    EXPECT_EQ(r.code, kExitFailure);
    const auto audit = ordered_json::parse(read_file(dir.file("broken/audit.json")));
    std::set<std::string> faces;
    for (const auto& c : audit["checks"]) faces.insert(c["subject"].get<std::string>());
    EXPECT_EQ(faces, (std::set<std::string>{"Y1=0", "Y2=0", "sum=1"}));
    for (const char* face : {"Y1=0", "Y2=0", "sum=1"}) EXPECT_NE(r.out.find(face), std::string::npos);

    write_file(dir.file("bad.json"), "{ \"schema_version\": 1, ");
    r = invoke(cmd_check, options_for(dir.file("bad.json"), dir.file("bad")));
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_FALSE(r.err.empty());
    r = invoke(cmd_check, options_for(dir.file("missing.json"), dir.file("bad")));
    EXPECT_EQ(r.code, kExitConfig);
}

TEST(CmdSimulate, WritesOutputsAndRefusesFailingProcess) {
    TempDir dir;
    auto doc = beta_doc(400, 0.2);
    doc["output"] = {{"ensemble_times", {0.1}}};
    const auto config = write_config(dir, doc);
    auto r = invoke(cmd_simulate, options_for(config, dir.file("sim")));
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char* f : {"moments.csv", "moments.json", "run_meta.json", "ensemble_0.1.csv"})
        EXPECT_TRUE(fs::exists(dir.file(std::string("sim/") + f))) << f;
    const auto moments = CsvTable::read(read_file(dir.file("sim/moments.csv")));
    EXPECT_EQ(moments.header, moments_header(2));
    EXPECT_EQ(moments.rows.size(), 5u);
    const auto ens = CsvTable::read(read_file(dir.file("sim/ensemble_0.1.csv")));
    EXPECT_EQ(ens.rows.size(), 400u);
    const auto meta = ordered_json::parse(read_file(dir.file("sim/run_meta.json")));
    EXPECT_EQ(meta["version"], kVersion);
    EXPECT_EQ(meta["seed"], 7);
    EXPECT_EQ(meta["config"], doc);
    EXPECT_EQ(meta["counters"]["realizability_violations"], 0);

    doc["process"] = {{"name", "broken"}, {"params", {{"style", "constant_diffusion"}}}};
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    doc["output"] = ordered_json::object();
    r = invoke(cmd_simulate, options_for(write_config(dir, doc, "broken.json"), dir.file("broken")));
    EXPECT_EQ(r.code, kExitFailure);
    EXPECT_FALSE(fs::exists(dir.file("broken/moments.csv")));
}

TEST(CmdSimulate, WrightFisherCovarianceRowSumsVanish) {
    TempDir dir;
    auto doc = beta_doc(300, 0.3);
    doc["process"] = {{"name", "wright_fisher"}, {"params", {{"omega", {1, 1, 1}}}}};
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    ASSERT_EQ(invoke(cmd_simulate, options_for(write_config(dir, doc), dir.file("wf"))).code, kExitOk);
    const auto t = CsvTable::read(read_file(dir.file("wf/moments.csv")));
    auto col = [&](const std::string& name) {
        return static_cast<std::size_t>(std::find(t.header.begin(), t.header.end(), name) - t.header.begin());
    };
    const auto& last = t.rows.back();
    auto cov = [&](int a, int b) { return last[col("cov_" + std::to_string(std::min(a, b)) + "_" + std::to_string(std::max(a, b)))]; };
    for (int a = 1; a <= 3; ++a) EXPECT_LE(std::abs(cov(a, 1) + cov(a, 2) + cov(a, 3)), 1e-12);
}

TEST(CmdSimulate, FilesIndependentOfThreadsAndSeedOverrideApplies) {
    TempDir dir;
    auto doc = beta_doc(301, 0.2);
    doc["process"] = {{"name", "wright_fisher"}, {"params", {{"omega", {0.5, 1, 2}}}}};
    doc["ensemble"]["initial"] = {{"type", "uniform"}};
    doc["output"] = {{"ensemble_times", {0.2}}};
    const auto config = write_config(dir, doc);
    ASSERT_EQ(invoke(cmd_simulate, options_for(config, dir.file("t1"), 1)).code, kExitOk);
    ASSERT_EQ(invoke(cmd_simulate, options_for(config, dir.file("t5"), 5)).code, kExitOk);
    for (const char* f : {"moments.csv", "moments.json", "ensemble_0.2.csv"})
        EXPECT_EQ(read_file(dir.file(std::string("t1/") + f)), read_file(dir.file(std::string("t5/") + f))) << f;
    auto m1 = ordered_json::parse(read_file(dir.file("t1/run_meta.json")));
    auto m5 = ordered_json::parse(read_file(dir.file("t5/run_meta.json")));
    m1.erase("timestamp");
    m5.erase("timestamp");
    EXPECT_EQ(m1, m5);

    auto o = options_for(config, dir.file("s"), 1);
    o.seed = 8;
    ASSERT_EQ(invoke(cmd_simulate, o).code, kExitOk);
    EXPECT_NE(read_file(dir.file("t1/moments.csv")), read_file(dir.file("s/moments.csv")));
    EXPECT_EQ(ordered_json::parse(read_file(dir.file("s/run_meta.json")))["seed"], 8);
}

TEST(CmdSimulate, CsvFilesRoundTripByteForByte) {
    TempDir dir;
    auto doc = beta_doc(50, 0.1);
    doc["output"] = {{"ensemble_times", {0.1}}};
    ASSERT_EQ(invoke(cmd_simulate, options_for(write_config(dir, doc), dir.file("rt"))).code, kExitOk);
    for (const char* f : {"rt/moments.csv", "rt/ensemble_0.1.csv"}) {
        const auto text = read_file(dir.file(f));
        EXPECT_EQ(CsvTable::read(text).write(), text) << f;
    }
}

TEST(CmdCompare, BetaPassesAndWritesReport) {
    TempDir dir;
    auto doc = beta_doc(2000, 6.0);
    doc["ensemble"]["initial"]["point"] = {0.5, 0.5};
    doc["compare"] = {{"stationary_from", 3.0}};
    const auto r = invoke(cmd_compare, options_for(write_config(dir, doc), dir.file("cmp"), 4));
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    const auto report = ordered_json::parse(read_file(dir.file("cmp/compare.json")));
    EXPECT_TRUE(report.contains("rates"));
    EXPECT_TRUE(report.contains("oracle"));
    EXPECT_TRUE(fs::exists(dir.file("cmp/rates.csv")));
    EXPECT_TRUE(fs::exists(dir.file("cmp/moments.csv")));
}

TEST(CmdCompare, TooFewSnapshotsIsAConfigError) {
    TempDir dir;
    auto doc = beta_doc(50, 0.002);
    doc["integrator"]["record_every"] = 2;
    const auto r = invoke(cmd_compare, options_for(write_config(dir, doc), dir.file("few")));
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("InsufficientSnapshots"), std::string::npos) << r.err;
}

TEST(CmdSweep, EmptyGridIsAConfigError) {
    TempDir dir;
    auto doc = beta_doc();
    doc["sweep"] = {{"grid", ordered_json::object()}};
    EXPECT_EQ(invoke(cmd_sweep, options_for(write_config(dir, doc), dir.file("e"))).code, kExitConfig);
    doc["sweep"] = {{"grid", {{"integrator.dt", ordered_json::array()}}}};
    EXPECT_EQ(invoke(cmd_sweep, options_for(write_config(dir, doc, "b.json"), dir.file("e"))).code, kExitConfig);
    doc.erase("sweep");
    EXPECT_EQ(invoke(cmd_sweep, options_for(write_config(dir, doc, "c.json"), dir.file("e"))).code, kExitConfig);
}

TEST(CmdSweep, StationaryMeanTracksS) {
    TempDir dir;
    auto doc = beta_doc(1000, 8.0);
    doc["ensemble"]["initial"]["point"] = {0.5, 0.5};
    doc["compare"] = {{"stationary_from", 5.0}};
    doc["sweep"] = {{"grid", {{"process.params.S", {0.3, 0.5, 0.7}}}}};
    const auto r = invoke(cmd_sweep, options_for(write_config(dir, doc), dir.file("sw"), 4));
    EXPECT_EQ(r.code, kExitOk) << r.out << r.err;
    const auto t = CsvTable::read(read_file(dir.file("sw/sweep.csv")));
    ASSERT_EQ(t.rows.size(), 3u);
    EXPECT_EQ(t.header[1], "process.params.S");
    EXPECT_EQ(t.header.back(), "runtime_s");
    const auto mean = std::find(t.header.begin(), t.header.end(), "mean_1") - t.header.begin();
    for (const auto& row : t.rows) {
        EXPECT_NEAR(row[mean], row[1], 3 * row[mean + 1]) << "S=" << row[1];
        EXPECT_GT(row.back(), 0.0);
    }
    for (int p = 0; p < 3; ++p) EXPECT_TRUE(fs::exists(dir.file("sw/point_" + std::to_string(p) + "/compare.json")));
}
