#include <gtest/gtest.h>

#include <cmath>

#include "generators.hpp"
#include "simplex/moments.hpp"
#include "simplex/processes.hpp"
#include "simplex/realizability.hpp"

using namespace simplex;

namespace {

std::vector<ProcessDefinition> named_processes() {
    return {beta_process({2.0, 0.5, 1.0}), wright_fisher_process({{1, 1, 1}}),
            dirichlet_process({{4, 5}, {0.5, 0.6}, {1, 1}, true}),
            gen_dirichlet_process({{4, 5}, {0.5, 0.6}, {1, 1}, GenDirichletParams::reduction_coupling({1, 1})})};
}

}  // namespace

TEST(AuditBoundary, NamedProcessesPass) {
    for (const auto& p : named_processes())
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto r = audit_boundary(p, 500, RandomSource(seed));
            EXPECT_TRUE(r.overall_pass) << p.name() << " seed " << seed;
            EXPECT_EQ(r.checks.size(), 3 * p.dimension());
        }
}

TEST(AuditBoundary, ConstantDiffusionFailsEveryDiffusionCheck) {
    const auto r = audit_boundary(broken_process(BrokenStyle::ConstantDiffusion), 100, RandomSource(4));
    EXPECT_FALSE(r.overall_pass);
    int diffusion_checks = 0;
    for (const auto& c : r.checks) {
        if (c.constraint.find(".diffusion") == std::string::npos) continue;
        ++diffusion_checks;
        EXPECT_FALSE(c.pass) << c.subject;
        EXPECT_NEAR(c.violation, 0.1, 1e-15) << c.subject;
        ASSERT_TRUE(c.location.has_value());
    }
    EXPECT_EQ(diffusion_checks, 3);
}

TEST(AuditBoundary, OutwardDriftIsFlagged) {
    const auto r = audit_boundary(broken_process(BrokenStyle::OutwardDrift), 100, RandomSource(4));
    EXPECT_FALSE(r.overall_pass);
    for (const auto& c : r.checks)
        if (c.constraint == "zero_face.drift") {
            EXPECT_FALSE(c.pass);
            EXPECT_DOUBLE_EQ(c.violation, 1.0);
        }
}

TEST(AuditBoundary, EntrywiseUnitSumReadingRejectsWrightFisher) {
    ToleranceSet tol;
    tol.unit_sum = UnitSumCriterion::Entrywise;
    const auto wf = audit_boundary(wright_fisher_process({{1, 1, 1}}), 200, RandomSource(5), tol);
    EXPECT_FALSE(wf.overall_pass);
    for (const auto& c : wf.checks)
        if (c.constraint.rfind("zero_face", 0) == 0) EXPECT_TRUE(c.pass) << c.constraint << " " << c.subject;
    const auto dir = audit_boundary(dirichlet_process({{4, 5}, {0.5, 0.6}, {1, 1}, true}), 200, RandomSource(5), tol);
    EXPECT_TRUE(dir.overall_pass);
}

TEST(AuditBoundary, DeterministicForSeed) {
    const auto p = wright_fisher_process({{0.5, 1.0, 2.0}});
    const auto a = audit_boundary(p, 50, RandomSource(6));
    const auto b = audit_boundary(p, 50, RandomSource(6));
    ASSERT_EQ(a.checks.size(), b.checks.size());
    for (std::size_t i = 0; i < a.checks.size(); ++i) {
        EXPECT_EQ(a.checks[i].violation, b.checks[i].violation);
        EXPECT_EQ(a.checks[i].location, b.checks[i].location);
    }
}

TEST(AuditBoundary, PropertyRandomValidParametersPass) {
    gen::Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = gen::dimension(rng, 3, 5);
        for (const auto& p : {wright_fisher_process(gen::wf_params(rng, n)),
                              dirichlet_process(gen::dirichlet_params(rng, n - 1, false)),
                              gen_dirichlet_process(gen::gen_dirichlet_params(rng, n - 1, false))}) {
            const auto r = audit_boundary(p, 50, RandomSource(trial));
            EXPECT_TRUE(r.overall_pass) << p.name() << " N=" << n;
        }
    }
}

TEST(AuditMomentBounds, SpecExamples) {
    const auto degenerate = estimate_moments(Ensemble::replicate(SimplexState::make({0.2, 0.3, 0.5}), 10));
    EXPECT_TRUE(audit_moment_bounds(degenerate, 10).overall_pass);

    const auto two = estimate_moments(
        Ensemble::from_states({SimplexState::make({1.0, 0.0}), SimplexState::make({0.0, 1.0})}));
    EXPECT_DOUBLE_EQ(two.mean[0], 0.5);
    EXPECT_DOUBLE_EQ(two.variance(0), 0.25);
    EXPECT_DOUBLE_EQ(two.variance(1), 0.25);
    EXPECT_TRUE(audit_moment_bounds(two, 2).overall_pass);

    auto bad = two;
    bad.mean[0] = 1.2;
    const auto r = audit_moment_bounds(bad, 2);
    EXPECT_FALSE(r.overall_pass);
    bool flagged = false;
    for (const auto& c : r.checks)
        if (c.constraint == "moments.mean_bounds") {
            flagged = !c.pass;
            EXPECT_NEAR(c.violation, 0.2, 1e-15);
            EXPECT_EQ(c.index, (std::pair<int, int>{1, 1}));
        }
    EXPECT_TRUE(flagged);
}

TEST(AuditMomentBounds, EachBoundIsChecked) {
    const auto base = estimate_moments(
        Ensemble::from_states({SimplexState::make({0.7, 0.2, 0.1}), SimplexState::make({0.1, 0.3, 0.6})}));
    auto expect_fail = [&](auto&& mutate, const std::string& constraint) {
        auto m = base;
        mutate(m);
        const auto r = audit_moment_bounds(m, 2);
        bool failed = false;
        for (const auto& c : r.checks) failed = failed || (c.constraint == constraint && !c.pass);
        EXPECT_TRUE(failed) << constraint;
    };
    expect_fail([](MomentSet& m) { m.mean[1] += 0.1; }, "moments.mean_sum");
    expect_fail([](MomentSet& m) { m.covariance(0, 0) = -0.01; }, "moments.variance_bounds");
    expect_fail([](MomentSet& m) { m.covariance(0, 1) = m.covariance(1, 0) = -1.5; }, "moments.covariance_bounds");
    expect_fail([](MomentSet& m) { m.third[2] = 1.1; }, "moments.third_bounds");
    expect_fail([](MomentSet& m) { m.fourth[0] = -1e-6; }, "moments.fourth_bounds");
    expect_fail([](MomentSet& m) { m.mean[0] = NAN; }, "moments.mean_bounds");
}

TEST(AuditMomentBounds, PropertyValidEnsemblesPass) {
    gen::Rng rng(32);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::dimension(rng);
        const std::size_t m = gen::dimension(rng, 2, 300);
        std::vector<SimplexState> states;
        for (std::size_t i = 0; i < m; ++i) states.push_back(SimplexState::make(gen::composition(rng, n, 0.3)));
        const auto e = Ensemble::from_states(states);
        EXPECT_TRUE(audit_moment_bounds(estimate_moments(e), m).overall_pass);
    }
}

TEST(AuditCovarianceStructure, PropertyRowSumsVanishForValidEnsembles) {
    gen::Rng rng(33);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = gen::dimension(rng);
        const std::size_t m = gen::dimension(rng, 2, 500);
        std::vector<SimplexState> states;
        for (std::size_t i = 0; i < m; ++i) states.push_back(SimplexState::make(gen::composition(rng, n, 0.2)));
        const auto e = Ensemble::from_states(states);
        const auto mom = estimate_moments(e);
        const auto r = audit_covariance_structure(mom, e);
        EXPECT_TRUE(r.overall_pass);
        for (const auto& c : r.checks)
            if (c.constraint != "covariance.symmetry") EXPECT_LE(c.violation, 1e-12) << c.constraint;
    }
}

TEST(AuditCovarianceStructure, IndependentUniformsFail) {
    gen::Rng rng(34);
    const std::size_t n = 3, m = 5000;
    std::vector<double> samples(n * m);
    for (auto& v : samples) v = gen::uniform(rng, 0.0, 1.0);
    const auto mom = estimate_moments(samples, n);
    const auto r = audit_covariance_structure(mom, samples);
    EXPECT_FALSE(r.overall_pass);
    for (const auto& c : r.checks)
        if (c.constraint == "covariance.row_sum") EXPECT_FALSE(c.pass) << c.subject;
}

TEST(AuditCovarianceStructure, TwoComponentAlgebra) {
    gen::Rng rng(35);
    std::vector<SimplexState> states;
    for (int i = 0; i < 100; ++i) states.push_back(SimplexState::make(gen::composition(rng, 2)));
    const auto m = estimate_moments(Ensemble::from_states(states));
    EXPECT_NEAR(m.variance(0), m.variance(1), 1e-15);
    EXPECT_NEAR(m.variance(0), -m.covariance(0, 1), 1e-15);
}

TEST(ToleranceSet, RejectsNonPositive) {
    ToleranceSet t;
    t.drift_sign_tol = 0.0;
    EXPECT_THROW(t.validate(), Error);
}
