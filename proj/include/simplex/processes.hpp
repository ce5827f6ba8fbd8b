#pragma once

#include <vector>

#include "simplex/core.hpp"

namespace simplex {

struct BetaParams {
    double b = 1.0;      // relaxation rate
    double S = 0.5;      // stationary mean
    double kappa = 1.0;  // diffusion strength

    /// S at 0 or 1 turns the corresponding endpoint into an absorbing barrier.
    bool absorbing_allowed() const noexcept { return S == 0.0 || S == 1.0; }
    void validate() const;
};

struct WrightFisherParams {
    std::vector<double> omega;  // one per species, N = omega.size()

    double omega_total() const noexcept;
    void validate() const;
};

struct DirichletParams {
    std::vector<double> b, S, kappa;  // K = N-1 entries each
    /// Require (1-S_a) b_a / kappa_a to be common so the invariant law is Dirichlet.
    bool dirichlet_invariant = false;

    std::size_t reduced_dimension() const noexcept { return b.size(); }
    /// Largest relative spread of (1-S_a) b_a / kappa_a across a.
    double invariant_ratio_spread() const;
    void validate() const;
};

struct GenDirichletParams {
    std::vector<double> b, S, kappa;  // K entries each
    /// K x (K-1) coupling matrix; entries below the diagonal must vanish.
    Matrix c;

    std::size_t reduced_dimension() const noexcept { return b.size(); }
    void validate() const;

    /// c_ab = kappa_b for a <= b. The invariant law is Dirichlet with this
    /// coupling only for K <= 2 or when kappa_b is the same for all b >= a.
    static Matrix reduction_coupling(const std::vector<double>& kappa);
    /// c_ab = kappa_a for a <= b: Dirichlet invariant law for every K (given the
    /// common-ratio condition on b, S, kappa).
    static Matrix row_reduction_coupling(const std::vector<double>& kappa);
};

enum class BrokenStyle { ConstantDiffusion, OutwardDrift };

/// Relative tolerance used to decide whether the Dirichlet ratio is common.
inline constexpr double kDirichletRatioTolerance = 1e-10;

/// N = 2: A = b/2 (S - Y), B = kappa Y (1 - Y).
ProcessDefinition beta_process(const BetaParams& p);

/// A_a = (omega_a - omega Y_a)/2, B_ab = Y_a (delta_ab - Y_b).
ProcessDefinition wright_fisher_process(const WrightFisherParams& p);

/// A_a = b_a/2 [S_a Y_N - (1 - S_a) Y_a], B = diag(kappa_a Y_a Y_N).
ProcessDefinition dirichlet_process(const DirichletParams& p);

/// Lochner's generalized Dirichlet diffusion. Nested remainders
/// Ycal_a = 1 - sum_{b<=a} Y_b appear in denominators; 0/0 at a
/// degenerate nesting raises SingularNesting, 0/positive evaluates to 0.
ProcessDefinition gen_dirichlet_process(const GenDirichletParams& p);

/// Deliberately non-realizable negative controls (N = dimension, default 3).
ProcessDefinition broken_process(BrokenStyle style, std::size_t dimension = 3);

}  // namespace simplex
