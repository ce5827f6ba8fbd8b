#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "simplex/core.hpp"
#include "simplex/ensemble.hpp"

namespace simplex {

/// Variance below which skewness and kurtosis are reported as undefined.
inline constexpr double kDegenerateVariance = 1e-14;

/// Pairwise (cascade) summation over a fixed tree, so the result depends only
/// on the order of the input.
double pairwise_sum(std::span<const double> values) noexcept;

/// Ensemble statistics over all N components (Y_N included).
struct MomentSet {
    std::size_t dimension = 0;
    std::size_t ensemble_size = 0;  // 0 for analytic moment sets
    std::vector<double> mean;
    Matrix covariance;  // N x N central second moments
    std::vector<double> third;
    std::vector<double> fourth;
    std::vector<std::optional<double>> skewness;
    std::vector<std::optional<double>> kurtosis;

    double variance(std::size_t a) const { return covariance(a, a); }
};

/// Fills skewness and kurtosis from the central moments.
void derive_shape_statistics(MomentSet& m);

/// Same estimators over arbitrary M x N row-major samples (full coordinates,
/// no realizability assumed). Used for synthetic controls.
MomentSet estimate_moments(std::span<const double> samples, std::size_t dimension);

/// Two-pass plain Monte-Carlo estimators (1/M normalization) over particles
/// [begin, end). Throws EnsembleTooSmall when fewer than two particles.
MomentSet estimate_moments(const Ensemble& ensemble, std::size_t begin, std::size_t end);
inline MomentSet estimate_moments(const Ensemble& ensemble) {
    return estimate_moments(ensemble, 0, ensemble.size());
}

/// Right-hand sides of the moment-evolution equations over the reduced
/// coordinates, as ensemble expectations at fixed t.
struct MomentRates {
    std::size_t reduced_dimension = 0;
    std::vector<double> mean_rate;  // <A_a>
    Matrix cov_rate;                // <y_a A_b> + <y_b A_a> + <B_ab>
    /// Ito expansion of the centred moment: 3<y_a^2 (A_a - <A_a>)> + 3<y_a B_aa>.
    std::vector<double> third_rate;
    /// Printed form: 3<y_a^2 A_a> + 3 sum_b <y_a B_bb>.
    std::vector<double> third_rate_variant;
    /// 4<y_a^3 (A_a - <A_a>)> + 6<y_a^2 B_aa>.
    std::vector<double> fourth_rate;
    /// Printed form: 4<y_a^3 A_a> + 6 sum_b <y_a^2 B_bb>.
    std::vector<double> fourth_rate_variant;
};

MomentRates estimate_rates(const Ensemble& ensemble, const ProcessDefinition& proc, double t,
                           std::size_t begin, std::size_t end);
inline MomentRates estimate_rates(const Ensemble& ensemble, const ProcessDefinition& proc, double t) {
    return estimate_rates(ensemble, proc, t, 0, ensemble.size());
}

/// Moments of the invariant law of a named process:
///  - beta: Beta(bS/kappa, b(1-S)/kappa);
///  - Wright-Fisher: Dirichlet(omega);
///  - Dirichlet: Dirichlet(b_a S_a / kappa_a, r) with r the common (1-S_a) b_a / kappa_a.
/// Throws Unsupported for the generalized Dirichlet process, for Dirichlet
/// parameters without a common ratio, and for anything else.
MomentSet analytic_stationary(const ProcessDefinition& proc);

/// Moments of a Dirichlet(alpha) law (shared by the analytic oracles).
MomentSet dirichlet_moments(const std::vector<double>& alpha);

}  // namespace simplex
