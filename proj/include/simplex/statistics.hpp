#pragma once

#include <cstddef>
#include <vector>

#include "simplex/integrator.hpp"
#include "simplex/moments.hpp"
#include "simplex/realizability.hpp"

namespace simplex {

inline constexpr std::size_t kDefaultBatches = 20;

/// Compares central finite differences of the recorded moments with the rates
/// estimated from the recorded ensembles. For every quantity the residuals
/// FD_i - rate_i over the interior snapshots are averaged into one statistic R;
/// its standard error comes from batch means over contiguous particle batches,
/// and the allowance for time discretization is the gap between the rate at a
/// snapshot and its Simpson average over the neighbouring snapshots. A quantity
/// passes when |R| <= tol_multiplier * (SE + bias).
///
/// Means, covariances and the Ito-form third/fourth rates gate overall_pass; the
/// printed third/fourth forms are reported under `informational`. notes
/// "third_form" and "fourth_form" name the form that matches: ito, printed,
/// both or neither.
///
/// Throws InsufficientSnapshots when fewer than three snapshots carry ensembles.
AuditReport cross_validate_rates(const Trajectory& traj, const ProcessDefinition& proc, double tol_multiplier,
                                 std::size_t batches = kDefaultBatches);

/// Time average of the moments over the snapshots with t >= t_from, with
/// standard errors from batch means over particles.
struct StationaryEstimate {
    std::size_t dimension = 0;
    std::size_t snapshots = 0;
    double t_from = 0.0;
    std::vector<double> mean, mean_se;
    Matrix covariance, covariance_se;
    std::vector<double> third, third_se;
    std::vector<double> fourth, fourth_se;
};

StationaryEstimate stationary_average(const Trajectory& traj, double t_from,
                                      std::size_t batches = kDefaultBatches);

/// Residuals of an estimate against analytic moments. Means and covariances
/// gate; third and fourth moments are informational.
AuditReport compare_stationary(const StationaryEstimate& est, const MomentSet& oracle, double tol_multiplier);

/// Two independent estimates, compared with the combined standard error.
AuditReport compare_stationary(const StationaryEstimate& a, const StationaryEstimate& b, double tol_multiplier);

}  // namespace simplex
