#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "simplex/core.hpp"
#include "simplex/moments.hpp"
#include "simplex/random.hpp"

namespace simplex {

/// How the unit-sum face is audited.
enum class UnitSumCriterion {
    /// Inward normal drift (sum_a A_a <= tol) and a diffusion matrix that
    /// annihilates the face normal (every row sum of B vanishes).
    Normal,
    /// Every A_a <= tol and every B_ab = 0 on the face.
    Entrywise,
};

struct ToleranceSet {
    double diffusion_zero_tol = 1e-10;
    double drift_sign_tol = 1e-10;
    double moment_stat_tol = 3.0;  // multiplier on the standard error
    UnitSumCriterion unit_sum = UnitSumCriterion::Normal;

    void validate() const;
};

/// Fixed slack for identities that hold sample by sample.
inline constexpr double kIdentityTolerance = 1e-12;

struct AuditCheck {
    std::string constraint;  // e.g. "zero_face.diffusion", "moments.mean_bounds"
    std::string subject;     // face label or moment name
    double violation = 0.0;  // worst measured residual, >= 0
    double allowed = 0.0;    // threshold the residual is compared against
    std::optional<std::vector<double>> location;      // worst reduced state, for face checks
    std::optional<std::pair<int, int>> index;         // 1-based component pair, for moment checks
    bool pass = true;
};

struct AuditReport {
    std::vector<AuditCheck> checks;
    /// Comparisons reported for documentation only; they do not gate overall_pass.
    std::vector<AuditCheck> informational;
    std::map<std::string, std::string> notes;
    bool overall_pass = true;

    void add(AuditCheck check);
    void merge(const AuditReport& other);
    const AuditCheck* worst() const;
};

/// Samples every boundary face and checks the drift-sign and vanishing-diffusion
/// conditions with the face coordinate set to an exact zero (or the sum closed
/// exactly). Faces are processed in face-index order; each face draws from its
/// own substream of `rng`, so the report is a pure function of (proc, seed,
/// samples_per_face, tol).
AuditReport audit_boundary(const ProcessDefinition& proc, std::size_t samples_per_face,
                           const RandomSource& rng, const ToleranceSet& tol = {});

/// Bounds on means and central moments of a composition.
AuditReport audit_moment_bounds(const MomentSet& m, std::size_t ensemble_size, const ToleranceSet& tol = {});

/// Zero row sums of the full covariance matrix, the weak zero-sum constraint
/// and exact symmetry. Statistical checks use tol.moment_stat_tol x SE plus the
/// fixed identity slack; SE comes from `ensemble` (per-particle products).
AuditReport audit_covariance_structure(const MomentSet& m, const Ensemble& ensemble,
                                       const ToleranceSet& tol = {});

/// Same checks for an ensemble that need not be realizable (e.g. a synthetic
/// control): `samples` is M x N row-major full coordinates.
AuditReport audit_covariance_structure(const MomentSet& m, std::span<const double> samples,
                                       const ToleranceSet& tol = {});

}  // namespace simplex
