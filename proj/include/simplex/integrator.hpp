#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "simplex/core.hpp"
#include "simplex/ensemble.hpp"
#include "simplex/moments.hpp"
#include "simplex/random.hpp"

namespace simplex {

enum class Scheme { EulerMaruyama };
enum class BoundaryPolicy { ClipAndRenormalize, RejectResample };

const char* to_string(BoundaryPolicy policy) noexcept;
BoundaryPolicy parse_boundary_policy(const std::string& text);

struct IntegratorConfig {
    double dt = 1e-3;
    Scheme scheme = Scheme::EulerMaruyama;
    BoundaryPolicy boundary_policy = BoundaryPolicy::RejectResample;
    int max_resample = 100;
    double factorization_shift = 1e-14;

    void validate() const;
};

/// Lower-triangular b with b b^T = B for symmetric positive semi-definite B.
/// Pivots within shift * max(1, |B|_max) of zero (including tiny negatives from
/// roundoff) produce a zero column; anything more negative, or a zero pivot
/// with a non-vanishing column below it, raises NotPositiveSemiDefinite.
Matrix factor_diffusion(const Matrix& B, double shift = 1e-14);

/// Allocation-free form used on the hot path: `B` and `L` are k x k row-major.
void factor_diffusion_into(std::span<const double> B, std::size_t k, double shift, std::span<double> L);

/// Addresses one particle-step in the counter-based noise.
struct NoiseKey {
    std::uint32_t particle = 0;
    std::uint64_t step = 0;
};

struct StepResult {
    ReducedState state;
    int resamples = 0;     // redraws needed before acceptance
    bool clipped = false;  // the proposal was clipped and renormalized

    bool modified() const noexcept { return resamples > 0 || clipped; }
};

/// One Euler-Maruyama step Y' = Y + A dt + b xi sqrt(dt) with boundary handling.
StepResult step(const ReducedState& state, const ProcessDefinition& proc, double t,
                const IntegratorConfig& cfg, const RandomSource& rng, NoiseKey key = {});

struct StepCounters {
    std::uint64_t particle_steps = 0;
    std::uint64_t resampled_steps = 0;  // steps that needed at least one redraw
    std::uint64_t clipped_steps = 0;
    std::uint64_t realizability_violations = 0;  // states failing is_realizable after a step

    StepCounters& operator+=(const StepCounters& o) noexcept;
};

struct SimulateOptions {
    unsigned threads = 1;
    bool keep_ensembles = true;  // retain each recorded ensemble in the trajectory
};

/// Recorded state of the run at one time.
struct Snapshot {
    double t = 0.0;
    std::size_t step = 0;
    std::optional<MomentSet> moments;  // absent when M < 2
    std::optional<Ensemble> ensemble;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Snapshot> snapshots;
    StepCounters counters;
    double dt = 0.0;
};

/// Callback invoked on each recorded snapshot in time order.
using SnapshotObserver = std::function<void(const Snapshot&, const Ensemble&)>;

/// Advances every particle independently from t = 0 to t_end, recording every
/// `record_every` steps (and at t_end). Results are bit-identical for any
/// thread count.
Trajectory simulate(const ProcessDefinition& proc, const Ensemble& init, const IntegratorConfig& cfg,
                    double t_end, std::size_t record_every, const RandomSource& rng,
                    const SimulateOptions& options = {}, const SnapshotObserver& observer = {});

}  // namespace simplex
