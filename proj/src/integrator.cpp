#include "simplex/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

namespace simplex {

const char* to_string(BoundaryPolicy policy) noexcept {
    return policy == BoundaryPolicy::RejectResample ? "reject_resample" : "clip_and_renormalize";
}

BoundaryPolicy parse_boundary_policy(const std::string& text) {
    if (text == "reject_resample") return BoundaryPolicy::RejectResample;
    if (text == "clip_and_renormalize") return BoundaryPolicy::ClipAndRenormalize;
    throw Error(ErrorCode::ConfigError, "unknown boundary policy '" + text + "'");
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error(ErrorCode::InvalidParameter, "dt must be > 0");
    if (max_resample < 1 || max_resample > 0xFFFF)
        throw Error(ErrorCode::InvalidParameter, "max_resample must lie in [1, 65535]");
    if (!(factorization_shift >= 0.0)) throw Error(ErrorCode::InvalidParameter, "factorization_shift must be >= 0");
}

void factor_diffusion_into(std::span<const double> B, std::size_t k, double shift, std::span<double> L) {
    double scale = 0.0;
    for (std::size_t i = 0; i < k * k; ++i) scale = std::max(scale, std::abs(B[i]));
    const double tol_sym = 1e-12 * std::max(1.0, scale);
    for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (std::abs(B[i * k + j] - B[j * k + i]) > tol_sym)
                throw Error(ErrorCode::NotPositiveSemiDefinite, "diffusion matrix is not symmetric");

    const double pivot_floor = shift * std::max(1.0, scale);
    const double column_tol = 1e-10 * std::max(1.0, scale);
    std::fill(L.begin(), L.begin() + static_cast<std::ptrdiff_t>(k * k), 0.0);
    for (std::size_t j = 0; j < k; ++j) {
        double pivot = B[j * k + j];
        for (std::size_t p = 0; p < j; ++p) pivot -= L[j * k + p] * L[j * k + p];
        if (pivot < -pivot_floor)
            throw Error(ErrorCode::NotPositiveSemiDefinite, "negative pivot " + std::to_string(pivot));
        if (pivot <= pivot_floor) {
            // Zero column: the remaining entries of this column must vanish too.
            for (std::size_t i = j + 1; i < k; ++i) {
                double rest = B[i * k + j];
                for (std::size_t p = 0; p < j; ++p) rest -= L[i * k + p] * L[j * k + p];
                if (std::abs(rest) > column_tol)
                    throw Error(ErrorCode::NotPositiveSemiDefinite, "zero pivot with non-zero coupling");
            }
            continue;
        }
        const double d = std::sqrt(pivot);
        L[j * k + j] = d;
        for (std::size_t i = j + 1; i < k; ++i) {
            double v = B[i * k + j];
            for (std::size_t p = 0; p < j; ++p) v -= L[i * k + p] * L[j * k + p];
            L[i * k + j] = v / d;
        }
    }
}

Matrix factor_diffusion(const Matrix& B, double shift) {
    if (B.rows() != B.cols()) throw Error(ErrorCode::InvalidParameter, "diffusion matrix must be square");
    Matrix L(B.rows(), B.cols());
    factor_diffusion_into(B.data(), B.rows(), shift, L.data());
    return L;
}

namespace {

/// Per-thread workspace for advancing one particle at a time.
class Stepper {
public:
    Stepper(const ProcessDefinition& proc, const IntegratorConfig& cfg, const RandomSource& rng)
        : proc_(proc), cfg_(cfg), rng_(rng), k_(proc.reduced_dimension()),
          sqrt_dt_(std::sqrt(cfg.dt)),
          drift_(k_), diffusion_(k_ * k_), factor_(k_ * k_), noise_(k_), proposal_(k_) {}

    struct Outcome {
        int resamples = 0;
        bool clipped = false;
    };

    Outcome advance(std::span<double> y, double t, NoiseKey key) {
        try {
            proc_.drift_into(y, t, drift_);
            proc_.diffusion_into(y, t, diffusion_);
        } catch (const std::exception& e) {
            throw Error(ErrorCode::DegenerateState, std::string("evaluation failed: ") + e.what());
        }
        for (double v : drift_)
            if (!std::isfinite(v)) throw Error(ErrorCode::DegenerateState, "non-finite drift");
        for (double v : diffusion_)
            if (!std::isfinite(v)) throw Error(ErrorCode::DegenerateState, "non-finite diffusion");
        factor_diffusion_into(diffusion_, k_, cfg_.factorization_shift, factor_);
        const bool noisy = std::any_of(factor_.begin(), factor_.end(), [](double v) { return v != 0.0; });

        Outcome out;
        const int attempts = (noisy && cfg_.boundary_policy == BoundaryPolicy::RejectResample)
                                 ? 1 + cfg_.max_resample
                                 : 1;
        for (int attempt = 0; attempt < attempts; ++attempt) {
            propose(y, key, static_cast<std::uint32_t>(attempt), noisy);
            if (is_realizable(proposal_)) {
                out.resamples = attempt;
                std::copy(proposal_.begin(), proposal_.end(), y.begin());
                return out;
            }
        }
        out.resamples = attempts - 1;
        out.clipped = clip_and_renormalize(proposal_);
        std::copy(proposal_.begin(), proposal_.end(), y.begin());
        return out;
    }

private:
    void propose(std::span<const double> y, NoiseKey key, std::uint32_t attempt, bool noisy) {
        for (std::size_t a = 0; a < k_; ++a) proposal_[a] = y[a] + drift_[a] * cfg_.dt;
        if (!noisy) return;
        rng_.normals(key.particle, key.step, attempt, noise_);
        for (std::size_t a = 0; a < k_; ++a) {
            double kick = 0.0;
            for (std::size_t g = 0; g <= a; ++g) kick += factor_[a * k_ + g] * noise_[g];
            proposal_[a] += kick * sqrt_dt_;
        }
    }

    const ProcessDefinition& proc_;
    const IntegratorConfig& cfg_;
    const RandomSource& rng_;
    std::size_t k_;
    double sqrt_dt_;
    std::vector<double> drift_, diffusion_, factor_, noise_, proposal_;
};

}  // namespace

StepResult step(const ReducedState& state, const ProcessDefinition& proc, double t,
                const IntegratorConfig& cfg, const RandomSource& rng, NoiseKey key) {
    cfg.validate();
    if (state.dimension() != proc.dimension())
        throw Error(ErrorCode::InvalidParameter, "state and process dimensions differ");
    std::vector<double> y(state.values().begin(), state.values().end());
    Stepper stepper(proc, cfg, rng);
    const auto outcome = stepper.advance(y, t, key);
    return {ReducedState::make(std::move(y)), outcome.resamples, outcome.clipped};
}

StepCounters& StepCounters::operator+=(const StepCounters& o) noexcept {
    particle_steps += o.particle_steps;
    resampled_steps += o.resampled_steps;
    clipped_steps += o.clipped_steps;
    realizability_violations += o.realizability_violations;
    return *this;
}

namespace {

struct StepFailure {
    std::size_t step;
    std::size_t particle;
    ErrorCode code;
    std::string message;
};

/// Advances particles [begin, end) through steps [first, last). Failing
/// particles are frozen and reported; the others keep going so the earliest
/// failure is found independently of how particles are split across threads.
void advance_range(const ProcessDefinition& proc, const IntegratorConfig& cfg, const RandomSource& rng,
                   Ensemble& ensemble, std::size_t begin, std::size_t end, std::size_t first,
                   std::size_t last, StepCounters& counters, std::vector<StepFailure>& failures) {
    Stepper stepper(proc, cfg, rng);
    for (std::size_t p = begin; p < end; ++p) {
        auto y = ensemble.particle(p);
        for (std::size_t n = first; n < last; ++n) {
            try {
                const auto outcome = stepper.advance(y, static_cast<double>(n) * cfg.dt,
                                                     {static_cast<std::uint32_t>(p), n});
                ++counters.particle_steps;
                if (outcome.resamples > 0) ++counters.resampled_steps;
                if (outcome.clipped) ++counters.clipped_steps;
                if (!is_realizable(y)) ++counters.realizability_violations;
            } catch (const Error& e) {
                std::string message = e.what();
                const std::string prefix = std::string(to_string(e.code())) + ": ";
                if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
                failures.push_back({n, p, e.code(), message});
                break;
            }
        }
    }
}

}  // namespace

Trajectory simulate(const ProcessDefinition& proc, const Ensemble& init, const IntegratorConfig& cfg,
                    double t_end, std::size_t record_every, const RandomSource& rng,
                    const SimulateOptions& options, const SnapshotObserver& observer) {
    cfg.validate();
    if (!(t_end > 0.0)) throw Error(ErrorCode::InvalidParameter, "t_end must be > 0");
    if (record_every < 1) throw Error(ErrorCode::InvalidParameter, "record_every must be >= 1");
    if (init.size() == 0) throw Error(ErrorCode::InvalidParameter, "initial ensemble is empty");
    if (init.dimension() != proc.dimension())
        throw Error(ErrorCode::InvalidParameter, "ensemble and process dimensions differ");
    if (init.size() > 0xFFFFFFFFull) throw Error(ErrorCode::InvalidParameter, "ensemble too large for noise keys");
    for (std::size_t p = 0; p < init.size(); ++p)
        if (!is_realizable(init.particle(p)))
            throw Error(ErrorCode::SumViolation, "initial particle " + std::to_string(p) + " is not realizable");

    const auto total_steps = static_cast<std::size_t>(std::ceil(t_end / cfg.dt - 1e-9));
    const unsigned threads = std::clamp<unsigned>(options.threads, 1u, static_cast<unsigned>(init.size()));

    Ensemble ensemble = init;
    Trajectory traj;
    traj.dt = cfg.dt;

    auto record = [&](std::size_t n) {
        Snapshot snap;
        snap.step = n;
        snap.t = static_cast<double>(n) * cfg.dt;
        if (ensemble.size() >= 2) snap.moments = estimate_moments(ensemble);
        if (observer) observer(snap, ensemble);
        if (options.keep_ensembles) snap.ensemble = ensemble;
        traj.times.push_back(snap.t);
        traj.snapshots.push_back(std::move(snap));
    };

    record(0);
    for (std::size_t first = 0; first < total_steps;) {
        const std::size_t last = std::min(total_steps, first + record_every);
        std::vector<StepCounters> counters(threads);
        std::vector<std::vector<StepFailure>> failures(threads);
        const std::size_t chunk = (ensemble.size() + threads - 1) / threads;
        if (threads == 1) {
            advance_range(proc, cfg, rng, ensemble, 0, ensemble.size(), first, last, counters[0], failures[0]);
        } else {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w) {
                const std::size_t begin = std::min(ensemble.size(), w * chunk);
                const std::size_t end = std::min(ensemble.size(), begin + chunk);
                pool.emplace_back([&, w, begin, end] {
                    advance_range(proc, cfg, rng, ensemble, begin, end, first, last, counters[w], failures[w]);
                });
            }
        }
        for (const auto& c : counters) traj.counters += c;

        const StepFailure* earliest = nullptr;
        for (const auto& list : failures)
            for (const auto& f : list)
                if (!earliest || std::tie(f.step, f.particle) < std::tie(earliest->step, earliest->particle))
                    earliest = &f;
        if (earliest) {
            std::ostringstream msg;
            msg << earliest->message << " (particle " << earliest->particle << ", t="
                << static_cast<double>(earliest->step) * cfg.dt << ")";
            throw Error(earliest->code, msg.str());
        }
        first = last;
        record(last);
    }
    return traj;
}

}  // namespace simplex
