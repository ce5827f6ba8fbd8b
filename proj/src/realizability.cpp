#include "simplex/realizability.hpp"

#include <algorithm>
#include <cmath>

namespace simplex {

void ToleranceSet::validate() const {
    if (!(diffusion_zero_tol > 0.0) || !(drift_sign_tol > 0.0) || !(moment_stat_tol > 0.0))
        throw Error(ErrorCode::InvalidParameter, "tolerances must be strictly positive");
}

void AuditReport::add(AuditCheck check) {
    overall_pass = overall_pass && check.pass;
    checks.push_back(std::move(check));
}

void AuditReport::merge(const AuditReport& other) {
    for (const auto& c : other.checks) add(c);
    informational.insert(informational.end(), other.informational.begin(), other.informational.end());
    for (const auto& [k, v] : other.notes) notes[k] = v;
}

const AuditCheck* AuditReport::worst() const {
    const AuditCheck* w = nullptr;
    for (const auto& c : checks)
        if (!w || c.violation - c.allowed > w->violation - w->allowed) w = &c;
    return w;
}

namespace {

struct Worst {
    double value = 0.0;
    std::vector<double> where;

    void offer(double v, std::span<const double> y) {
        if (where.empty() || v > value) {
            value = v;
            where.assign(y.begin(), y.end());
        }
    }
};

}  // namespace

AuditReport audit_boundary(const ProcessDefinition& proc, std::size_t samples_per_face,
                           const RandomSource& rng, const ToleranceSet& tol) {
    if (samples_per_face < 1) throw Error(ErrorCode::InvalidParameter, "samples_per_face must be >= 1");
    tol.validate();
    const std::size_t n = proc.dimension();
    const std::size_t k = n - 1;
    const auto faces = boundary_faces(n);

    AuditReport report;
    report.notes["process"] = proc.name();
    report.notes["unit_sum_criterion"] = tol.unit_sum == UnitSumCriterion::Normal ? "normal" : "entrywise";

    std::vector<double> drift(k), diffusion(k * k);
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const auto& face = faces[f];
        auto stream = rng.sequential(static_cast<std::uint32_t>(f));
        Worst drift_worst, diffusion_worst, symmetry_worst;
        for (std::size_t s = 0; s < samples_per_face; ++s) {
            const ReducedState point = sample_face(face, n, stream);
            const auto y = point.values();
            try {
                proc.drift_into(y, 0.0, drift);
                proc.diffusion_into(y, 0.0, diffusion);
            } catch (const Error& e) {
                throw Error(ErrorCode::EvaluationFailure,
                            "at face " + to_string(face) + ": " + std::string(e.what()));
            }
            auto B = [&](std::size_t a, std::size_t b) { return diffusion[a * k + b]; };

            double asym = 0.0;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t b = 0; b < a; ++b) asym = std::max(asym, std::abs(B(a, b) - B(b, a)));
            symmetry_worst.offer(asym, y);

            double drift_residual = 0.0, diffusion_residual = 0.0;
            if (face.kind == BoundaryFace::Kind::Zero) {
                const std::size_t a = face.index;
                drift_residual = std::max(0.0, -drift[a]);
                for (std::size_t b = 0; b < k; ++b)
                    diffusion_residual = std::max({diffusion_residual, std::abs(B(a, b)), std::abs(B(b, a))});
            } else if (tol.unit_sum == UnitSumCriterion::Normal) {
                double normal_drift = 0.0;
                for (std::size_t a = 0; a < k; ++a) {
                    normal_drift += drift[a];
                    double row = 0.0;
                    for (std::size_t b = 0; b < k; ++b) row += B(a, b);
                    diffusion_residual = std::max(diffusion_residual, std::abs(row));
                }
                drift_residual = std::max(0.0, normal_drift);
            } else {
                for (std::size_t a = 0; a < k; ++a) {
                    drift_residual = std::max(drift_residual, drift[a]);
                    for (std::size_t b = 0; b < k; ++b)
                        diffusion_residual = std::max(diffusion_residual, std::abs(B(a, b)));
                }
            }
            drift_worst.offer(drift_residual, y);
            diffusion_worst.offer(diffusion_residual, y);
        }

        const std::string prefix = face.kind == BoundaryFace::Kind::Zero ? "zero_face" : "unit_sum_face";
        const std::string label = to_string(face);
        report.add({prefix + ".drift", label, drift_worst.value, tol.drift_sign_tol, drift_worst.where,
                    std::nullopt, drift_worst.value <= tol.drift_sign_tol});
        report.add({prefix + ".diffusion", label, diffusion_worst.value, tol.diffusion_zero_tol,
                    diffusion_worst.where, std::nullopt, diffusion_worst.value <= tol.diffusion_zero_tol});
        report.add({"diffusion.symmetry", label, symmetry_worst.value, 1e-14, symmetry_worst.where,
                    std::nullopt, symmetry_worst.value <= 1e-14});
    }
    return report;
}

namespace {

/// Worst excursion of values[i] outside [lo, hi]; returns (amount, index).
std::pair<double, std::size_t> excursion(const std::vector<double>& values, double lo, double hi) {
    double worst = 0.0;
    std::size_t at = 0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i];
        const double out = std::isfinite(v) ? std::max({0.0, lo - v, v - hi}) : INFINITY;
        if (out > worst) {
            worst = out;
            at = i;
        }
    }
    return {worst, at};
}

}  // namespace

AuditReport audit_moment_bounds(const MomentSet& m, std::size_t ensemble_size, const ToleranceSet& tol) {
    tol.validate();
    const std::size_t n = m.dimension;
    AuditReport report;
    report.notes["ensemble_size"] = std::to_string(ensemble_size);

    auto bound_check = [&](const std::string& id, const std::string& subject, const std::vector<double>& v,
                           double lo, double hi) {
        const auto [amount, at] = excursion(v, lo, hi);
        const int idx = static_cast<int>(at) + 1;
        report.add({id, subject, amount, kIdentityTolerance, std::nullopt, std::pair{idx, idx},
                    amount <= kIdentityTolerance});
    };

    bound_check("moments.mean_bounds", "<Y>", m.mean, 0.0, 1.0);
    double total = 0.0;
    for (double v : m.mean) total += v;
    report.add({"moments.mean_sum", "sum <Y>", std::abs(total - 1.0), kIdentityTolerance, std::nullopt,
                std::nullopt, std::abs(total - 1.0) <= kIdentityTolerance});

    std::vector<double> variances(n);
    for (std::size_t a = 0; a < n; ++a) variances[a] = m.covariance(a, a);
    bound_check("moments.variance_bounds", "<y^2>", variances, 0.0, 1.0);

    double cov_worst = 0.0;
    std::pair<int, int> cov_at{1, 2};
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const double v = m.covariance(a, b);
            const double out = std::isfinite(v) ? std::max({0.0, -1.0 - v, v - 1.0}) : INFINITY;
            if (out > cov_worst) {
                cov_worst = out;
                cov_at = {static_cast<int>(a) + 1, static_cast<int>(b) + 1};
            }
        }
    report.add({"moments.covariance_bounds", "<y_a y_b>", cov_worst, kIdentityTolerance, std::nullopt, cov_at,
                cov_worst <= kIdentityTolerance});

    bound_check("moments.third_bounds", "<y^3>", m.third, -1.0, 1.0);
    bound_check("moments.fourth_bounds", "<y^4>", m.fourth, 0.0, 1.0);
    return report;
}

namespace {

double standard_error(const std::vector<double>& per_sample) {
    const double count = static_cast<double>(per_sample.size());
    const double mean = pairwise_sum(per_sample) / count;
    std::vector<double> sq(per_sample.size());
    for (std::size_t i = 0; i < per_sample.size(); ++i) sq[i] = (per_sample[i] - mean) * (per_sample[i] - mean);
    return std::sqrt(pairwise_sum(sq) / (count - 1.0) / count);
}

}  // namespace

AuditReport audit_covariance_structure(const MomentSet& m, std::span<const double> samples,
                                       const ToleranceSet& tol) {
    tol.validate();
    const std::size_t n = m.dimension;
    if (n < 2 || samples.size() % n != 0 || samples.size() / n < 2)
        throw Error(ErrorCode::EnsembleTooSmall, "covariance audit needs at least two N-component samples");
    const std::size_t count = samples.size() / n;

    AuditReport report;
    std::vector<double> per_sample(count);
    auto y = [&](std::size_t i, std::size_t a) { return samples[i * n + a] - m.mean[a]; };

    for (std::size_t a = 0; a < n; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < n; ++b) row += m.covariance(a, b);
        for (std::size_t i = 0; i < count; ++i) {
            double s = 0.0;
            for (std::size_t b = 0; b < n; ++b) s += y(i, b);
            per_sample[i] = y(i, a) * s;
        }
        const double allowed = tol.moment_stat_tol * standard_error(per_sample) + kIdentityTolerance;
        const int idx = static_cast<int>(a) + 1;
        report.add({"covariance.row_sum", "row " + std::to_string(idx), std::abs(row), allowed, std::nullopt,
                    std::pair{idx, idx}, std::abs(row) <= allowed});
    }

    double weak = -m.covariance(n - 1, n - 1);
    for (std::size_t a = 0; a + 1 < n; ++a)
        for (std::size_t b = 0; b + 1 < n; ++b) weak += m.covariance(a, b);
    for (std::size_t i = 0; i < count; ++i) {
        double s = 0.0;
        for (std::size_t a = 0; a + 1 < n; ++a) s += y(i, a);
        per_sample[i] = s * s - y(i, n - 1) * y(i, n - 1);
    }
    const double weak_allowed = tol.moment_stat_tol * standard_error(per_sample) + kIdentityTolerance;
    report.add({"covariance.weak_zero_sum", "sum_{a,b<N} <y_a y_b> - <y_N^2>", std::abs(weak), weak_allowed,
                std::nullopt, std::nullopt, std::abs(weak) <= weak_allowed});

    double asym = 0.0;
    std::pair<int, int> asym_at{1, 1};
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < a; ++b) {
            const double d = std::abs(m.covariance(a, b) - m.covariance(b, a));
            if (d > asym) {
                asym = d;
                asym_at = {static_cast<int>(a) + 1, static_cast<int>(b) + 1};
            }
        }
    report.add({"covariance.symmetry", "<y_a y_b> - <y_b y_a>", asym, 0.0, std::nullopt, asym_at, asym == 0.0});
    return report;
}

AuditReport audit_covariance_structure(const MomentSet& m, const Ensemble& ensemble, const ToleranceSet& tol) {
    const std::size_t n = ensemble.dimension();
    std::vector<double> samples(ensemble.size() * n);
    for (std::size_t i = 0; i < ensemble.size(); ++i)
        for (std::size_t a = 0; a < n; ++a) samples[i * n + a] = ensemble.fraction(i, a);
    return audit_covariance_structure(m, samples, tol);
}

}  // namespace simplex
