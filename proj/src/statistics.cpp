#include "simplex/statistics.hpp"

#include <algorithm>
#include <cmath>

namespace simplex {

namespace {

enum class Family { Mean, Covariance, Third, Fourth, ThirdPrinted, FourthPrinted };

struct Quantity {
    Family family;
    std::size_t a, b;  // 0-based reduced indices
};

std::vector<Quantity> quantities(std::size_t k) {
    std::vector<Quantity> q;
    for (std::size_t a = 0; a < k; ++a) q.push_back({Family::Mean, a, a});
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b) q.push_back({Family::Covariance, a, b});
    for (auto f : {Family::Third, Family::Fourth, Family::ThirdPrinted, Family::FourthPrinted})
        for (std::size_t a = 0; a < k; ++a) q.push_back({f, a, a});
    return q;
}

double moment_value(const MomentSet& m, const Quantity& q) {
    switch (q.family) {
        case Family::Mean: return m.mean[q.a];
        case Family::Covariance: return m.covariance(q.a, q.b);
        case Family::Third:
        case Family::ThirdPrinted: return m.third[q.a];
        default: return m.fourth[q.a];
    }
}

double rate_value(const MomentRates& r, const Quantity& q) {
    switch (q.family) {
        case Family::Mean: return r.mean_rate[q.a];
        case Family::Covariance: return r.cov_rate(q.a, q.b);
        case Family::Third: return r.third_rate[q.a];
        case Family::Fourth: return r.fourth_rate[q.a];
        case Family::ThirdPrinted: return r.third_rate_variant[q.a];
        default: return r.fourth_rate_variant[q.a];
    }
}

std::string label(const Quantity& q) {
    const auto i = std::to_string(q.a + 1), j = std::to_string(q.b + 1);
    switch (q.family) {
        case Family::Mean: return "<Y" + i + ">";
        case Family::Covariance: return "<y" + i + " y" + j + ">";
        case Family::Third: return "<y" + i + "^3> ito";
        case Family::Fourth: return "<y" + i + "^4> ito";
        case Family::ThirdPrinted: return "<y" + i + "^3> printed";
        default: return "<y" + i + "^4> printed";
    }
}

std::string constraint(Family f) {
    switch (f) {
        case Family::Mean: return "rates.mean";
        case Family::Covariance: return "rates.covariance";
        case Family::Third: return "rates.third";
        case Family::Fourth: return "rates.fourth";
        case Family::ThirdPrinted: return "rates.third_printed";
        default: return "rates.fourth_printed";
    }
}

std::size_t usable_batches(std::size_t requested, std::size_t size) {
    const std::size_t b = std::min(requested, size / 2);
    if (b < 2) throw Error(ErrorCode::EnsembleTooSmall, "batch-means standard errors need at least 4 particles");
    return b;
}

std::pair<std::size_t, std::size_t> batch_range(std::size_t batch, std::size_t batches, std::size_t size) {
    return {batch * size / batches, (batch + 1) * size / batches};
}

double batch_standard_error(const std::vector<double>& values) {
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / (n - 1.0) / n);
}

std::vector<const Snapshot*> with_ensembles(const Trajectory& traj) {
    std::vector<const Snapshot*> out;
    for (const auto& s : traj.snapshots)
        if (s.ensemble && s.ensemble->size() >= 2) out.push_back(&s);
    return out;
}

}  // namespace

AuditReport cross_validate_rates(const Trajectory& traj, const ProcessDefinition& proc, double tol_multiplier,
                                 std::size_t batches) {
    if (!(tol_multiplier > 0.0)) throw Error(ErrorCode::InvalidParameter, "tol_multiplier must be > 0");
    const auto snaps = with_ensembles(traj);
    if (snaps.size() < 3)
        throw Error(ErrorCode::InsufficientSnapshots,
                    "rate cross-validation needs >= 3 recorded ensembles, got " + std::to_string(snaps.size()));
    const std::size_t size = snaps.front()->ensemble->size();
    for (const auto* s : snaps)
        if (s->ensemble->size() != size) throw Error(ErrorCode::InvalidParameter, "ensemble size changes over time");
    const std::size_t k = proc.dimension() - 1;
    const std::size_t nb = usable_batches(batches, size);
    const auto qs = quantities(k);
    const std::size_t nq = qs.size(), ns = snaps.size();

    // values[r][s][q], rates[r][s][q] for r = 0 (whole ensemble) and r = 1..nb (batches)
    std::vector<std::vector<std::vector<double>>> values(nb + 1), rates(nb + 1);
    for (std::size_t r = 0; r <= nb; ++r) {
        const auto [begin, end] = r == 0 ? std::pair<std::size_t, std::size_t>{0, size} : batch_range(r - 1, nb, size);
        values[r].resize(ns);
        rates[r].resize(ns);
        for (std::size_t s = 0; s < ns; ++s) {
            const auto m = estimate_moments(*snaps[s]->ensemble, begin, end);
            const auto rt = estimate_rates(*snaps[s]->ensemble, proc, snaps[s]->t, begin, end);
            for (const auto& q : qs) {
                values[r][s].push_back(moment_value(m, q));
                rates[r][s].push_back(rate_value(rt, q));
            }
        }
    }

    auto statistic = [&](std::size_t r, std::size_t qi) {
        double sum = 0.0;
        for (std::size_t s = 1; s + 1 < ns; ++s) {
            const double fd = (values[r][s + 1][qi] - values[r][s - 1][qi]) / (snaps[s + 1]->t - snaps[s - 1]->t);
            sum += fd - rates[r][s][qi];
        }
        return sum / static_cast<double>(ns - 2);
    };

    AuditReport report;
    report.notes["snapshots"] = std::to_string(ns);
    report.notes["batches"] = std::to_string(nb);
    bool third_ito = true, third_printed = true, fourth_ito = true, fourth_printed = true;

    for (std::size_t qi = 0; qi < nq; ++qi) {
        const auto& q = qs[qi];
        const double R = statistic(0, qi);
        std::vector<double> per_batch(nb);
        for (std::size_t r = 1; r <= nb; ++r) per_batch[r - 1] = statistic(r, qi);
        const double se = batch_standard_error(per_batch);

        double bias = 0.0;
        for (std::size_t s = 1; s + 1 < ns; ++s) {
            const auto& rs = rates[0];
            bias += (rs[s - 1][qi] + 4.0 * rs[s][qi] + rs[s + 1][qi]) / 6.0 - rs[s][qi];
        }
        bias = std::abs(bias / static_cast<double>(ns - 2));

        const double allowed = tol_multiplier * (se + bias) + kIdentityTolerance;
        AuditCheck check{constraint(q.family), label(q), std::abs(R), allowed, std::nullopt,
                         std::pair{static_cast<int>(q.a) + 1, static_cast<int>(q.b) + 1}, std::abs(R) <= allowed};
        switch (q.family) {
            case Family::Third: third_ito = third_ito && check.pass; break;
            case Family::Fourth: fourth_ito = fourth_ito && check.pass; break;
            case Family::ThirdPrinted: third_printed = third_printed && check.pass; break;
            case Family::FourthPrinted: fourth_printed = fourth_printed && check.pass; break;
            default: break;
        }
        if (q.family == Family::ThirdPrinted || q.family == Family::FourthPrinted)
            report.informational.push_back(std::move(check));
        else
            report.add(std::move(check));
    }

    auto verdict = [](bool ito, bool printed) {
        return ito && printed ? "both" : ito ? "ito" : printed ? "printed" : "neither";
    };
    report.notes["third_form"] = verdict(third_ito, third_printed);
    report.notes["fourth_form"] = verdict(fourth_ito, fourth_printed);
    return report;
}

StationaryEstimate stationary_average(const Trajectory& traj, double t_from, std::size_t batches) {
    std::vector<const Snapshot*> snaps;
    for (const auto* s : with_ensembles(traj))
        if (s->t >= t_from - 1e-12) snaps.push_back(s);
    if (snaps.empty())
        throw Error(ErrorCode::InsufficientSnapshots, "no recorded ensembles at or after t_from");
    const std::size_t size = snaps.front()->ensemble->size();
    const std::size_t n = snaps.front()->ensemble->dimension();
    const std::size_t nb = usable_batches(batches, size);
    const double inv = 1.0 / static_cast<double>(snaps.size());

    auto average = [&](std::size_t begin, std::size_t end) {
        MomentSet acc;
        acc.dimension = n;
        acc.mean.assign(n, 0.0);
        acc.covariance = Matrix(n, n);
        acc.third.assign(n, 0.0);
        acc.fourth.assign(n, 0.0);
        for (const auto* s : snaps) {
            const auto m = estimate_moments(*s->ensemble, begin, end);
            for (std::size_t a = 0; a < n; ++a) {
                acc.mean[a] += m.mean[a] * inv;
                acc.third[a] += m.third[a] * inv;
                acc.fourth[a] += m.fourth[a] * inv;
                for (std::size_t b = 0; b < n; ++b) acc.covariance(a, b) += m.covariance(a, b) * inv;
            }
        }
        return acc;
    };

    const MomentSet whole = average(0, size);
    std::vector<MomentSet> parts;
    for (std::size_t b = 0; b < nb; ++b) {
        const auto [begin, end] = batch_range(b, nb, size);
        parts.push_back(average(begin, end));
    }
    auto se_of = [&](auto&& pick) {
        std::vector<double> v;
        for (const auto& p : parts) v.push_back(pick(p));
        return batch_standard_error(v);
    };

    StationaryEstimate est;
    est.dimension = n;
    est.snapshots = snaps.size();
    est.t_from = t_from;
    est.mean = whole.mean;
    est.covariance = whole.covariance;
    est.third = whole.third;
    est.fourth = whole.fourth;
    est.covariance_se = Matrix(n, n);
    for (std::size_t a = 0; a < n; ++a) {
        est.mean_se.push_back(se_of([&](const MomentSet& p) { return p.mean[a]; }));
        est.third_se.push_back(se_of([&](const MomentSet& p) { return p.third[a]; }));
        est.fourth_se.push_back(se_of([&](const MomentSet& p) { return p.fourth[a]; }));
        for (std::size_t b = 0; b < n; ++b)
            est.covariance_se(a, b) = se_of([&](const MomentSet& p) { return p.covariance(a, b); });
    }
    return est;
}

namespace {

AuditCheck residual_check(const std::string& constraint, const std::string& subject, double a, double b, double se,
                          double tol, std::pair<int, int> index) {
    const double allowed = tol * se + kIdentityTolerance;
    const double r = std::abs(a - b);
    return {constraint, subject, r, allowed, std::nullopt, index, r <= allowed};
}

template <class Other, class Se>
AuditReport compare_impl(const StationaryEstimate& est, const Other& other, double tol, Se&& combined) {
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidParameter, "tol_multiplier must be > 0");
    const std::size_t n = est.dimension;
    if (other.dimension != n) throw Error(ErrorCode::InvalidParameter, "moment dimensions differ");
    AuditReport report;
    for (std::size_t a = 0; a < n; ++a) {
        const int i = static_cast<int>(a) + 1;
        report.add(residual_check("stationary.mean", "<Y" + std::to_string(i) + ">", est.mean[a], other.mean[a],
                                  combined(est.mean_se[a], [&](const auto& o) { return o.mean_se[a]; }), tol,
                                  {i, i}));
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a; b < n; ++b) {
            const int i = static_cast<int>(a) + 1, j = static_cast<int>(b) + 1;
            report.add(residual_check(
                "stationary.covariance", "<y" + std::to_string(i) + " y" + std::to_string(j) + ">",
                est.covariance(a, b), other.covariance(a, b),
                combined(est.covariance_se(a, b), [&](const auto& o) { return o.covariance_se(a, b); }), tol, {i, j}));
        }
    for (std::size_t a = 0; a < n; ++a) {
        const int i = static_cast<int>(a) + 1;
        report.informational.push_back(residual_check(
            "stationary.third", "<y" + std::to_string(i) + "^3>", est.third[a], other.third[a],
            combined(est.third_se[a], [&](const auto& o) { return o.third_se[a]; }), tol, {i, i}));
        report.informational.push_back(residual_check(
            "stationary.fourth", "<y" + std::to_string(i) + "^4>", est.fourth[a], other.fourth[a],
            combined(est.fourth_se[a], [&](const auto& o) { return o.fourth_se[a]; }), tol, {i, i}));
    }
    report.notes["snapshots"] = std::to_string(est.snapshots);
    return report;
}

}  // namespace

AuditReport compare_stationary(const StationaryEstimate& est, const MomentSet& oracle, double tol_multiplier) {
    return compare_impl(est, oracle, tol_multiplier, [](double se, auto&&) { return se; });
}

AuditReport compare_stationary(const StationaryEstimate& a, const StationaryEstimate& b, double tol_multiplier) {
    return compare_impl(a, b, tol_multiplier, [&](double se, auto&& pick) {
        const double other = pick(b);
        return std::sqrt(se * se + other * other);
    });
}

}  // namespace simplex
