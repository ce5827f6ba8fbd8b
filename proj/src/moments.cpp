#include "simplex/moments.hpp"

#include <cmath>

#include "simplex/processes.hpp"

namespace simplex {

double pairwise_sum(std::span<const double> values) noexcept {
    constexpr std::size_t kLeaf = 16;
    if (values.size() <= kLeaf) {
        double s = 0.0;
        for (double v : values) s += v;
        return s;
    }
    const std::size_t half = values.size() / 2;
    return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void derive_shape_statistics(MomentSet& m) {
    m.skewness.assign(m.dimension, std::nullopt);
    m.kurtosis.assign(m.dimension, std::nullopt);
    for (std::size_t a = 0; a < m.dimension; ++a) {
        const double var = m.covariance(a, a);
        if (var < kDegenerateVariance) continue;
        m.skewness[a] = m.third[a] / std::pow(var, 1.5);
        m.kurtosis[a] = m.fourth[a] / (var * var);
    }
}

namespace {

void require_size(std::size_t begin, std::size_t end, std::size_t size) {
    if (end > size || begin > end) throw Error(ErrorCode::InvalidParameter, "particle range out of bounds");
    if (end - begin < 2)
        throw Error(ErrorCode::EnsembleTooSmall, "moment estimation needs at least two particles");
}

}  // namespace

MomentSet estimate_moments(std::span<const double> samples, std::size_t n) {
    if (n < 2 || samples.size() % n != 0)
        throw Error(ErrorCode::InvalidParameter, "samples must be M x N with N >= 2");
    const std::size_t count = samples.size() / n;
    if (count < 2) throw Error(ErrorCode::EnsembleTooSmall, "moment estimation needs at least two particles");
    const double inv = 1.0 / static_cast<double>(count);

    MomentSet m;
    m.dimension = n;
    m.ensemble_size = count;
    m.mean.assign(n, 0.0);
    m.covariance = Matrix(n, n);
    m.third.assign(n, 0.0);
    m.fourth.assign(n, 0.0);

    std::vector<double> column(count);
    std::vector<double> centred(count * n);
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t i = 0; i < count; ++i) column[i] = samples[i * n + a];
        m.mean[a] = pairwise_sum(column) * inv;
        for (std::size_t i = 0; i < count; ++i) centred[i * n + a] = column[i] - m.mean[a];
    }
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a; b < n; ++b) {
            for (std::size_t i = 0; i < count; ++i) column[i] = centred[i * n + a] * centred[i * n + b];
            m.covariance(a, b) = m.covariance(b, a) = pairwise_sum(column) * inv;
        }
        for (std::size_t i = 0; i < count; ++i) {
            const double y = centred[i * n + a];
            column[i] = y * y * y;
        }
        m.third[a] = pairwise_sum(column) * inv;
        for (std::size_t i = 0; i < count; ++i) {
            const double y2 = centred[i * n + a] * centred[i * n + a];
            column[i] = y2 * y2;
        }
        m.fourth[a] = pairwise_sum(column) * inv;
    }
    derive_shape_statistics(m);
    return m;
}

MomentSet estimate_moments(const Ensemble& ensemble, std::size_t begin, std::size_t end) {
    require_size(begin, end, ensemble.size());
    const std::size_t n = ensemble.dimension();
    std::vector<double> samples((end - begin) * n);
    for (std::size_t i = begin; i < end; ++i)
        for (std::size_t a = 0; a < n; ++a) samples[(i - begin) * n + a] = ensemble.fraction(i, a);
    return estimate_moments(samples, n);
}

MomentRates estimate_rates(const Ensemble& ensemble, const ProcessDefinition& proc, double t,
                           std::size_t begin, std::size_t end) {
    require_size(begin, end, ensemble.size());
    if (proc.dimension() != ensemble.dimension())
        throw Error(ErrorCode::InvalidParameter, "process and ensemble dimensions differ");
    const std::size_t k = ensemble.reduced_dimension();
    const std::size_t count = end - begin;
    const double inv = 1.0 / static_cast<double>(count);

    std::vector<double> drift(count * k), diffusion(count * k * k);
    for (std::size_t i = 0; i < count; ++i) {
        const auto y = ensemble.particle(begin + i);
        proc.drift_into(y, t, {drift.data() + i * k, k});
        proc.diffusion_into(y, t, {diffusion.data() + i * k * k, k * k});
    }

    std::vector<double> column(count);
    auto average = [&](auto&& term) {
        for (std::size_t i = 0; i < count; ++i) column[i] = term(i);
        return pairwise_sum(column) * inv;
    };

    std::vector<double> mean_y(k), centred(count * k);
    MomentRates r;
    r.reduced_dimension = k;
    r.mean_rate.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        mean_y[a] = average([&](std::size_t i) { return ensemble.particle(begin + i)[a]; });
        r.mean_rate[a] = average([&](std::size_t i) { return drift[i * k + a]; });
        for (std::size_t i = 0; i < count; ++i) centred[i * k + a] = ensemble.particle(begin + i)[a] - mean_y[a];
    }

    auto y = [&](std::size_t i, std::size_t a) { return centred[i * k + a]; };
    auto A = [&](std::size_t i, std::size_t a) { return drift[i * k + a]; };
    auto B = [&](std::size_t i, std::size_t a, std::size_t b) { return diffusion[i * k * k + a * k + b]; };
    auto trace = [&](std::size_t i) {
        double s = 0.0;
        for (std::size_t b = 0; b < k; ++b) s += B(i, b, b);
        return s;
    };

    r.cov_rate = Matrix(k, k);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t b = a; b < k; ++b)
            r.cov_rate(a, b) = r.cov_rate(b, a) =
                average([&](std::size_t i) { return y(i, a) * A(i, b) + y(i, b) * A(i, a) + B(i, a, b); });

    r.third_rate.assign(k, 0.0);
    r.third_rate_variant.assign(k, 0.0);
    r.fourth_rate.assign(k, 0.0);
    r.fourth_rate_variant.assign(k, 0.0);
    for (std::size_t a = 0; a < k; ++a) {
        const double mean_drift = r.mean_rate[a];
        r.third_rate[a] = average([&](std::size_t i) {
            const double v = y(i, a);
            return 3.0 * v * v * (A(i, a) - mean_drift) + 3.0 * v * B(i, a, a);
        });
        r.third_rate_variant[a] = average([&](std::size_t i) {
            const double v = y(i, a);
            return 3.0 * v * v * A(i, a) + 3.0 * v * trace(i);
        });
        r.fourth_rate[a] = average([&](std::size_t i) {
            const double v = y(i, a);
            return 4.0 * v * v * v * (A(i, a) - mean_drift) + 6.0 * v * v * B(i, a, a);
        });
        r.fourth_rate_variant[a] = average([&](std::size_t i) {
            const double v = y(i, a);
            return 4.0 * v * v * v * A(i, a) + 6.0 * v * v * trace(i);
        });
    }
    return r;
}

MomentSet dirichlet_moments(const std::vector<double>& alpha) {
    if (alpha.size() < 2) throw Error(ErrorCode::InvalidParameter, "Dirichlet law needs >= 2 shape parameters");
    double a0 = 0.0;
    for (double a : alpha) {
        if (!(a > 0.0)) throw Error(ErrorCode::InvalidParameter, "Dirichlet shapes must be > 0");
        a0 += a;
    }
    const std::size_t n = alpha.size();
    MomentSet m;
    m.dimension = n;
    m.ensemble_size = 0;
    m.mean.resize(n);
    m.covariance = Matrix(n, n);
    m.third.resize(n);
    m.fourth.resize(n);
    const double denom = a0 * a0 * (a0 + 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        m.mean[i] = alpha[i] / a0;
        for (std::size_t j = 0; j < n; ++j)
            m.covariance(i, j) = ((i == j ? alpha[i] * a0 : 0.0) - alpha[i] * alpha[j]) / denom;
        // Marginal of component i is Beta(p, q).
        const double p = alpha[i], q = a0 - alpha[i], s = a0;
        m.third[i] = 2.0 * p * q * (q - p) / (s * s * s * (s + 1.0) * (s + 2.0));
        m.fourth[i] = 3.0 * p * q * (p * q * (s - 6.0) + 2.0 * s * s) /
                      (s * s * s * s * (s + 1.0) * (s + 2.0) * (s + 3.0));
    }
    derive_shape_statistics(m);
    return m;
}

MomentSet analytic_stationary(const ProcessDefinition& proc) {
    switch (proc.kind()) {
        case ProcessKind::Beta: {
            const double b = proc.parameter("b")[0], S = proc.parameter("S")[0], kappa = proc.parameter("kappa")[0];
            if (S <= 0.0 || S >= 1.0)
                throw Error(ErrorCode::Unsupported, "absorbing beta process has no interior invariant law");
            return dirichlet_moments({b * S / kappa, b * (1.0 - S) / kappa});
        }
        case ProcessKind::WrightFisher:
            return dirichlet_moments(proc.parameter("omega"));
        case ProcessKind::Dirichlet: {
            DirichletParams p{proc.parameter("b"), proc.parameter("S"), proc.parameter("kappa"), false};
            if (p.invariant_ratio_spread() > kDirichletRatioTolerance)
                throw Error(ErrorCode::Unsupported,
                            "Dirichlet process without a common (1-S) b / kappa has no Dirichlet invariant law");
            std::vector<double> alpha;
            for (std::size_t a = 0; a < p.b.size(); ++a) alpha.push_back(p.b[a] * p.S[a] / p.kappa[a]);
            alpha.push_back((1.0 - p.S[0]) * p.b[0] / p.kappa[0]);
            return dirichlet_moments(alpha);
        }
        case ProcessKind::GeneralizedDirichlet:
            throw Error(ErrorCode::Unsupported,
                        "generalized Dirichlet stationary moments are validated against simulation only");
        default:
            throw Error(ErrorCode::Unsupported, "no analytic invariant law for process '" + proc.name() + "'");
    }
}

}  // namespace simplex
