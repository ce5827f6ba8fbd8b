#include "simplex/processes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace simplex {
namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
    throw Error(ErrorCode::InvalidParameter, field + ": " + why);
}

void require_positive(double v, const std::string& field) {
    if (!(v > 0.0) || !std::isfinite(v)) invalid(field, "must be finite and > 0");
}

void require_unit_interval(double v, const std::string& field, bool open) {
    const bool ok = open ? (v > 0.0 && v < 1.0) : (v >= 0.0 && v <= 1.0);
    if (!ok) invalid(field, open ? "must lie in (0, 1)" : "must lie in [0, 1]");
}

void require_vector_params(const std::vector<double>& b, const std::vector<double>& S,
                           const std::vector<double>& kappa) {
    if (b.empty()) invalid("b", "needs at least one component");
    if (S.size() != b.size()) invalid("S", "length must match b");
    if (kappa.size() != b.size()) invalid("kappa", "length must match b");
    for (std::size_t a = 0; a < b.size(); ++a) {
        const std::string idx = "[" + std::to_string(a + 1) + "]";
        require_positive(b[a], "b" + idx);
        require_unit_interval(S[a], "S" + idx, true);
        require_positive(kappa[a], "kappa" + idx);
    }
}

std::vector<double> matrix_entries(const Matrix& m) { return {m.data().begin(), m.data().end()}; }

}  // namespace

void BetaParams::validate() const {
    require_positive(b, "b");
    require_unit_interval(S, "S", false);
    require_positive(kappa, "kappa");
}

double WrightFisherParams::omega_total() const noexcept {
    double total = 0.0;
    for (double w : omega) total += w;
    return total;
}

void WrightFisherParams::validate() const {
    if (omega.size() < 2) invalid("omega", "needs N >= 2 components");
    for (std::size_t a = 0; a < omega.size(); ++a) require_positive(omega[a], "omega[" + std::to_string(a + 1) + "]");
}

double DirichletParams::invariant_ratio_spread() const {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t a = 0; a < b.size(); ++a) {
        const double r = (1.0 - S[a]) * b[a] / kappa[a];
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    return (hi - lo) / std::max(std::abs(hi), std::abs(lo));
}

void DirichletParams::validate() const {
    require_vector_params(b, S, kappa);
    if (dirichlet_invariant && invariant_ratio_spread() > kDirichletRatioTolerance)
        throw Error(ErrorCode::DirichletConstraintViolated,
                    "(1-S_a) b_a / kappa_a differs across components");
}

void GenDirichletParams::validate() const {
    require_vector_params(b, S, kappa);
    const std::size_t k = b.size();
    if (c.rows() != k || c.cols() != k - 1)
        invalid("c", "must be K x (K-1) = " + std::to_string(k) + " x " + std::to_string(k - 1));
    for (std::size_t a = 0; a < c.rows(); ++a)
        for (std::size_t j = 0; j < c.cols(); ++j) {
            if (!std::isfinite(c(a, j))) invalid("c", "entries must be finite");
            if (a > j && c(a, j) != 0.0) invalid("c", "must be upper triangular (c_ab = 0 for a > b)");
        }
}

Matrix GenDirichletParams::reduction_coupling(const std::vector<double>& kappa) {
    const std::size_t k = kappa.size();
    Matrix c(k, k == 0 ? 0 : k - 1);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t j = a; j + 1 < k; ++j) c(a, j) = kappa[j];
    return c;
}

Matrix GenDirichletParams::row_reduction_coupling(const std::vector<double>& kappa) {
    const std::size_t k = kappa.size();
    Matrix c(k, k == 0 ? 0 : k - 1);
    for (std::size_t a = 0; a < k; ++a)
        for (std::size_t j = a; j + 1 < k; ++j) c(a, j) = kappa[a];
    return c;
}

ProcessDefinition beta_process(const BetaParams& p) {
    p.validate();
    const double half_b = 0.5 * p.b, S = p.S, kappa = p.kappa;
    ParameterRecord record{{"b", {p.b}}, {"S", {p.S}}, {"kappa", {p.kappa}},
                           {"absorbing_allowed", {p.absorbing_allowed() ? 1.0 : 0.0}}};
    return ProcessDefinition(
        2,
        [half_b, S](std::span<const double> y, double, std::span<double> out) {
            out[0] = half_b * (S - y[0]);
        },
        [kappa](std::span<const double> y, double, std::span<double> out) {
            out[0] = kappa * y[0] * (1.0 - y[0]);
        },
        "beta", std::move(record), ProcessKind::Beta);
}

ProcessDefinition wright_fisher_process(const WrightFisherParams& p) {
    p.validate();
    const std::size_t n = p.omega.size();
    const std::size_t k = n - 1;
    const double total = p.omega_total();
    std::vector<double> omega = p.omega;
    return ProcessDefinition(
        n,
        [omega, total, k](std::span<const double> y, double, std::span<double> out) {
            for (std::size_t a = 0; a < k; ++a) out[a] = 0.5 * (omega[a] - total * y[a]);
        },
        [k](std::span<const double> y, double, std::span<double> out) {
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t j = 0; j < k; ++j)
                    out[a * k + j] = a == j ? y[a] * (1.0 - y[a]) : -y[a] * y[j];
        },
        "wright_fisher", ParameterRecord{{"omega", p.omega}}, ProcessKind::WrightFisher);
}

ProcessDefinition dirichlet_process(const DirichletParams& p) {
    p.validate();
    const std::size_t k = p.reduced_dimension();
    auto b = p.b, S = p.S, kappa = p.kappa;
    ParameterRecord record{{"b", p.b}, {"S", p.S}, {"kappa", p.kappa},
                           {"dirichlet_invariant", {p.dirichlet_invariant ? 1.0 : 0.0}}};
    return ProcessDefinition(
        k + 1,
        [b, S, k](std::span<const double> y, double, std::span<double> out) {
            const double last = 1.0 - reduced_sum(y.first(k));
            for (std::size_t a = 0; a < k; ++a) out[a] = 0.5 * b[a] * (S[a] * last - (1.0 - S[a]) * y[a]);
        },
        [kappa, k](std::span<const double> y, double, std::span<double> out) {
            const double last = 1.0 - reduced_sum(y.first(k));
            std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k * k), 0.0);
            for (std::size_t a = 0; a < k; ++a) out[a * k + a] = kappa[a] * y[a] * last;
        },
        "dirichlet", std::move(record), ProcessKind::Dirichlet);
}

namespace {

/// Nested remainders Ycal_a = 1 - sum_{b<=a} Y_b, a = 0..K-1 (0-based), the
/// last one being Y_N. Prefix sums are monotone so these stay >= 0 for states
/// whose left-to-right sum is <= 1.
void nested_remainders(std::span<const double> y, std::span<double> ycal) {
    double prefix = 0.0;
    for (std::size_t a = 0; a < y.size(); ++a) {
        prefix += y[a];
        ycal[a] = std::max(0.0, 1.0 - prefix);
    }
}

[[noreturn]] void singular_nesting(std::size_t a) {
    throw Error(ErrorCode::SingularNesting,
                "nested remainder vanishes in a denominator of component " + std::to_string(a + 1));
}

/// 1/U_a = prod_{g=a}^{K-2} Ycal_g; zero signals a degenerate nesting.
double nesting_product(std::span<const double> ycal, std::size_t a) {
    double product = 1.0;
    for (std::size_t g = a; g + 1 < ycal.size(); ++g) product *= ycal[g];
    return product;
}

}  // namespace

ProcessDefinition gen_dirichlet_process(const GenDirichletParams& p) {
    p.validate();
    const std::size_t k = p.reduced_dimension();
    auto b = p.b, S = p.S, kappa = p.kappa;
    Matrix c = p.c;
    ParameterRecord record{{"b", p.b}, {"S", p.S}, {"kappa", p.kappa}, {"c", matrix_entries(p.c)}};

    auto drift = [b, S, c, k](std::span<const double> y, double, std::span<double> out) {
        double ycal[64];
        if (k > 64) throw Error(ErrorCode::Unsupported, "gen_dirichlet limited to K <= 64");
        nested_remainders(y.first(k), {ycal, k});
        const double last = ycal[k - 1];
        for (std::size_t a = 0; a < k; ++a) {
            const double denom = nesting_product({ycal, k}, a);
            if (denom == 0.0) singular_nesting(a);
            double coupling = 0.0;
            if (y[a] != 0.0 && last != 0.0)
                for (std::size_t j = a; j + 1 < k; ++j) coupling += c(a, j) / ycal[j];
            const double bracket = b[a] * (S[a] * last - (1.0 - S[a]) * y[a]) + y[a] * last * coupling;
            out[a] = 0.5 * bracket / denom;
        }
    };
    auto diffusion = [kappa, k](std::span<const double> y, double, std::span<double> out) {
        double ycal[64];
        if (k > 64) throw Error(ErrorCode::Unsupported, "gen_dirichlet limited to K <= 64");
        nested_remainders(y.first(k), {ycal, k});
        std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k * k), 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            if (y[a] == 0.0) continue;  // exact zero before any denominator
            const double denom = nesting_product({ycal, k}, a);
            if (denom == 0.0) singular_nesting(a);
            out[a * k + a] = kappa[a] * y[a] * ycal[k - 1] / denom;
        }
    };
    return ProcessDefinition(k + 1, std::move(drift), std::move(diffusion), "gen_dirichlet",
                             std::move(record), ProcessKind::GeneralizedDirichlet);
}

ProcessDefinition broken_process(BrokenStyle style, std::size_t dimension) {
    if (dimension < 2) invalid("dimension", "must be >= 2");
    const std::size_t k = dimension - 1;
    if (style == BrokenStyle::ConstantDiffusion) {
        return ProcessDefinition(
            dimension,
            [k](std::span<const double>, double, std::span<double> out) {
                std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), 0.0);
            },
            [k](std::span<const double>, double, std::span<double> out) {
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t j = 0; j < k; ++j) out[a * k + j] = a == j ? 0.1 : 0.0;
            },
            "broken_constant_diffusion", ParameterRecord{{"style", {0.0}}}, ProcessKind::Broken);
    }
    return ProcessDefinition(
        dimension,
        [k](std::span<const double>, double, std::span<double> out) {
            std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k), -1.0);
        },
        [k](std::span<const double>, double, std::span<double> out) {
            std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(k * k), 0.0);
        },
        "broken_outward_drift", ParameterRecord{{"style", {1.0}}}, ProcessKind::Broken);
}

}  // namespace simplex
