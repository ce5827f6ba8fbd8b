#pragma once

// Hand-rolled generators for property tests. Every generator draws from a
// caller-owned std::mt19937_64 so failures reproduce from the printed seed.

#include <cmath>
#include <random>
#include <vector>

#include "simplex/core.hpp"
#include "simplex/processes.hpp"

namespace gen {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline std::size_t dimension(Rng& rng, std::size_t lo = 2, std::size_t hi = 6) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

/// Full composition drawn from a flat Dirichlet, optionally with some
/// coordinates forced to exact zeros.
inline std::vector<double> composition(Rng& rng, std::size_t n, double zero_prob = 0.0) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> y(n);
    double sum = 0.0;
    for (auto& v : y) {
        v = uniform(rng, 0.0, 1.0) < zero_prob ? 0.0 : e(rng);
        sum += v;
    }
    if (sum == 0.0) {
        y[0] = 1.0;
        return y;
    }
    for (auto& v : y) v /= sum;
    return y;
}

/// Interior reduced state (all N fractions strictly positive).
inline std::vector<double> interior_reduced(Rng& rng, std::size_t n) {
    while (true) {
        auto y = composition(rng, n);
        y.pop_back();
        double sum = 0.0;
        bool ok = true;
        for (double v : y) {
            ok = ok && v > 1e-6;
            sum += v;
        }
        if (ok && 1.0 - sum > 1e-6) return y;
    }
}

inline simplex::BetaParams beta_params(Rng& rng) {
    return {uniform(rng, 0.1, 5.0), uniform(rng, 0.05, 0.95), uniform(rng, 0.1, 3.0)};
}

inline simplex::WrightFisherParams wf_params(Rng& rng, std::size_t n) {
    simplex::WrightFisherParams p;
    for (std::size_t a = 0; a < n; ++a) p.omega.push_back(uniform(rng, 0.1, 3.0));
    return p;
}

inline simplex::DirichletParams dirichlet_params(Rng& rng, std::size_t k, bool invariant) {
    simplex::DirichletParams p;
    const double ratio = uniform(rng, 0.5, 4.0);
    for (std::size_t a = 0; a < k; ++a) {
        p.b.push_back(uniform(rng, 0.5, 6.0));
        p.S.push_back(uniform(rng, 0.05, 0.95));
        p.kappa.push_back(invariant ? (1.0 - p.S[a]) * p.b[a] / ratio : uniform(rng, 0.1, 3.0));
    }
    p.dirichlet_invariant = invariant;
    return p;
}

inline simplex::GenDirichletParams gen_dirichlet_params(Rng& rng, std::size_t k, bool reduction) {
    simplex::GenDirichletParams p;
    for (std::size_t a = 0; a < k; ++a) {
        p.b.push_back(uniform(rng, 0.5, 6.0));
        p.S.push_back(uniform(rng, 0.05, 0.95));
        p.kappa.push_back(uniform(rng, 0.1, 3.0));
    }
    if (reduction) {
        p.c = simplex::GenDirichletParams::reduction_coupling(p.kappa);
    } else {
        p.c = simplex::Matrix(k, k - 1);
        for (std::size_t a = 0; a < k; ++a)
            for (std::size_t j = a; j + 1 < k; ++j) p.c(a, j) = uniform(rng, 0.0, 2.0);
    }
    return p;
}

}  // namespace gen
