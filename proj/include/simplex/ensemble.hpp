#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "simplex/core.hpp"

namespace simplex {

/// M particles in reduced coordinates, stored contiguously particle-major.
class Ensemble {
public:
    Ensemble(std::size_t dimension, std::size_t size);
    static Ensemble from_states(const std::vector<SimplexState>& states);
    static Ensemble replicate(const SimplexState& state, std::size_t size);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t reduced_dimension() const noexcept { return dimension_ - 1; }
    std::size_t size() const noexcept { return size_; }

    std::span<double> particle(std::size_t i) noexcept {
        return {values_.data() + i * (dimension_ - 1), dimension_ - 1};
    }
    std::span<const double> particle(std::size_t i) const noexcept {
        return {values_.data() + i * (dimension_ - 1), dimension_ - 1};
    }
    std::span<const double> values() const noexcept { return values_; }

    /// Full N-component fraction j of particle i (j = N-1 gives Y_N).
    double fraction(std::size_t i, std::size_t j) const noexcept;

    /// Particles [begin, end) as a new ensemble.
    Ensemble slice(std::size_t begin, std::size_t end) const;

    friend bool operator==(const Ensemble&, const Ensemble&) = default;

private:
    std::size_t dimension_;
    std::size_t size_;
    std::vector<double> values_;
};

}  // namespace simplex
