#include "simplex/ensemble.hpp"

namespace simplex {

Ensemble::Ensemble(std::size_t dimension, std::size_t size)
    : dimension_(dimension), size_(size), values_(size * (dimension >= 2 ? dimension - 1 : 0), 0.0) {
    if (dimension < 2) throw Error(ErrorCode::InvalidParameter, "ensemble dimension must be >= 2");
}

Ensemble Ensemble::from_states(const std::vector<SimplexState>& states) {
    if (states.empty()) throw Error(ErrorCode::InvalidParameter, "no states given");
    Ensemble e(states.front().dimension(), states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        if (states[i].dimension() != e.dimension_)
            throw Error(ErrorCode::InvalidParameter, "states have mixed dimensions");
        const auto r = states[i].reduced();
        std::copy(r.values().begin(), r.values().end(), e.particle(i).begin());
    }
    return e;
}

Ensemble Ensemble::replicate(const SimplexState& state, std::size_t size) {
    return from_states(std::vector<SimplexState>(size, state));
}

double Ensemble::fraction(std::size_t i, std::size_t j) const noexcept {
    const auto p = particle(i);
    if (j + 1 < dimension_) return p[j];
    return 1.0 - reduced_sum(p);
}

Ensemble Ensemble::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > size_) throw Error(ErrorCode::InvalidParameter, "slice out of range");
    Ensemble out(dimension_, end - begin);
    const std::size_t k = dimension_ - 1;
    std::copy(values_.begin() + static_cast<std::ptrdiff_t>(begin * k),
              values_.begin() + static_cast<std::ptrdiff_t>(end * k), out.values_.begin());
    return out;
}

}  // namespace simplex
