#include "simplex/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace simplex {

const char* to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::NegativeComponent: return "NegativeComponent";
        case ErrorCode::SumViolation: return "SumViolation";
        case ErrorCode::InvalidParameter: return "InvalidParameter";
        case ErrorCode::DirichletConstraintViolated: return "DirichletConstraintViolated";
        case ErrorCode::SingularNesting: return "SingularNesting";
        case ErrorCode::EvaluationFailure: return "EvaluationFailure";
        case ErrorCode::NotPositiveSemiDefinite: return "NotPositiveSemiDefinite";
        case ErrorCode::DegenerateState: return "DegenerateState";
        case ErrorCode::EnsembleTooSmall: return "EnsembleTooSmall";
        case ErrorCode::InsufficientSnapshots: return "InsufficientSnapshots";
        case ErrorCode::Unsupported: return "Unsupported";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw Error(ErrorCode::InvalidParameter, "ragged matrix literal");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

double Matrix::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::operator*(const Matrix& rhs) const {
    if (cols_ != rhs.rows_) throw Error(ErrorCode::InvalidParameter, "matrix shape mismatch");
    Matrix out(rows_, rhs.cols_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t k = 0; k < cols_; ++k) {
            const double a = (*this)(r, k);
            for (std::size_t c = 0; c < rhs.cols_; ++c) out(r, c) += a * rhs(k, c);
        }
    return out;
}

double max_abs_difference(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw Error(ErrorCode::InvalidParameter, "matrix shape mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

double reduced_sum(std::span<const double> reduced) noexcept {
    double s = 0.0;
    for (double v : reduced) s += v;
    return s;
}

bool is_realizable(std::span<const double> reduced) noexcept {
    for (double v : reduced)
        if (!(v >= 0.0)) return false;
    return reduced_sum(reduced) <= 1.0;
}

bool clip_and_renormalize(std::span<double> reduced) noexcept {
    bool modified = false;
    for (double& v : reduced) {
        if (!(v >= 0.0)) {
            v = 0.0;
            modified = true;
        }
    }
    double s = reduced_sum(reduced);
    if (s > 1.0) {
        modified = true;
        for (double& v : reduced) v /= s;
        // Division leaves the sum within a few ulps of one; shave the largest
        // coordinate until the left-to-right sum no longer exceeds one.
        while ((s = reduced_sum(reduced)) > 1.0) {
            auto largest = std::max_element(reduced.begin(), reduced.end());
            *largest = std::max(0.0, *largest - (s - 1.0));
            if (s - 1.0 < std::numeric_limits<double>::epsilon())
                *largest = std::nextafter(*largest, 0.0);
        }
    }
    return modified;
}

ReducedState ReducedState::make(std::vector<double> values) {
    if (values.empty()) throw Error(ErrorCode::InvalidParameter, "reduced state needs N-1 >= 1 coordinates");
    for (double v : values) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "non-finite coordinate");
        if (v < -kSumTolerance)
            throw Error(ErrorCode::NegativeComponent, "coordinate " + std::to_string(v) + " < 0");
    }
    if (reduced_sum(values) > 1.0 + kSumTolerance)
        throw Error(ErrorCode::SumViolation, "reduced coordinates sum above one");
    clip_and_renormalize(values);
    return ReducedState(std::move(values));
}

SimplexState SimplexState::make(std::vector<double> fractions) {
    if (fractions.size() < 2) throw Error(ErrorCode::InvalidParameter, "a simplex state needs N >= 2");
    double sum = 0.0;
    for (double v : fractions) {
        if (!std::isfinite(v)) throw Error(ErrorCode::InvalidParameter, "non-finite fraction");
        if (v < -kSumTolerance)
            throw Error(ErrorCode::NegativeComponent, "fraction " + std::to_string(v) + " < 0");
        sum += v;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
        throw Error(ErrorCode::SumViolation, "fractions sum to " + std::to_string(sum));
    for (double& v : fractions) v = v > 0.0 ? v / sum : 0.0;
    return SimplexState(std::move(fractions));
}

ReducedState SimplexState::reduced() const {
    return ReducedState::make({fractions_.begin(), fractions_.end() - 1});
}

SimplexState complete_reduced(std::span<const double> reduced) {
    const ReducedState r = ReducedState::make({reduced.begin(), reduced.end()});
    std::vector<double> full(r.values().begin(), r.values().end());
    full.push_back(1.0 - reduced_sum(r.values()));
    return SimplexState::make(std::move(full));
}

double boundary_distance(std::span<const double> reduced) noexcept {
    double d = (1.0 - reduced_sum(reduced)) / std::sqrt(static_cast<double>(reduced.size()));
    for (double v : reduced) d = std::min(d, v);
    return std::max(d, 0.0);
}

std::string to_string(const BoundaryFace& face) {
    if (face.kind == BoundaryFace::Kind::UnitSum) return "sum=1";
    return "Y" + std::to_string(face.index + 1) + "=0";
}

std::vector<BoundaryFace> boundary_faces(std::size_t dimension) {
    std::vector<BoundaryFace> faces;
    for (std::size_t a = 0; a + 1 < dimension; ++a) faces.push_back(BoundaryFace::zero(a));
    faces.push_back(BoundaryFace::unit_sum());
    return faces;
}

namespace {

// Flat Dirichlet weights via normalized exponentials.
std::vector<double> flat_dirichlet(std::size_t n, RandomStream& rng) {
    std::vector<double> w(n);
    double total = 0.0;
    for (double& v : w) total += (v = rng.exponential());
    for (double& v : w) v /= total;
    return w;
}

}  // namespace

ReducedState sample_face(const BoundaryFace& face, std::size_t dimension, RandomStream& rng) {
    if (dimension < 2) throw Error(ErrorCode::InvalidParameter, "dimension must be >= 2");
    const std::size_t k = dimension - 1;
    std::vector<double> y(k, 0.0);
    if (face.kind == BoundaryFace::Kind::Zero) {
        if (face.index >= k) throw Error(ErrorCode::InvalidParameter, "zero face index out of range");
        // Remaining k-1 reduced coordinates plus the slack Y_N are flat Dirichlet.
        const auto w = flat_dirichlet(k, rng);
        for (std::size_t a = 0, j = 0; a < k; ++a)
            if (a != face.index) y[a] = w[j++];
    } else {
        const auto w = flat_dirichlet(k, rng);
        double partial = 0.0;
        for (std::size_t a = 0; a + 1 < k; ++a) partial += (y[a] = w[a]);
        y[k - 1] = std::max(0.0, 1.0 - partial);
    }
    return ReducedState::make(std::move(y));
}

SimplexState sample_uniform(std::size_t dimension, RandomStream& rng) {
    if (dimension < 2) throw Error(ErrorCode::InvalidParameter, "dimension must be >= 2");
    return SimplexState::make(flat_dirichlet(dimension, rng));
}

const char* to_string(ProcessKind kind) noexcept {
    switch (kind) {
        case ProcessKind::Beta: return "beta";
        case ProcessKind::WrightFisher: return "wright_fisher";
        case ProcessKind::Dirichlet: return "dirichlet";
        case ProcessKind::GeneralizedDirichlet: return "gen_dirichlet";
        case ProcessKind::Broken: return "broken";
        case ProcessKind::Custom: return "custom";
    }
    return "unknown";
}

ProcessDefinition::ProcessDefinition(std::size_t dimension, DriftFunction drift,
                                     DiffusionFunction diffusion, std::string name,
                                     ParameterRecord parameters, ProcessKind kind)
    : dimension_(dimension),
      drift_(std::move(drift)),
      diffusion_(std::move(diffusion)),
      name_(std::move(name)),
      parameters_(std::move(parameters)),
      kind_(kind) {
    if (dimension_ < 2) throw Error(ErrorCode::InvalidParameter, "process dimension must be >= 2");
    if (!drift_ || !diffusion_) throw Error(ErrorCode::InvalidParameter, "drift and diffusion are required");
}

const std::vector<double>& ProcessDefinition::parameter(const std::string& key) const {
    auto it = parameters_.find(key);
    if (it == parameters_.end()) throw Error(ErrorCode::InvalidParameter, "process has no parameter '" + key + "'");
    return it->second;
}

std::vector<double> ProcessDefinition::drift(std::span<const double> y, double t) const {
    std::vector<double> out(reduced_dimension(), 0.0);
    drift_(y, t, out);
    return out;
}

Matrix ProcessDefinition::diffusion(std::span<const double> y, double t) const {
    Matrix out(reduced_dimension(), reduced_dimension());
    diffusion_(y, t, out.data());
    return out;
}

}  // namespace simplex
