#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "simplex/error.hpp"
#include "simplex/random.hpp"

namespace simplex {

/// Tolerance on |sum - 1| accepted when building states.
inline constexpr double kSumTolerance = 1e-12;

/// Small dense row-major matrix. Sizes here are (N-1)x(N-1) or NxN with N a
/// handful of species, so no expression templates are needed.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    double max_abs() const noexcept;
    Matrix transpose() const;
    Matrix operator*(const Matrix& rhs) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double max_abs_difference(const Matrix& a, const Matrix& b);

/// Sum of the independent coordinates, always accumulated left to right so the
/// integrator, the validators and the completion to Y_N agree bit-for-bit.
double reduced_sum(std::span<const double> reduced) noexcept;

/// Clamps negative coordinates to zero and, if the sum exceeds one, scales the
/// vector by 1/sum, then trims roundoff so that reduced_sum() <= 1 holds
/// exactly. Returns whether the input was modified.
bool clip_and_renormalize(std::span<double> reduced) noexcept;

/// True iff every coordinate is >= 0 and reduced_sum() <= 1.
bool is_realizable(std::span<const double> reduced) noexcept;

/// The N-1 independent fractions Y_1..Y_{N-1}; Y_N is implied.
class ReducedState {
public:
    /// Throws NegativeComponent / SumViolation. Components in [-tol, 0) are set
    /// to exactly zero; a sum in (1, 1 + tol] is pulled back to at most one.
    static ReducedState make(std::vector<double> values);

    std::size_t dimension() const noexcept { return values_.size() + 1; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    friend bool operator==(const ReducedState&, const ReducedState&) = default;

private:
    explicit ReducedState(std::vector<double> v) : values_(std::move(v)) {}
    std::vector<double> values_;
};

/// A realizable composition: N >= 2 non-negative fractions summing to one.
class SimplexState {
public:
    /// Validates and renormalizes by the sum. Zeros stay exactly zero.
    static SimplexState make(std::vector<double> fractions);

    std::size_t dimension() const noexcept { return fractions_.size(); }
    std::span<const double> fractions() const noexcept { return fractions_; }
    double operator[](std::size_t i) const noexcept { return fractions_[i]; }

    /// Drops Y_N.
    ReducedState reduced() const;

    friend bool operator==(const SimplexState&, const SimplexState&) = default;

private:
    explicit SimplexState(std::vector<double> f) : fractions_(std::move(f)) {}
    std::vector<double> fractions_;
};

/// Appends Y_N = 1 - sum(reduced).
SimplexState complete_reduced(std::span<const double> reduced);
inline SimplexState complete_reduced(const ReducedState& reduced) {
    return complete_reduced(reduced.values());
}

/// Smallest Euclidean distance from a reduced point to any face of the
/// reduced simplex: min(min_a Y_a, (1 - sum Y) / sqrt(N - 1)).
double boundary_distance(std::span<const double> reduced) noexcept;
inline double boundary_distance(const ReducedState& s) noexcept { return boundary_distance(s.values()); }

struct BoundaryFace {
    enum class Kind { Zero, UnitSum };

    Kind kind = Kind::Zero;
    /// 0-based coordinate for Zero faces; unused for UnitSum.
    std::size_t index = 0;

    static BoundaryFace zero(std::size_t index) { return {Kind::Zero, index}; }
    static BoundaryFace unit_sum() { return {Kind::UnitSum, 0}; }

    friend bool operator==(const BoundaryFace&, const BoundaryFace&) = default;
};

/// "Y1=0", "Y2=0", ..., "sum=1" (1-based labels).
std::string to_string(const BoundaryFace& face);

/// The N-1 zero faces followed by the unit-sum face.
std::vector<BoundaryFace> boundary_faces(std::size_t dimension);

/// Uniform point on a face of the reduced simplex. The face coordinate is an
/// exact zero; on the unit-sum face the last coordinate closes the sum.
ReducedState sample_face(const BoundaryFace& face, std::size_t dimension, RandomStream& rng);

/// Uniform point on the whole simplex (flat Dirichlet).
SimplexState sample_uniform(std::size_t dimension, RandomStream& rng);

enum class ProcessKind { Beta, WrightFisher, Dirichlet, GeneralizedDirichlet, Broken, Custom };

const char* to_string(ProcessKind kind) noexcept;

/// Named numeric parameters, e.g. {"b": {2.0}, "S": {0.5}}.
using ParameterRecord = std::map<std::string, std::vector<double>>;

/// Writes the N-1 drift rates A_a(Y, t) into `out`.
using DriftFunction = std::function<void(std::span<const double> y, double t, std::span<double> out)>;
/// Writes the (N-1)x(N-1) row-major diffusion matrix B_ab(Y, t) into `out`.
using DiffusionFunction =
    std::function<void(std::span<const double> y, double t, std::span<double> out)>;

/// Drift and diffusion over the reduced state space, plus metadata. Immutable
/// and reentrant once built.
class ProcessDefinition {
public:
    ProcessDefinition(std::size_t dimension, DriftFunction drift, DiffusionFunction diffusion,
                      std::string name, ParameterRecord parameters,
                      ProcessKind kind = ProcessKind::Custom);

    std::size_t dimension() const noexcept { return dimension_; }
    std::size_t reduced_dimension() const noexcept { return dimension_ - 1; }
    const std::string& name() const noexcept { return name_; }
    ProcessKind kind() const noexcept { return kind_; }
    const ParameterRecord& parameters() const noexcept { return parameters_; }
    const std::vector<double>& parameter(const std::string& key) const;

    void drift_into(std::span<const double> y, double t, std::span<double> out) const {
        drift_(y, t, out);
    }
    void diffusion_into(std::span<const double> y, double t, std::span<double> out) const {
        diffusion_(y, t, out);
    }

    std::vector<double> drift(std::span<const double> y, double t = 0.0) const;
    Matrix diffusion(std::span<const double> y, double t = 0.0) const;

private:
    std::size_t dimension_;
    DriftFunction drift_;
    DiffusionFunction diffusion_;
    std::string name_;
    ParameterRecord parameters_;
    ProcessKind kind_;
};

}  // namespace simplex
