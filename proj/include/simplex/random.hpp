#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace simplex {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
/// Pure function of (counter, key); no internal state.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

class RandomStream;

/// Root of all randomness in a run. Identical (seed, stream id) yields identical
/// draws; particle noise is addressed by (particle, step, attempt) so results do
/// not depend on the order in which particles are advanced.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint32_t stream_id = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint32_t stream_id() const noexcept { return stream_id_; }

    /// Fills `out` with independent standard normals keyed by
    /// (particle, step, attempt). Attempts index rejection redraws.
    void normals(std::uint32_t particle, std::uint64_t step, std::uint32_t attempt,
                 std::span<double> out) const;

    /// Sequential stream for non-particle uses (face sampling, test fixtures).
    RandomStream sequential(std::uint32_t substream) const;

private:
    std::uint64_t seed_;
    std::uint32_t stream_id_;
    std::array<std::uint32_t, 2> key_;
};

class RandomStream {
public:
    RandomStream(std::array<std::uint32_t, 2> key, std::uint32_t stream_id,
                 std::uint32_t substream) noexcept;

    /// Uniform on [0, 1).
    double uniform() noexcept;
    /// Uniform on (0, 1].
    double uniform_open_low() noexcept;
    double normal() noexcept;
    double exponential() noexcept;

private:
    std::uint64_t next_u64() noexcept;

    std::array<std::uint32_t, 2> key_;
    std::uint32_t stream_id_;
    std::uint32_t substream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buffer_{};
    int buffered_ = 0;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace simplex
