#include "simplex/random.hpp"

#include <cmath>
#include <numbers>

#include "simplex/error.hpp"

namespace simplex {
namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

// Sequential streams set the top bit of the stream word so they never collide
// with the particle-noise counters.
constexpr std::uint32_t kSequentialFlag = 0x80000000u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

inline double to_unit_closed_open(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double to_unit_open_closed(std::uint64_t bits) noexcept {
    return static_cast<double>((bits >> 11) + 1) * 0x1.0p-53;
}

inline void box_muller(std::uint64_t a, std::uint64_t b, double& z0, double& z1) noexcept {
    const double radius = std::sqrt(-2.0 * std::log(to_unit_open_closed(a)));
    const double angle = 2.0 * std::numbers::pi * to_unit_closed_open(b);
    z0 = radius * std::cos(angle);
    z1 = radius * std::sin(angle);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) noexcept {
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

RandomSource::RandomSource(std::uint64_t seed, std::uint32_t stream_id)
    : seed_(seed),
      stream_id_(stream_id),
      key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {
    if (stream_id & kSequentialFlag)
        throw Error(ErrorCode::InvalidParameter, "stream id must be below 2^31");
}

void RandomSource::normals(std::uint32_t particle, std::uint64_t step, std::uint32_t attempt,
                           std::span<double> out) const {
    if (attempt > 0xFFFFu || out.size() > 2 * 0x10000u)
        throw Error(ErrorCode::InvalidParameter, "noise request exceeds counter layout");
    // Counter layout: [step lo, step hi ^ particle-mixed, attempt<<16 | block, stream].
    // Steps above 2^32 are folded into word 1 together with the particle id.
    const auto step_lo = static_cast<std::uint32_t>(step);
    const auto step_hi = static_cast<std::uint32_t>(step >> 32);
    std::size_t i = 0;
    for (std::uint32_t block = 0; i < out.size(); ++block) {
        const auto word = philox4x32(
            {step_lo, particle ^ (step_hi * kWeyl1), (attempt << 16) | block, stream_id_}, key_);
        const std::uint64_t a = (static_cast<std::uint64_t>(word[0]) << 32) | word[1];
        const std::uint64_t b = (static_cast<std::uint64_t>(word[2]) << 32) | word[3];
        double z0, z1;
        box_muller(a, b, z0, z1);
        out[i++] = z0;
        if (i < out.size()) out[i++] = z1;
    }
}

RandomStream RandomSource::sequential(std::uint32_t substream) const {
    return RandomStream(key_, stream_id_, substream);
}

RandomStream::RandomStream(std::array<std::uint32_t, 2> key, std::uint32_t stream_id,
                           std::uint32_t substream) noexcept
    : key_(key), stream_id_(stream_id | kSequentialFlag), substream_(substream) {}

std::uint64_t RandomStream::next_u64() noexcept {
    if (buffered_ == 0) {
        buffer_ = philox4x32({static_cast<std::uint32_t>(counter_),
                              static_cast<std::uint32_t>(counter_ >> 32), substream_, stream_id_},
                             key_);
        ++counter_;
        buffered_ = 2;
    }
    const int base = 4 - 2 * buffered_;
    --buffered_;
    return (static_cast<std::uint64_t>(buffer_[base]) << 32) | buffer_[base + 1];
}

double RandomStream::uniform() noexcept { return to_unit_closed_open(next_u64()); }

double RandomStream::uniform_open_low() noexcept { return to_unit_open_closed(next_u64()); }

double RandomStream::normal() noexcept {
    if (has_spare_) {
        has_spare_ = false;
        return spare_normal_;
    }
    const std::uint64_t a = next_u64();
    const std::uint64_t b = next_u64();
    double z0, z1;
    box_muller(a, b, z0, z1);
    spare_normal_ = z1;
    has_spare_ = true;
    return z0;
}

double RandomStream::exponential() noexcept { return -std::log(uniform_open_low()); }

}  // namespace simplex
