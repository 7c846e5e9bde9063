#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace qg {

// Philox4x32-10 counter-based generator. A stream is fully determined by
// (seed, stream id); draws never depend on scheduling or thread count.
class Philox4x32 {
 public:
    using block = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    static block apply(block ctr, key_type key) {
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = std::uint64_t{0xD2511F53u} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{0xCD9E8D57u} * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
            key[0] += 0x9E3779B9u;
            key[1] += 0xBB67AE85u;
        }
        return ctr;
    }
};

class Rng {
 public:
    Rng(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint32_t next_u32() {
        if (pos_ == 4) refill();
        return buf_[pos_++];
    }

    // Uniform on [0, 1) with 53 random bits.
    double uniform() {
        const std::uint64_t a = next_u32() >> 5, b = next_u32() >> 6;
        return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) * 0x1.0p-53;
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        const double rad = std::sqrt(-2.0 * std::log(u1));
        const double ang = 6.283185307179586 * u2;
        spare_ = rad * std::sin(ang);
        have_spare_ = true;
        return rad * std::cos(ang);
    }

    std::uint64_t blocks_used() const { return counter_; }

 private:
    void refill() {
        const Philox4x32::block ctr{static_cast<std::uint32_t>(counter_),
                                    static_cast<std::uint32_t>(counter_ >> 32),
                                    static_cast<std::uint32_t>(stream_),
                                    static_cast<std::uint32_t>(stream_ >> 32)};
        buf_ = Philox4x32::apply(ctr, key_);
        ++counter_;
        pos_ = 0;
    }

    Philox4x32::key_type key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    Philox4x32::block buf_{};
    int pos_ = 4;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// Stream ids: role in the top 16 bits, trajectory index below.
enum class StreamRole : std::uint64_t {
    trajectory = 1,
    independent = 2,
    initial_state = 3,
    measurement = 4,
    probe = 5,
};

inline std::uint64_t stream_id(StreamRole role, std::uint64_t index) {
    return (static_cast<std::uint64_t>(role) << 48) | (index & 0xFFFFFFFFFFFFull);
}

}  // namespace qg
