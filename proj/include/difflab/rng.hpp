#pragma once

#include <array>
#include <cstdint>

namespace difflab {

// splitmix64: used for seeding and for deriving per-stream seeds from
// (master_seed, stream_index). This is the documented splitting rule:
// stream k of master seed s is seeded with splitmix64(s ^ golden*(k+1)).
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix_seed(std::uint64_t master_seed, std::uint64_t stream_index);

// Counter-free xoshiro256** stream. Hand-rolled so that results are
// bit-identical across standard libraries; parallel code derives one
// stream per trajectory/replica so results do not depend on thread count.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed);

    static RngStream substream(std::uint64_t master_seed, std::uint64_t stream_index) {
        return RngStream(mix_seed(master_seed, stream_index));
    }

    std::uint64_t next_u64();

    // uniform on [0, 1), 53-bit resolution
    double uniform();

    // standard normal via Box-Muller (second value cached)
    double gaussian();

    // uniform integer in [0, n), n >= 1
    std::uint64_t uniform_index(std::uint64_t n);

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::array<std::uint64_t, 4> s_{};
    std::uint64_t seed_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace difflab
