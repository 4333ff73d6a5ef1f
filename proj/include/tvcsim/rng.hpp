// Seeded random streams for simulation campaigns.
//
// Every stochastic signal in a run (wind, gyro noise, attitude noise) draws
// from its own named stream. Stream seeds are derived from
// (master seed, case id, stream name) so that re-seeding one stream never
// shifts another, and a campaign is reproducible from its master seed alone.
#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace tvcsim {

// splitmix64 step (Steele, Lea, Flood 2014). Full-period 64-bit generator,
// also used as the seed mixer.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// seed(stream, case) = mix(mix(master ^ fnv1a(stream)) ^ case_id).
inline std::uint64_t derive_stream_seed(std::uint64_t master, std::uint64_t case_id,
                                        std::string_view stream) {
    std::uint64_t s = master ^ fnv1a64(stream);
    std::uint64_t a = splitmix64(s);
    s = a ^ case_id;
    return splitmix64(s);
}

// Standard-normal stream (polar Box-Muller over splitmix64 uniforms).
// Self-contained so sequences are fixed by this code, not by the standard
// library's distribution internals.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : state_(seed) {}

    // Uniform in (0, 1).
    double uniform() {
        std::uint64_t bits = splitmix64(state_);
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double r = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * r;
        has_spare_ = true;
        return u * r;
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

} // namespace tvcsim
