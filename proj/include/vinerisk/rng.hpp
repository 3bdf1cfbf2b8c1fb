#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace vinerisk {

// All randomness flows from a single root seed.  Sub-streams are derived by
// hashing a label and counter into the root, so adding a parallel axis or
// reordering work never shifts another stream's draws.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label,
                                 std::uint64_t counter = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL; // FNV-1a over the label
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return splitmix64(root ^ splitmix64(h ^ splitmix64(counter)));
}

// Uniform draws come from the raw 64-bit stream, never from
// std::uniform_real_distribution (whose mapping is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    // strictly inside (0,1): 53-bit mantissa offset by half an ulp
    double uniform() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() { // Box-Muller pair, cached
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

    std::uint64_t raw() { return eng_(); }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace vinerisk
