#include "core/rng.hpp"

#include <cmath>

namespace slg {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ULL;
}  // namespace

std::uint64_t CounterRng::mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t CounterRng::derive(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t k = mix(seed + kGolden);
    k = mix(k ^ (stream * kGolden + kStreamSalt));
    return k;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(derive(seed, stream)) {}

std::uint64_t CounterRng::at(std::uint64_t counter) const {
    return mix(key_ + (counter + 1) * kGolden);
}

std::uint64_t CounterRng::next_u64() { return at(ctr_++); }

double CounterRng::uniform() {
    // 53-bit mantissa, shifted into the open interval (0,1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
}

double CounterRng::normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
}

void CounterRng::fill_normal(double* out, int n) {
    for (int i = 0; i < n; ++i) out[i] = normal();
}

}  // namespace slg
