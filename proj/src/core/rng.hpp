#pragma once

#include <cstdint>

namespace slg {

// Counter-based splittable generator built on the SplitMix64 finalizer
// (Steele/Lea/Flood construction).  The i-th output of a stream is a pure
// function of (seed, stream, i), so parallel consumers that index their
// draws get identical results regardless of thread count or scheduling.
class CounterRng {
public:
    CounterRng() : CounterRng(0, 0) {}
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    double uniform();  // in (0,1)
    double normal();   // standard normal, Box-Muller (two uniforms per draw)
    void fill_normal(double* out, int n);

    void seek(std::uint64_t counter) { ctr_ = counter; }
    std::uint64_t position() const { return ctr_; }
    std::uint64_t key() const { return key_; }

    // Stateless access: value at an absolute counter, stream untouched.
    std::uint64_t at(std::uint64_t counter) const;

    // Derive a child stream key; splitting is just another hash.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);
    static std::uint64_t mix(std::uint64_t z);

private:
    std::uint64_t key_;
    std::uint64_t ctr_ = 0;
};

}  // namespace slg
