#pragma once

#include <cstdint>
#include <vector>

namespace nonlinfo {

// Counter-based generator built on the splitmix64 finalizer.
//
// output(key, ctr) = mix64(key + ctr * 0x9E3779B97F4A7C15)
//
// Every draw is a pure function of (seed, stream, counter), so sequences are
// reproducible across platforms and independent of how work is sharded across
// threads: shard s of a simulation simply opens stream s and counts from 0.
struct CounterRng {
    std::uint64_t key = 0;
    std::uint64_t ctr = 0;

    CounterRng() = default;
    CounterRng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();
    // Uniform in [0, 1) with 53 random bits.
    double next_double();
    // Uniform integer in [0, n).
    std::uint64_t next_below(std::uint64_t n);
};

std::uint64_t mix64(std::uint64_t x);

// Uniform sample from the probability simplex over `size` symbols
// (normalized exponentials, symmetric Dirichlet(1)).
std::vector<double> sample_simplex(CounterRng& rng, std::size_t size);

// Index sampled from a discrete distribution given one uniform draw.
std::size_t sample_index(const std::vector<double>& probs, double u);

}  // namespace nonlinfo
