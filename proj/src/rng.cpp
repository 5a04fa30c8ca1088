#include "nonlinfo/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace nonlinfo {

std::uint64_t mix64(std::uint64_t x) {
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream)
    : key(mix64(seed ^ mix64(stream * 0xD2B74407B1CE6E93ULL + 0x8CB92BA72F3D8DD7ULL))), ctr(0) {}

std::uint64_t CounterRng::next_u64() {
    return mix64(key + (ctr++) * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    // Rejection-free modulo is fine here: n is tiny relative to 2^64 in all
    // uses (alphabet sizes, grid indices), bias < 2^-50.
    return next_u64() % n;
}

std::vector<double> sample_simplex(CounterRng& rng, std::size_t size) {
    std::vector<double> v(size);
    double total = 0.0;
    for (auto& x : v) {
        double u = rng.next_double();
        if (u <= 0.0) u = 0x1.0p-53;
        x = -std::log(u);
        total += x;
    }
    for (auto& x : v) x /= total;
    return v;
}

std::size_t sample_index(const std::vector<double>& probs, double u) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        acc += probs[i];
        if (u < acc) return i;
    }
    return probs.empty() ? 0 : probs.size() - 1;
}

}  // namespace nonlinfo
