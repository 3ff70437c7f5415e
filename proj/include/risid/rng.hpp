#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <random>

namespace risid {

// Counter-based generator: output k is splitmix64(key + k * golden).
// Satisfies UniformRandomBitGenerator, so it plugs into <random>
// distributions.
class CounterRng {
public:
    using result_type = std::uint64_t;

    explicit CounterRng(std::uint64_t key = 0) noexcept : key_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        counter_ += 1;
        return mix(key_ + counter_ * kGolden);
    }

    std::uint64_t key() const noexcept { return key_; }

    static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

    static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// Substream key for a consumer identified by a path of integers below the
// master seed, e.g. {trial, ris_index, purpose}. Each path element is folded
// in with a splitmix64 round, so distinct paths give unrelated streams and no
// stream depends on how work is split across threads.
inline std::uint64_t substream_key(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    std::uint64_t key = CounterRng::mix(master + CounterRng::kGolden);
    for (std::uint64_t id : path) {
        key = CounterRng::mix(key ^ CounterRng::mix(id + 0x632BE59BD9B4E019ULL));
    }
    return key;
}

inline CounterRng substream(std::uint64_t master, std::initializer_list<std::uint64_t> path) noexcept {
    return CounterRng(substream_key(master, path));
}

// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
template <class Rng>
std::complex<double> complex_gaussian(Rng& rng, double variance = 1.0) {
    std::normal_distribution<double> normal(0.0, std::sqrt(variance / 2.0));
    const double re = normal(rng);
    const double im = normal(rng);
    return {re, im};
}

} // namespace risid
