#pragma once

#include <cstdint>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace pullback {

/// splitmix64: tiny, portable, deterministic PRNG used for seed derivation and
/// sampling. Unlike <random> distributions its output is identical across
/// standard libraries.
struct SplitMix64 {
    std::uint64_t state;

    explicit SplitMix64(std::uint64_t seed) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    /// Uniform double in [a, b).
    double uniform(double a, double b) { return a + (b - a) * uniform(); }
};

inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
    SplitMix64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (salt + 1)));
    return rng.next();
}

/// FNV-1a 64-bit hash, used for content addressing.
inline std::uint64_t fnv1a(const void* data, std::size_t len,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Worker cap: PULLBACK_LAB_THREADS when set, hardware concurrency otherwise.
inline unsigned thread_cap() {
    if (const char* env = std::getenv("PULLBACK_LAB_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Index-parallel loop with deterministic work assignment; results must be
/// written to disjoint slots by the body. Tasks must be pure functions of
/// their index.
inline void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body) {
    const unsigned workers = std::min<std::size_t>(thread_cap(), count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w]() {
            for (std::size_t i = w; i < count; i += workers) body(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace pullback
