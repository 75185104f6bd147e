#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace epiq {

// Finalizer step of the splitmix64 generator. Used to spread seeds before
// handing them to the mt19937_64 engine.
inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Deterministic, seedable pseudo-random source. Each simulation replication
// owns its own RandomSource; nothing here is shared or thread-safe.
//
// Distribution objects are constructed per call so the engine stream is the
// only state; identical seeds reproduce identical draw sequences.
class RandomSource {
  public:
    explicit RandomSource(std::uint64_t seed) : engine_(splitmix64(seed)) {}

    // Replication i of a batch with master seed s draws its engine seed from
    // splitmix64(splitmix64(s) + i). Keyed by index, so results do not depend
    // on which worker runs the replication.
    static RandomSource for_replication(std::uint64_t master_seed, std::uint64_t replication) {
        RandomSource src(0);
        src.engine_.seed(splitmix64(splitmix64(master_seed) + replication));
        return src;
    }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

    double uniform(double a, double b) {
        return std::uniform_real_distribution<double>(a, b)(engine_);
    }

    // rate <= 0 means the event never fires.
    double exponential(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return std::exponential_distribution<double>(rate)(engine_);
    }

    double gamma(double shape, double scale) {
        return std::gamma_distribution<double>(shape, scale)(engine_);
    }

    double lognormal(double log_mean, double log_sd) {
        return std::lognormal_distribution<double>(log_mean, log_sd)(engine_);
    }

    std::uint64_t raw() { return engine_(); }

  private:
    std::mt19937_64 engine_;
};

} // namespace epiq
