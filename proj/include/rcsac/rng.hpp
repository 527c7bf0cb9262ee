#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rcsac {

// Deterministic seeded RNG stream. One stream per consumer (env, policy,
// buffer, risk-MC, eval, ...); derive streams from a master seed through
// SeedRegistry so runs are reproducible from a single seed.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed) : eng_(seed) {}

    double uniform() { return unif_(eng_); }                 // [0, 1)
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal() { return normal_(eng_); }                // N(0, 1)

    // Inclusive on both ends.
    std::uint64_t uniform_index(std::uint64_t lo, std::uint64_t hi) {
        std::uniform_int_distribution<std::uint64_t> d(lo, hi);
        return d(eng_);
    }

    std::uint64_t next_u64() { return eng_(); }
    std::mt19937_64& engine() { return eng_; }

private:
    std::mt19937_64 eng_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> normal_{0.0, 1.0};
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t fnv1a64(std::string_view s);

// Derives named independent substreams from one master seed. The same
// (master, name, index) triple always yields the same stream, so any
// substream can be re-created after the fact (e.g. to recompute a stored
// Monte Carlo risk label).
class SeedRegistry {
public:
    explicit SeedRegistry(std::uint64_t master) : master_(master) {}

    std::uint64_t derive(std::string_view name, std::uint64_t index = 0) const;
    RngStream stream(std::string_view name, std::uint64_t index = 0) const {
        return RngStream(derive(name, index));
    }
    std::uint64_t master() const { return master_; }

private:
    std::uint64_t master_;
};

}  // namespace rcsac
