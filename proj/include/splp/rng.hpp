#ifndef SPLP_RNG_HPP
#define SPLP_RNG_HPP

#include <cstdint>
#include <random>

namespace splp {

/// Reproducible random stream identified by (seed, stream id). Distinct
/// stream ids give statistically independent engines; a given pair always
/// replays the same sequence.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::mt19937_64& engine() { return engine_; }

    double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
    double exponential(double rate) { return std::exponential_distribution<double>(rate)(engine_); }
    double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
    std::uint64_t poisson(double mean) {
        return mean <= 0.0 ? 0 : std::poisson_distribution<std::uint64_t>(mean)(engine_);
    }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace splp

#endif  // SPLP_RNG_HPP
