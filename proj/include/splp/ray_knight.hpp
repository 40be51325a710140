#ifndef SPLP_RAY_KNIGHT_HPP
#define SPLP_RAY_KNIGHT_HPP

#include "splp/rng.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace splp {

/**
 * Grid reflected Brownian motion run until its local time at 0 reaches x,
 * with the local-time field read off at a few levels.
 *
 * Y = B - inf B for a standard Brownian motion B; -inf B is the symmetric
 * local time of B at 0, so the occupation density of Y at 0+ is twice that.
 * The run stops once that density reaches x, and the field (Z_t) then
 * follows the Feller diffusion dZ = 2√Z dW from Z_0 = x.
 *
 * Levels above `barrier` never matter for the field below it, so the path
 * is folded there (Y -> 2·barrier - Y). This keeps run lengths bounded
 * without changing the law of Z below the barrier.
 */
struct RayKnightConfig {
    double x = 1.0;
    double h = 1e-4;
    double dr = 0.01;
    double barrier = 0.5;
    std::vector<double> levels{0.1, 0.2};
    std::size_t n = 5000;
    std::uint64_t seed = 11;
    unsigned threads = 0;
};

/// Field estimates at each level for one run: the mean of the two
/// histogram bins of width dr that meet at the level.
std::vector<double> ray_knight_sample(const RayKnightConfig& c, RngStream& rng);

struct RayKnightResult {
    std::vector<double> levels;
    std::vector<double> mean;
    std::vector<double> variance;
    std::size_t n = 0;
};

RayKnightResult ray_knight_moments(const RayKnightConfig& c);

}  // namespace splp

#endif  // SPLP_RAY_KNIGHT_HPP
