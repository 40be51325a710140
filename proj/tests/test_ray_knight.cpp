#include "splp/ray_knight.hpp"

#include <doctest.h>

#include <cmath>

using namespace splp;

TEST_CASE("Ray-Knight runs replay per seed and reject bad settings") {
    RayKnightConfig c;
    c.h = 1e-3;
    c.n = 50;
    const RayKnightResult a = ray_knight_moments(c);
    c.threads = 3;
    const RayKnightResult b = ray_knight_moments(c);
    CHECK(a.mean == b.mean);
    CHECK(a.variance == b.variance);

    RngStream rng(1, 0);
    RayKnightConfig bad;
    bad.x = 0.0;
    CHECK_THROWS(ray_knight_sample(bad, rng));
    bad = RayKnightConfig{};
    bad.levels = {0.001};
    CHECK_THROWS(ray_knight_sample(bad, rng));
}

TEST_CASE("local time field at a small level stays near x") {
    RayKnightConfig c;
    c.h = 1e-4;
    c.n = 600;
    c.levels = {0.05};
    const RayKnightResult r = ray_knight_moments(c);
    // Var Z_t = 4xt gives the standard error of the mean.
    const double se = std::sqrt(4.0 * c.x * 0.05 / c.n);
    CAPTURE(r.mean[0]);
    CHECK(std::abs(r.mean[0] - c.x) < 4.0 * se + 0.03);
    CHECK(r.variance[0] > 0.0);
}
