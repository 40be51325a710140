#include "splp/ray_knight.hpp"

#include "splp/excursion_ops.hpp"
#include "splp/parallel.hpp"

#include <cmath>
#include <stdexcept>

namespace splp {

std::vector<double> ray_knight_sample(const RayKnightConfig& c, RngStream& rng) {
    if (!(c.x > 0.0) || !(c.h > 0.0) || !(c.dr > 0.0) || !(c.barrier > 0.0)) {
        throw std::invalid_argument("Ray-Knight run needs positive x, h, dr and barrier");
    }
    const double sd = std::sqrt(c.h);
    const double target = 0.5 * c.x;
    double y = 0.0;
    double local = 0.0;
    std::vector<double> values{0.0};
    while (local < target) {
        y += sd * rng.normal();
        if (y < 0.0) {
            local += -y;
            y = 0.0;
        } else if (y > c.barrier) {
            y = 2.0 * c.barrier - y;
        }
        values.push_back(y);
    }
    const LocalTimeProfile prof = local_time_grid(GridPath(c.h, std::move(values)), c.dr);

    std::vector<double> out;
    out.reserve(c.levels.size());
    for (double t : c.levels) {
        const auto j = static_cast<std::size_t>(std::llround(t / c.dr));
        if (j == 0) throw std::invalid_argument("Ray-Knight levels must be at least dr");
        const double lo = j - 1 < prof.size() ? prof.density[j - 1] : 0.0;
        const double hi = j < prof.size() ? prof.density[j] : 0.0;
        out.push_back(0.5 * (lo + hi));
    }
    return out;
}

RayKnightResult ray_knight_moments(const RayKnightConfig& c) {
    const auto draws = generate_blocks<std::vector<double>>(
        c.n, 64, resolve_threads(c.threads), c.seed, 0x4B4EULL << 40,
        [&c](RngStream& rng) { return ray_knight_sample(c, rng); });
    RayKnightResult r;
    r.levels = c.levels;
    r.n = c.n;
    const std::size_t k = c.levels.size();
    r.mean.assign(k, 0.0);
    r.variance.assign(k, 0.0);
    for (const auto& d : draws) {
        for (std::size_t i = 0; i < k; ++i) r.mean[i] += d[i];
    }
    for (double& m : r.mean) m /= static_cast<double>(c.n);
    for (const auto& d : draws) {
        for (std::size_t i = 0; i < k; ++i) r.variance[i] += (d[i] - r.mean[i]) * (d[i] - r.mean[i]);
    }
    for (double& v : r.variance) v /= static_cast<double>(c.n - 1);
    return r;
}

}  // namespace splp
