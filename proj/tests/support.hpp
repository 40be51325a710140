// Shared generators and oracles for the unit tests.
#ifndef SPLP_TESTS_SUPPORT_HPP
#define SPLP_TESTS_SUPPORT_HPP

#include "splp/path.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace splp::testing {

/// Random spectrally positive event path: pre-jump start 0, optional time-0
/// jump, 1..8 segments of random negative slope with random jumps.
inline EventPath random_path(std::mt19937_64& g, bool allow_initial_jump = true) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double init = (allow_initial_jump && u(g) < 0.5) ? 0.2 + 2.0 * u(g) : 0.0;
    const int n = 1 + static_cast<int>(u(g) * 8);
    std::vector<Segment> segs;
    for (int i = 0; i < n; ++i) {
        const double jump = (i + 1 < n || u(g) < 0.3) && u(g) < 0.7 ? 0.1 + 1.5 * u(g) : 0.0;
        segs.push_back({0.1 + 2.0 * u(g), -(0.3 + 2.0 * u(g)), jump});
    }
    return EventPath(init, init, segs);
}

/// Random excursion above 0 with slope -1: starts with a jump, ends at 0 by
/// drift, stays positive in between.
inline EventPath random_excursion(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double first = 0.1 + 2.0 * u(g);
    double level = first;
    std::vector<Segment> segs;
    const int extra = static_cast<int>(u(g) * 6);
    for (int i = 0; i < extra; ++i) {
        const double d = level * (0.05 + 0.9 * u(g));
        level -= d;
        const double j = 0.05 + 1.5 * u(g);
        segs.push_back({d, -1.0, j});
        level += j;
    }
    segs.push_back({level, -1.0, 0.0});
    return EventPath(first, first, segs);
}

/// Direct evaluation from the segment list, independent of EventPath's
/// cached knots: value at t (post-jump) or just before t.
inline double oracle_value(const EventPath& p, double t, bool left) {
    double x = p.start_value();
    if (t == 0.0) return p.x0();
    x += p.initial_jump();
    double clock = 0.0;
    for (const Segment& s : p.segments()) {
        if (t < clock + s.duration) return x + s.slope * (t - clock);
        x += s.slope * s.duration;
        clock += s.duration;
        if (t == clock) return left ? x : x + s.end_jump;
        x += s.end_jump;
    }
    return x;
}

}  // namespace splp::testing

#endif  // SPLP_TESTS_SUPPORT_HPP
