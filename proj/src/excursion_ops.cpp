#include "splp/excursion_ops.hpp"

#include <algorithm>
#include <cmath>
#include <variant>

namespace splp {

namespace {

double level_tol(double r) { return kPathTol * std::max(1.0, std::abs(r)); }

}  // namespace

std::size_t LocalTimeProfile::interval_of(double r) const {
    const std::size_t n = size();
    if (n == 0) return 0;
    if (kind == Kind::Counts) {
        if (r <= breakpoints.front() || r > breakpoints.back()) return n;
        const auto it = std::lower_bound(breakpoints.begin(), breakpoints.end(), r);
        return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    }
    if (r < breakpoints.front() || r >= breakpoints.back()) return n;
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), r);
    return static_cast<std::size_t>(it - breakpoints.begin()) - 1;
}

int LocalTimeProfile::count_at(double r) const {
    if (kind != Kind::Counts) throw DomainError("grid profiles carry densities only");
    const std::size_t i = interval_of(r);
    return i < size() ? counts[i] : 0;
}

double LocalTimeProfile::density_at(double r) const {
    const std::size_t i = interval_of(r);
    return i < size() ? density[i] : 0.0;
}

TimeValue gamma(const EventPath& e) { return first_argmax(e); }

TimeValue gamma(const Path& e) { return first_argmax(e); }

EventPath pre_sup(const EventPath& e) { return kill(e, gamma(e).time); }

Path pre_sup(const Path& e) { return kill(e, gamma(e).time); }

EventPath post_sup(const EventPath& e) { return shift_centered(e, gamma(e).time); }

Path post_sup(const Path& e) { return shift_centered(e, gamma(e).time); }

EventPath chi(const EventPath& e) {
    const TimeValue g = gamma(e);
    return concat(rotate(kill(e, g.time)), rotate(shift_centered(e, g.time)).translated(g.value));
}

GridPath chi(const GridPath& e) {
    const TimeValue g = gamma(e);
    return concat(rotate(kill(e, g.time)), rotate(shift_centered(e, g.time)).translated(g.value));
}

Path chi(const Path& e) {
    return std::visit([](const auto& q) -> Path { return chi(q); }, e);
}

EventPath chi_prime(const EventPath& e) { return e.reflected(gamma(e).value); }

GridPath chi_prime(const GridPath& e) {
    const double height = gamma(e).value;
    std::vector<double> v = e.values();
    for (double& x : v) x = height - x;
    return GridPath(e.h(), std::move(v));
}

Path chi_prime(const Path& e) {
    return std::visit([](const auto& q) -> Path { return chi_prime(q); }, e);
}

LocalTimeProfile local_time_fv(const EventPath& e) {
    struct Range {
        double low, high, weight;
    };
    std::vector<Range> ranges;
    std::vector<double> levels;
    const auto& segs = e.segments();
    ranges.reserve(segs.size());
    levels.reserve(2 * segs.size());
    for (std::size_t i = 0; i < segs.size(); ++i) {
        if (segs[i].slope == 0.0) throw DomainError("local time needs nonzero slopes");
        const double a = e.value_after_knot(i);
        const double b = e.value_before_knot(i + 1);
        ranges.push_back({std::min(a, b), std::max(a, b), 1.0 / std::abs(segs[i].slope)});
        levels.push_back(a);
        levels.push_back(b);
    }

    LocalTimeProfile out;
    out.kind = LocalTimeProfile::Kind::Counts;
    if (levels.empty()) {
        out.breakpoints = {e.x0()};
        return out;
    }
    std::sort(levels.begin(), levels.end());
    std::vector<double> bp;
    for (double r : levels) {
        if (bp.empty() || r - bp.back() > level_tol(r)) bp.push_back(r);
    }
    const auto index = [&bp](double r) {
        // Nearest breakpoint, so that values equal up to rounding share one index.
        auto it = std::lower_bound(bp.begin(), bp.end(), r - level_tol(r));
        return static_cast<std::size_t>(it - bp.begin());
    };

    const std::size_t n = bp.size();
    std::vector<int> dc(n + 1, 0);
    std::vector<double> dd(n + 1, 0.0);
    for (const Range& q : ranges) {
        const std::size_t lo = index(q.low);
        const std::size_t hi = index(q.high);
        if (hi <= lo) continue;
        dc[lo] += 1;
        dc[hi] -= 1;
        dd[lo] += q.weight;
        dd[hi] -= q.weight;
    }
    out.breakpoints = bp;
    out.counts.resize(n - 1);
    out.density.resize(n - 1);
    int c = 0;
    double d = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        c += dc[i];
        d += dd[i];
        out.counts[i] = c;
        out.density[i] = c == 0 ? 0.0 : d;
    }
    return out;
}

LocalTimeProfile local_time_grid(const GridPath& e, double dr) {
    if (!(dr > 0.0)) throw DomainError("bin width must be positive");
    const double top = std::max(0.0, e.sup());
    const auto bins = static_cast<std::size_t>(std::floor(top / dr)) + 1;
    LocalTimeProfile out;
    out.kind = LocalTimeProfile::Kind::Density;
    out.breakpoints.resize(bins + 1);
    for (std::size_t j = 0; j <= bins; ++j) out.breakpoints[j] = dr * static_cast<double>(j);
    out.density.assign(bins, 0.0);
    const double w = e.h() / dr;
    for (double v : e.values()) {
        if (v < 0.0) continue;
        auto j = static_cast<std::size_t>(std::floor(v / dr));
        if (j >= bins) continue;
        out.density[j] += w;
    }
    return out;
}

TimeValue nu(const EventPath& e) {
    const TimeValue m = first_arginf_left(e);
    return {m.time, -m.value};
}

}  // namespace splp
