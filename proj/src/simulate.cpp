#include "splp/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace splp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

/// Event and wall-clock accounting shared by the samplers.
class Budget {
public:
    explicit Budget(const SimLimits& limits)
        : limits_(limits), start_(std::chrono::steady_clock::now()) {}

    void tick() {
        if (++events_ > limits_.max_events) {
            throw ResourceCapError("simulation exceeded " + std::to_string(limits_.max_events) +
                                   " events");
        }
        if ((events_ & 0xFFF) == 0) check_clock();
    }

    void check_clock() const {
        const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start_;
        if (dt.count() > limits_.max_seconds) {
            throw ResourceCapError("simulation exceeded " + std::to_string(limits_.max_seconds) +
                                   " s");
        }
    }

private:
    SimLimits limits_;
    std::chrono::steady_clock::time_point start_;
    std::size_t events_ = 0;
};

double next_gap(double rate, RngStream& rng) { return rate > 0.0 ? rng.exponential(rate) : kInf; }

double drift_or_throw(const LevyModel& m) {
    const double d = m.drift();
    if (!(d > 0.0)) throw DomainError("simulation needs a positive drift coefficient d");
    return d;
}

void require_descending(const EventPath& p) {
    for (const Segment& s : p.segments()) {
        if (!(s.slope < 0.0)) {
            throw DomainError("excursion extraction needs strictly decreasing drift segments");
        }
    }
}

double time_tol(double t) { return kPathTol * std::max(1.0, std::abs(t)); }

}  // namespace

EventPath sample_path_fv(const LevyModel& m, const StopRule& stop, RngStream& rng, double start,
                         const SimLimits& limits) {
    const double d = drift_or_throw(m);
    const double b = m.jumps().mass();
    Budget budget(limits);
    PathBuilder path(start);

    if (const auto* h = std::get_if<Horizon>(&stop)) {
        if (h->time < 0.0) throw DomainError("horizon must be nonnegative");
        double t = 0.0;
        while (true) {
            const double gap = next_gap(b, rng);
            if (t + gap >= h->time) {
                path.drift(h->time - t, -d);
                return path.build(JumpSign::Upward, false);
            }
            path.drift(gap, -d);
            path.jump(m.jumps().sample(rng.engine()));
            t += gap;
            budget.tick();
        }
    }

    if (const auto* fp = std::get_if<FirstPassage>(&stop)) {
        if (fp->level > start) throw DomainError("first-passage level must lie below the start");
        double x = start;
        while (true) {
            const double gap = next_gap(b, rng);
            if (x - d * gap <= fp->level) {
                path.drift((x - fp->level) / d, -d);
                return path.build();
            }
            path.drift(gap, -d);
            x -= d * gap;
            const double jump = m.jumps().sample(rng.engine());
            path.jump(jump);
            x += jump;
            budget.tick();
        }
    }

    const std::size_t wanted = std::get<ExcursionCount>(stop).count;
    if (wanted == 0) return path.build();
    double x = start;
    bool inside = false;
    double level = start;
    std::size_t closed = 0;
    while (true) {
        double gap = next_gap(b, rng);
        if (inside) {
            const double to_close = (x - level) / d;
            if (to_close <= gap) {
                path.drift(to_close, -d);
                x = level;
                gap -= to_close;
                inside = false;
                if (++closed == wanted) return path.build();
            }
        }
        if (gap == kInf) throw DomainError("no jumps: the excursion count is never reached");
        path.drift(gap, -d);
        x -= d * gap;
        const double jump = m.jumps().sample(rng.engine());
        if (!inside) {
            inside = true;
            level = x;
        }
        path.jump(jump);
        x += jump;
        budget.tick();
    }
}

GridPath sample_path_grid(const LevyModel& m, double h, double horizon, RngStream& rng,
                          double start) {
    if (!(h > 0.0) || horizon < 0.0) throw DomainError("grid simulation needs h > 0, horizon ≥ 0");
    const auto n = static_cast<std::size_t>(std::llround(horizon / h));
    const double drift = m.path_drift() * h;
    const double vol = std::sqrt(2.0 * m.beta() * h);
    const double rate = m.jumps().mass() * h;
    std::vector<double> v(n + 1);
    v[0] = start;
    for (std::size_t k = 0; k < n; ++k) {
        double x = v[k] + drift;
        if (vol > 0.0) x += vol * rng.normal();
        for (std::uint64_t j = rng.poisson(rate); j > 0; --j) x += m.jumps().sample(rng.engine());
        v[k + 1] = x;
    }
    return GridPath(h, std::move(v));
}

std::optional<double> first_passage_below(const EventPath& p, double level) {
    if (p.x0() <= level) return 0.0;
    const auto& segs = p.segments();
    const auto& knots = p.knots();
    for (std::size_t i = 0; i < segs.size(); ++i) {
        const double from = p.value_after_knot(i);
        const double to = from + segs[i].slope * segs[i].duration;
        if (from <= level) return knots[i];
        if (to <= level) {
            const double dt = (from - level) / (-segs[i].slope);
            return std::min(knots[i] + dt, knots[i + 1]);
        }
    }
    return std::nullopt;
}

std::optional<double> first_passage_below(const GridPath& p, double level) {
    const auto& v = p.values();
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (v[k] <= level) return p.h() * static_cast<double>(k);
    }
    return std::nullopt;
}

std::optional<double> first_passage(const EventPath& p, double x) {
    return first_passage_below(p, -x);
}

std::optional<double> first_passage(const GridPath& p, double x) {
    return first_passage_below(p, -x);
}

std::optional<double> first_passage(const Path& p, double x) {
    return std::visit([x](const auto& q) { return first_passage(q, x); }, p);
}

const EventPath& Excursion::event_path() const {
    if (const auto* e = std::get_if<EventPath>(&path)) return *e;
    throw DomainError("excursion was extracted from a grid path");
}

std::vector<Excursion> extract_excursions(const EventPath& p) {
    require_descending(p);
    std::vector<Excursion> out;
    const double origin = p.start_value();
    double x = origin;
    double t = 0.0;
    bool inside = false;
    double level = origin;
    double opened = 0.0;
    PathBuilder exc;

    const auto on_jump = [&](double jump) {
        if (jump <= 0.0) return;
        if (!inside) {
            inside = true;
            level = x;
            opened = t;
            exc = PathBuilder(0.0);
        }
        exc.jump(jump);
        x += jump;
    };
    const auto close = [&](bool terminated) {
        Excursion e;
        e.path = exc.build(JumpSign::Upward, terminated || p.finite());
        e.kind = ExcursionKind::AboveInfimum;
        e.start_local_time = origin - level;
        e.start_time = opened;
        e.level = level;
        e.terminated = terminated;
        out.push_back(std::move(e));
        inside = false;
    };

    on_jump(p.initial_jump());
    for (const Segment& s : p.segments()) {
        double remaining = s.duration;
        while (remaining > 0.0) {
            if (inside) {
                const double to_close = (x - level) / (-s.slope);
                if (to_close <= remaining + time_tol(t)) {
                    const double dt = std::min(to_close, remaining);
                    exc.drift(dt, s.slope);
                    close(true);
                    x = level;
                    t += dt;
                    remaining -= dt;
                    if (remaining <= time_tol(t)) remaining = 0.0;
                    continue;
                }
                exc.drift(remaining, s.slope);
            }
            x += s.slope * remaining;
            t += remaining;
            remaining = 0.0;
        }
        on_jump(s.end_jump);
    }
    if (inside) close(false);
    return out;
}

std::vector<Excursion> extract_excursions(const GridPath& p) {
    std::vector<Excursion> out;
    const auto& v = p.values();
    const double origin = v.front();
    double inf = origin;
    std::size_t opened = 0;
    std::vector<double> run{0.0};
    double run_level = inf;

    const auto emit = [&](bool terminated) {
        Excursion e;
        e.path = GridPath(p.h(), run);
        e.kind = ExcursionKind::AboveInfimum;
        e.start_local_time = origin - run_level;
        e.start_time = p.h() * static_cast<double>(opened);
        e.level = run_level;
        e.terminated = terminated;
        e.approximate = true;
        out.push_back(std::move(e));
    };

    for (std::size_t k = 1; k < v.size(); ++k) {
        if (v[k] <= inf) {
            if (run.size() > 1) {
                run.push_back(0.0);
                emit(true);
            }
            inf = v[k];
            run.assign(1, 0.0);
            opened = k;
            run_level = inf;
        } else {
            run.push_back(v[k] - inf);
        }
    }
    if (run.size() > 1) emit(false);
    return out;
}

std::vector<Excursion> extract_excursions(const Path& p) {
    return std::visit([](const auto& q) { return extract_excursions(q); }, p);
}

std::vector<Excursion> extract_sup_excursions(const EventPath& p) {
    require_descending(p);
    std::vector<Excursion> out;
    const double origin = p.start_value();
    double x = p.x0();
    double sup = std::max(origin, x);
    double t = 0.0;
    double opened = 0.0;
    PathBuilder exc(0.0);

    const auto close = [&](bool terminated) {
        Excursion e;
        e.path = exc.build(JumpSign::Upward, terminated || p.finite());
        e.kind = ExcursionKind::BelowSupremum;
        e.start_local_time = sup - origin;
        e.start_time = opened;
        e.level = sup;
        e.terminated = terminated;
        out.push_back(std::move(e));
    };

    for (const Segment& s : p.segments()) {
        exc.drift(s.duration, s.slope);
        x += s.slope * s.duration;
        t += s.duration;
        if (s.end_jump <= 0.0) continue;
        exc.jump(s.end_jump);
        x += s.end_jump;
        if (x >= sup - kPathTol * std::max(1.0, std::abs(sup))) {
            close(true);
            sup = std::max(sup, x);
            opened = t;
            exc = PathBuilder(0.0);
        }
    }
    if (exc.segment_count() > 0) close(false);
    return out;
}

bool satisfies(const Path& p, const ExcursionCondition& c) {
    if (std::holds_alternative<AnyExcursion>(c)) return true;
    if (const auto* l = std::get_if<LifetimeAtLeast>(&c)) return lifetime(p) >= l->delta;
    const double height = std::visit([](const auto& q) { return q.sup(); }, p);
    return height >= std::get<HeightAtLeast>(c).height;
}

namespace {

Excursion sample_grid_excursion(const LevyModel& m, double delta, RngStream& rng,
                                 const ExcursionOptions& options) {
    Budget budget(options.limits);
    const double h = options.grid_h;
    const double drift = m.path_drift() * h;
    const double vol = std::sqrt(2.0 * m.beta() * h);
    const double rate = m.jumps().mass() * h;
    const auto min_steps = static_cast<std::size_t>(std::ceil(delta / h - 1e-9));
    double local_time = 0.0;
    double reflected = 0.0;
    std::vector<double> run{0.0};
    while (true) {
        double step = drift + vol * rng.normal();
        for (std::uint64_t j = rng.poisson(rate); j > 0; --j) step += m.jumps().sample(rng.engine());
        budget.tick();
        const double next = reflected + step;
        if (next > 0.0) {
            run.push_back(next);
            reflected = next;
            continue;
        }
        if (run.size() > 1) {
            run.push_back(0.0);
            if (run.size() - 1 >= min_steps) {
                Excursion e;
                e.path = GridPath(h, std::move(run));
                e.start_local_time = local_time;
                e.approximate = true;
                return e;
            }
        }
        local_time += -next;
        reflected = 0.0;
        run.assign(1, 0.0);
    }
}

}  // namespace

Excursion sample_excursion(const LevyModel& m, const ExcursionCondition& condition, RngStream& rng,
                           const ExcursionOptions& options) {
    if (m.slope_at_zero() < -1e-12) {
        throw DomainError("excursion sampling needs a (sub)critical model, ψ'(0+) ≥ 0");
    }
    if (!m.finite_variation()) {
        const auto* l = std::get_if<LifetimeAtLeast>(&condition);
        if (l == nullptr || !(l->delta > 0.0)) {
            throw UnsupportedModel(
                "models with a Gaussian part only support the lifetime-at-least condition");
        }
        return sample_grid_excursion(m, l->delta, rng, options);
    }
    Budget budget(options.limits);
    while (true) {
        const EventPath p = sample_path_fv(m, ExcursionCount{1}, rng, 0.0, options.limits);
        std::vector<Excursion> found = extract_excursions(p);
        Excursion& e = found.front();
        if (satisfies(e.path, condition)) return std::move(e);
        budget.tick();
        budget.check_clock();
    }
}

bool two_sided_exit(const LevyModel& m, double x, double a, RngStream& rng,
                    const SimLimits& limits) {
    if (!(x > 0.0) || !(x < a)) throw DomainError("two-sided exit needs 0 < x < a");
    const double d = drift_or_throw(m);
    const double b = m.jumps().mass();
    Budget budget(limits);
    while (true) {
        const double gap = next_gap(b, rng);
        if (x - d * gap <= 0.0) return true;
        x -= d * gap;
        x += m.jumps().sample(rng.engine());
        if (x > a) return false;
        budget.tick();
    }
}

EventPath sample_sup_excursion_to_depth(const LevyModel& m, double x, RngStream& rng,
                                        const SimLimits& limits) {
    if (!(x > 0.0)) throw DomainError("depth must be positive");
    const double d = drift_or_throw(m);
    const double b = m.jumps().mass();
    Budget budget(limits);
    PathBuilder exc(0.0);
    // Position relative to the running supremum.
    double below = 0.0;
    while (true) {
        const double gap = next_gap(b, rng);
        if (below - d * gap <= -x) {
            exc.drift((below + x) / d, -d);
            return exc.build();
        }
        exc.drift(gap, -d);
        below -= d * gap;
        const double jump = m.jumps().sample(rng.engine());
        if (below + jump >= 0.0) {
            exc = PathBuilder(0.0);
            below = 0.0;
        } else {
            exc.jump(jump);
            below += jump;
        }
        budget.tick();
    }
}

}  // namespace splp
