#include "splp/excursion_ops.hpp"
#include "splp/simulate.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace splp;

namespace {

const LevyModel kBd = LevyModel::from_drift(1.0, JumpSpec::exponential(1.0, 2.0));

/// {start 0; (1,-1,+2); (4,-1,0)}: 0 -> -1, jump to +1, down to -3.
EventPath two_segment() { return EventPath::starting_at(0.0, {{1.0, -1.0, 2.0}, {4.0, -1.0, 0.0}}); }

struct Moments {
    double mean = 0.0;
    double var = 0.0;
};

Moments moments(const std::vector<double>& xs) {
    Moments m;
    for (double x : xs) m.mean += x;
    m.mean /= static_cast<double>(xs.size());
    for (double x : xs) m.var += (x - m.mean) * (x - m.mean);
    m.var /= static_cast<double>(xs.size() - 1);
    return m;
}

/// Rebuilds a path started at 0 from its excursions and the drift stretches between them.
EventPath reassemble(const std::vector<Excursion>& excursions, double d, double lifetime) {
    PathBuilder b(0.0);
    double t = 0.0;
    for (const Excursion& e : excursions) {
        b.drift(e.start_time - t, -d);
        const EventPath& p = e.event_path();
        b.jump(p.initial_jump());
        for (const Segment& s : p.segments()) {
            b.drift(s.duration, s.slope);
            b.jump(s.end_jump);
        }
        t = e.start_time + p.lifetime();
    }
    b.drift(lifetime - t, -d);
    return b.build();
}

}  // namespace

TEST_CASE("null jumps give a deterministic ramp") {
    RngStream rng(1, 0);
    const EventPath p = sample_path_fv(LevyModel::from_drift(1.0, JumpSpec::null()), Horizon{3.0}, rng);
    CHECK(p.lifetime() == doctest::Approx(3.0));
    CHECK(p.segments().size() == 1);
    CHECK(p.evaluate(3.0) == doctest::Approx(-3.0));
    CHECK(p.jumps().empty());
}

TEST_CASE("same stream, same path") {
    RngStream a(42, 3);
    RngStream b(42, 3);
    const EventPath pa = sample_path_fv(kBd, Horizon{20.0}, a);
    const EventPath pb = sample_path_fv(kBd, Horizon{20.0}, b);
    REQUIRE(pa.segments().size() == pb.segments().size());
    for (std::size_t i = 0; i < pa.segments().size(); ++i) {
        CHECK(pa.segments()[i].duration == pb.segments()[i].duration);
        CHECK(pa.segments()[i].end_jump == pb.segments()[i].end_jump);
    }
    RngStream c(42, 4);
    CHECK_FALSE(approx_equal(pa, sample_path_fv(kBd, Horizon{20.0}, c)));
}

TEST_CASE("mean first passage time is L / psi'(0+)") {
    RngStream rng(5, 0);
    const double level = 1.0;
    std::vector<double> times;
    for (int i = 0; i < 20000; ++i) {
        const EventPath p = sample_path_fv(kBd, FirstPassage{-level}, rng);
        CHECK(p.end_value() == doctest::Approx(-level));
        times.push_back(p.lifetime());
    }
    const Moments m = moments(times);
    const double se = std::sqrt(m.var / static_cast<double>(times.size()));
    CHECK(std::abs(m.mean - level / kBd.slope_at_zero()) < 3.0 * se);
}

TEST_CASE("grid scheme has the right mean and variance") {
    const LevyModel m(0.5, 1.0, JumpSpec::null());
    const double h = 0.01;
    const double horizon = 1.0;
    RngStream rng(6, 0);
    std::vector<double> ends;
    std::vector<double> first_increments;
    for (int i = 0; i < 20000; ++i) {
        const GridPath g = sample_path_grid(m, h, horizon, rng);
        ends.push_back(g.values().back());
        first_increments.push_back(g.values()[1] - g.values()[0]);
    }
    const Moments e = moments(ends);
    CHECK(std::abs(e.mean + 0.5 * horizon) < 3.0 * std::sqrt(e.var / ends.size()));
    CHECK(e.var == doctest::Approx(2.0 * horizon).epsilon(0.05));
    const Moments inc = moments(first_increments);
    CHECK(inc.var == doctest::Approx(2.0 * h).epsilon(0.05));
}

TEST_CASE("first passage examples") {
    const EventPath ramp = EventPath::starting_at(0.0, {{3.0, -1.0, 0.0}});
    CHECK(*first_passage(ramp, 1.5) == doctest::Approx(1.5));
    CHECK(*first_passage(two_segment(), 2.0) == doctest::Approx(4.0));
    CHECK_FALSE(first_passage(ramp, 5.0).has_value());
    const GridPath g(0.5, {0.0, -0.4, -1.2, 0.3});
    CHECK(*first_passage(g, 1.0) == doctest::Approx(1.0));
    CHECK_FALSE(first_passage(g, 2.0).has_value());
}

TEST_CASE("excursion extraction examples") {
    const auto ex = extract_excursions(two_segment());
    REQUIRE(ex.size() == 1);
    const EventPath& e = ex[0].event_path();
    CHECK(ex[0].start_time == doctest::Approx(1.0));
    CHECK(ex[0].start_local_time == doctest::Approx(1.0));
    CHECK(ex[0].terminated);
    CHECK(e.initial_jump() == doctest::Approx(2.0));
    CHECK(e.lifetime() == doctest::Approx(2.0));
    CHECK(e.end_value() == doctest::Approx(0.0));

    CHECK(extract_excursions(EventPath::starting_at(0.0, {{3.0, -1.0, 0.0}})).empty());

    // A second jump inside the first excursion stays inside it.
    const EventPath nested = EventPath::starting_at(0.0, {{1.0, -1.0, 2.0}, {1.0, -1.0, 1.0}, {4.0, -1.0, 0.0}});
    const auto en = extract_excursions(nested);
    REQUIRE(en.size() == 1);
    CHECK(en[0].event_path().jumps().size() == 2);
    CHECK(en[0].event_path().lifetime() == doctest::Approx(3.0));
}

TEST_CASE("grid extraction is flagged approximate") {
    const GridPath g(0.5, {0.0, 1.0, 0.5, -0.5, -1.0});
    const auto ex = extract_excursions(g);
    REQUIRE(ex.size() == 1);
    CHECK(ex[0].approximate);
    CHECK(ex[0].terminated);
    CHECK(std::get<GridPath>(ex[0].path).values() == std::vector<double>{0.0, 1.0, 0.5, 0.0});
}

TEST_CASE("supremum excursion examples") {
    const auto ramp = extract_sup_excursions(EventPath::starting_at(0.0, {{3.0, -1.0, 0.0}}));
    REQUIRE(ramp.size() == 1);
    CHECK_FALSE(ramp[0].terminated);
    CHECK(approx_equal(ramp[0].event_path(), EventPath::starting_at(0.0, {{3.0, -1.0, 0.0}})));

    const auto ex = extract_sup_excursions(two_segment());
    REQUIRE(ex.size() == 2);
    const EventPath& e = ex[0].event_path();
    CHECK(ex[0].terminated);
    CHECK(e.lifetime() == doctest::Approx(1.0));
    CHECK(e.left_limit(1.0) == doctest::Approx(-1.0));
    CHECK(e.final_jump() == doctest::Approx(2.0));
    CHECK(*first_passage(e, 0.5) == doctest::Approx(0.5));
    const TimeValue n = nu(e);
    CHECK(n.time == doctest::Approx(1.0));
    CHECK(n.value == doctest::Approx(1.0));
    CHECK_FALSE(ex[1].terminated);
    CHECK(ex[1].start_time == doctest::Approx(1.0));
}

TEST_CASE("property: excursions and drift stretches rebuild the path") {
    RngStream rng(8, 0);
    for (int rep = 0; rep < 300; ++rep) {
        const EventPath p = sample_path_fv(kBd, FirstPassage{-3.0}, rng);
        const auto ex = extract_excursions(p);
        CHECK(approx_equal(reassemble(ex, 1.0, p.lifetime()), p, 1e-9));

        double prev_local = 0.0;
        double prev_end = 0.0;
        for (std::size_t i = 0; i < ex.size(); ++i) {
            const EventPath& e = ex[i].event_path();
            CHECK(ex[i].terminated);
            CHECK(ex[i].start_local_time == doctest::Approx(-ex[i].level));
            if (i > 0) CHECK(ex[i].start_local_time > prev_local);
            // Drift d = 1 at the infimum: elapsed time equals the gained local time.
            CHECK(ex[i].start_time - prev_end == doctest::Approx(ex[i].start_local_time - prev_local));
            CHECK(e.x0() > 0.0);
            CHECK(std::abs(e.end_value()) < 1e-9);
            CHECK(e.inf() > -1e-9);
            prev_local = ex[i].start_local_time;
            prev_end = ex[i].start_time + e.lifetime();
        }
    }
}

TEST_CASE("sample_excursion honours its condition") {
    RngStream rng(9, 0);
    const LevyModel dirac = LevyModel::from_drift(1.0, JumpSpec::dirac(0.5, 0.7));
    for (int i = 0; i < 200; ++i) {
        CHECK(sample_excursion(dirac, AnyExcursion{}, rng).event_path().x0() == doctest::Approx(0.7));
    }
    double total = 0.0;
    for (int i = 0; i < 500; ++i) {
        const Excursion e = sample_excursion(kBd, HeightAtLeast{1.0}, rng);
        CHECK(e.event_path().sup() >= 1.0);
        const Excursion f = sample_excursion(kBd, LifetimeAtLeast{2.0}, rng);
        CHECK(f.event_path().lifetime() >= 2.0);
        total += f.event_path().lifetime();
    }
    CHECK(total / 500.0 > 2.0);

    // Under n(. | Any) the opening jump is a plain draw from Π / b: mean 1/θ.
    std::vector<double> first;
    for (int i = 0; i < 20000; ++i) first.push_back(sample_excursion(kBd, AnyExcursion{}, rng).event_path().x0());
    const Moments m = moments(first);
    CHECK(std::abs(m.mean - 0.5) < 3.0 * std::sqrt(m.var / first.size()));
}

TEST_CASE("sample_excursion rejects bad inputs") {
    RngStream rng(10, 0);
    const LevyModel super = LevyModel::from_drift(1.0, JumpSpec::exponential(3.0, 2.0));
    CHECK_THROWS_AS(sample_excursion(super, AnyExcursion{}, rng), DomainError);
    const LevyModel bm(0.0, 1.0, JumpSpec::null());
    CHECK_THROWS_AS(sample_excursion(bm, AnyExcursion{}, rng), UnsupportedModel);
    ExcursionOptions opt;
    opt.grid_h = 1e-3;
    const Excursion e = sample_excursion(bm, LifetimeAtLeast{0.05}, rng, opt);
    CHECK(e.approximate);
    CHECK(lifetime(e.path) >= 0.05);
}

TEST_CASE("event cap raises a resource error") {
    RngStream rng(11, 0);
    SimLimits tiny;
    tiny.max_events = 5;
    CHECK_THROWS_AS(sample_path_fv(kBd, Horizon{1000.0}, rng, 0.0, tiny), ResourceCapError);
}

TEST_CASE("two-sided exit frequency matches W(a-x)/W(a)") {
    RngStream rng(12, 0);
    const int n = 20000;
    int hits = 0;
    for (int i = 0; i < n; ++i) hits += two_sided_exit(kBd, 1.0, 2.0, rng) ? 1 : 0;
    const double p = (2.0 - std::exp(-1.0)) / (2.0 - std::exp(-2.0));
    const double se = std::sqrt(p * (1.0 - p) / n);
    CHECK(std::abs(static_cast<double>(hits) / n - p) < 3.0 * se);
}

TEST_CASE("supremum excursion killed at depth x") {
    RngStream rng(13, 0);
    for (int i = 0; i < 500; ++i) {
        const EventPath e = sample_sup_excursion_to_depth(kBd, 0.5, rng);
        CHECK(e.end_value() == doctest::Approx(-0.5));
        CHECK(e.sup() <= 1e-12);
        CHECK(*first_passage(e, 0.5) == doctest::Approx(e.lifetime()));
        CHECK(nu(e).time == doctest::Approx(e.lifetime()));
    }
}
