#include "splp/verify.hpp"

#include <doctest.h>

#include <cmath>

using namespace splp;

namespace {

EventPath two_jump() { return EventPath(1.0, 1.0, {{0.5, -1.0, 2.0}, {2.5, -1.0, 0.0}}); }

WidthProcess example_width() {
    return width_process(SplittingTree({{0, std::nullopt, 0.0, 1.0}, {1, 0, 0.5, 0.75}}));
}

double eval(const std::string& name, const Sample& s) { return evaluate(parse_functional(name), s); }

SuiteConfig small(std::size_t n) {
    SuiteConfig c;
    c.n = n;
    c.permutations = 500;
    return c;
}

bool same_reports(const SuiteResult& a, const SuiteResult& b) {
    if (a.reports.size() != b.reports.size()) return false;
    for (std::size_t i = 0; i < a.reports.size(); ++i) {
        if (a.reports[i].statistic != b.reports[i].statistic) return false;
        if (a.reports[i].p_value != b.reports[i].p_value) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("functional names parse and print") {
    CHECK(parse_functional("area").kind == Functional::Kind::Area);
    const Functional f = parse_functional("value_at_fraction(0.3)");
    CHECK(f.kind == Functional::Kind::ValueAtFraction);
    CHECK(f.q == doctest::Approx(0.3));
    CHECK(f.name() == "value_at_fraction(0.3)");
    CHECK(parse_functional(f.name()).q == f.q);
    CHECK_THROWS(parse_functional("area(0.3)"));
    CHECK_THROWS(parse_functional("value_at_fraction"));
    CHECK_THROWS(parse_functional("value_at_fraction(1.5)"));
    CHECK_THROWS(parse_functional("value_at_fraction(abc)"));
    CHECK_THROWS(parse_functional("nope"));
    CHECK(functional_names().size() == 11);

    CHECK(parse_functional("jump_count").discrete());
    CHECK(parse_functional("loctime_at_fraction(0.2)").discrete());
    CHECK(parse_functional("width_at_fraction(0.2)").discrete());
    CHECK_FALSE(parse_functional("area").discrete());
}

TEST_CASE("functionals on the two-jump excursion") {
    const Sample s = two_jump();
    CHECK(eval("lifetime", s) == doctest::Approx(3.0));
    CHECK(eval("height", s) == doctest::Approx(2.5));
    CHECK(eval("argmax_time", s) == doctest::Approx(0.5));
    CHECK(eval("area", s) == doctest::Approx(0.375 + 3.125));
    CHECK(eval("value_at_fraction(0.5)", s) == doctest::Approx(1.5));
    CHECK(eval("pre_value_at_fraction(0.5)", s) == doctest::Approx(0.75));
    CHECK(eval("jump_count", s) == 2.0);
    CHECK(eval("max_jump", s) == doctest::Approx(2.0));
    CHECK(eval("loctime_at_fraction(0.3)", s) == 2.0);
    CHECK(eval("loctime_at_fraction(0.6)", s) == 1.0);
    CHECK_THROWS_AS(eval("width_at_fraction(0.5)", s), DomainError);
}

TEST_CASE("functionals on a width process") {
    const Sample w = example_width();
    CHECK(eval("lifetime", w) == doctest::Approx(1.25));
    CHECK(eval("height", w) == 2.0);
    CHECK(eval("area", w) == doctest::Approx(1.75));
    CHECK(eval("width_at_fraction(0.5)", w) == 2.0);
    CHECK(eval("width_at_fraction(0.9)", w) == 1.0);
    CHECK(eval("time_weighted_area", w) == doctest::Approx(0.5 + 0.5 * (1.25 * 1.25 - 0.25)));
    CHECK_THROWS_AS(eval("jump_count", w), DomainError);
}

TEST_CASE("suite names") {
    CHECK(all_suites().size() == 8);
    for (SuiteId id : all_suites()) CHECK(parse_suite(to_string(id)) == id);
    CHECK_FALSE(parse_suite("THM2").has_value());
    CHECK(default_model().drift() == doctest::Approx(1.0));
}

TEST_CASE("every suite passes at a small size") {
    for (SuiteId id : all_suites()) {
        if (id == SuiteId::NegControl) continue;
        const SuiteResult r = run_suite(id, small(1500));
        CAPTURE(r.suite);
        CAPTURE(r.first_failure);
        CHECK(r.ok());
        CHECK(r.exactness_failures == 0);
        CHECK(r.conditioning_failures == 0);
        for (const TestReport& t : r.reports) {
            CHECK(t.n_a == 1500);
            CHECK(t.n_b == 1500);
            CHECK(t.p_value >= 0.0);
            CHECK(t.p_value <= 1.0);
        }
    }
}

TEST_CASE("THM1 report layout and exactness counters") {
    const SuiteResult r = run_suite(SuiteId::Thm1, small(800));
    REQUIRE(r.reports.size() == 6);
    CHECK(r.reports[0].functional == "area");
    CHECK(r.reports[5].functional == "loctime_at_fraction(0.25)");
    CHECK(r.reports[3].permutation);
    CHECK(r.reports[0].threshold == doctest::Approx(0.001 / 6.0));
    CHECK(r.exactness_checks == 1600);
}

TEST_CASE("conditioned suites check the conditioning event") {
    SuiteConfig c = small(600);
    c.condition = HeightAtLeast{1.0};
    const SuiteResult r = run_suite(SuiteId::Thm1, c);
    CHECK(r.conditioning_checks == 1200);
    CHECK(r.ok());
    c.condition = LifetimeAtLeast{2.0};
    const SuiteResult s = run_suite(SuiteId::PostSup, c);
    CHECK(s.conditioning_checks == 1200);
    CHECK(s.ok());
}

TEST_CASE("negative control rejects a clearly mismatched model") {
    SuiteConfig c = small(4000);
    c.control_jumps = JumpSpec::exponential(0.3, 2.0);
    const SuiteResult r = run_suite(SuiteId::NegControl, c);
    REQUIRE(r.reports.size() == 2);
    CHECK(r.reports[0].expect_reject);
    CHECK(r.reports[0].p_value < 1e-6);
    CHECK(r.reports[1].informational);
    CHECK(r.ok());
}

TEST_CASE("negative control does not reject two copies of the same model") {
    SuiteConfig c = small(4000);
    c.control_jumps = c.model.jumps();
    const SuiteResult r = run_suite(SuiteId::NegControl, c);
    CHECK_FALSE(r.reports[0].reject);
    CHECK_FALSE(r.ok());
}

TEST_CASE("results do not depend on the thread count") {
    for (SuiteId id : {SuiteId::Thm1, SuiteId::CmjRev, SuiteId::KilledX}) {
        SuiteConfig one = small(700);
        one.threads = 1;
        SuiteConfig four = one;
        four.threads = 4;
        CHECK(same_reports(run_suite(id, one), run_suite(id, four)));
    }
    SuiteConfig c = small(700);
    SuiteConfig other = c;
    other.seed = c.seed + 1;
    CHECK_FALSE(same_reports(run_suite(SuiteId::Thm1, c), run_suite(SuiteId::Thm1, other)));
}

TEST_CASE("null mode compares raw halves") {
    SuiteConfig c = small(800);
    c.null_mode = true;
    for (SuiteId id : {SuiteId::Thm1, SuiteId::LoctimeRev, SuiteId::SupExc}) CHECK(run_suite(id, c).ok());

    const SuiteDraw d = draw_suite_samples(SuiteId::PreSup, c);
    CHECK(d.a.size() == 800);
    CHECK(d.b.size() == 800);
    CHECK_THROWS(draw_suite_samples(SuiteId::PreSup, c, 3));
}

TEST_CASE("null calibration rejection rate at a small size") {
    SuiteConfig c = small(100);
    const CalibrationResult r = calibrate_null(c, 300, 150);
    CHECK(r.repetitions == 300);
    const double sigma = std::sqrt(0.05 * 0.95 / 300.0);
    CAPTURE(r.rate());
    CHECK(std::abs(r.rate() - 0.05) <= 3.3 * sigma);
}
