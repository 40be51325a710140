#include "splp/excursion_ops.hpp"
#include "splp/simulate.hpp"
#include "splp/splitting_tree.hpp"
#include "splp/stats.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

using namespace splp;

namespace {

/// Root of lifespan 1 with one child born at 0.5, lifespan 0.75.
SplittingTree example_tree() {
    return SplittingTree({{0, std::nullopt, 0.0, 1.0}, {1, 0, 0.5, 0.75}});
}

SplittingTree root_only(double c) { return SplittingTree({{0, std::nullopt, 0.0, c}}); }

/// Population size at t counted straight from the node list (births count at t, deaths do not).
int alive_oracle(const SplittingTree& t, double s) {
    int n = 0;
    for (const TreeNode& v : t.nodes()) n += (v.birth <= s && s < v.death()) ? 1 : 0;
    return n;
}

std::vector<double> sorted(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return v;
}

}  // namespace

TEST_CASE("example tree: width process") {
    const WidthProcess w = width_process(example_tree());
    CHECK(w.value(0.0) == 1);
    CHECK(w.value(0.3) == 1);
    CHECK(w.value(0.5) == 2);
    CHECK(w.value(0.9) == 2);
    CHECK(w.value(1.0) == 1);
    CHECK(w.value(1.2) == 1);
    CHECK(w.value(1.25) == 0);
    CHECK(w.value(7.0) == 0);
    CHECK(w.left_limit(1.0) == 2);
    CHECK(w.extinction_time() == doctest::Approx(1.25));
    CHECK(example_tree().extinction_time() == doctest::Approx(1.25));
    CHECK(w.integral() == doctest::Approx(1.75));
    // ∫ t ξ_t dt = ∫_0^1 t dt + ∫_0.5^1.25 t dt.
    CHECK(w.time_weighted_integral() == doctest::Approx(0.5 + 0.5 * (1.25 * 1.25 - 0.25)));
}

TEST_CASE("example tree: contour") {
    const EventPath c = jccp(example_tree());
    CHECK(approx_equal(c, EventPath(1.0, 1.0, {{0.5, -1.0, 0.75}, {1.25, -1.0, 0.0}})));
    CHECK(c.lifetime() == doctest::Approx(1.75));
    const LocalTimeProfile p = local_time_fv(c);
    CHECK(p.count_at(0.25) == 1);
    CHECK(p.count_at(0.75) == 2);
    CHECK(p.count_at(1.1) == 1);
    CHECK(contour_width_identity(example_tree()));
}

TEST_CASE("root-only tree") {
    const SplittingTree t = root_only(0.8);
    const WidthProcess w = width_process(t);
    CHECK(w.value(0.5) == 1);
    CHECK(w.extinction_time() == doctest::Approx(0.8));
    CHECK(approx_equal(jccp(t), EventPath(0.8, 0.8, {{0.8, -1.0, 0.0}})));
    CHECK(contour_width_identity(t));

    RngStream rng(1, 0);
    const SplittingTree s = sample_tree(JumpSpec::exponential(1e-12, 2.0), 0.8, rng);
    CHECK(s.size() == 1);
    CHECK(s.extinction_time() == doctest::Approx(0.8));
}

TEST_CASE("tree validation") {
    CHECK_THROWS_AS(SplittingTree({{0, std::nullopt, 0.0, 1.0}, {1, 0, 1.5, 0.5}}), DomainError);
    CHECK_THROWS_AS(SplittingTree({{0, std::nullopt, 0.0, -1.0}}), DomainError);
    CHECK_THROWS_AS(SplittingTree({{0, std::nullopt, 0.5, 1.0}}), DomainError);
}

TEST_CASE("width reversal") {
    const WidthProcess r = reverse(width_process(example_tree()));
    CHECK(r.value(0.1) == 1);
    CHECK(r.value(0.25) == 2);
    CHECK(r.value(0.6) == 2);
    CHECK(r.value(0.75) == 1);
    CHECK(r.value(1.2) == 1);
    CHECK(r.extinction_time() == doctest::Approx(1.25));
}

TEST_CASE("sampling is deterministic per stream") {
    RngStream a(3, 1);
    RngStream b(3, 1);
    const SplittingTree ta = sample_tree(JumpSpec::exponential(1.0, 2.0), std::nullopt, a);
    const SplittingTree tb = sample_tree(JumpSpec::exponential(1.0, 2.0), std::nullopt, b);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) {
        CHECK(ta.nodes()[i].birth == tb.nodes()[i].birth);
        CHECK(ta.nodes()[i].lifespan == tb.nodes()[i].lifespan);
    }
}

TEST_CASE("mean progeny of the subcritical exponential tree is 1/(1-m)") {
    RngStream rng(4, 0);
    const int n = 40000;
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < n; ++i) {
        const double k = static_cast<double>(sample_tree(JumpSpec::exponential(1.0, 2.0), std::nullopt, rng).size());
        sum += k;
        sq += k * k;
    }
    const double mean = sum / n;
    const double se = std::sqrt((sq / n - mean * mean) / n);
    CHECK(std::abs(mean - 2.0) < 3.0 * se);
}

TEST_CASE("supercritical trees hit the caps") {
    RngStream rng(5, 0);
    TreeCaps caps;
    caps.max_nodes = 100;
    bool truncated = false;
    for (int i = 0; i < 50 && !truncated; ++i) {
        try {
            sample_tree(JumpSpec::exponential(6.0, 2.0), 5.0, rng, caps);
        } catch (const TruncationError& e) {
            truncated = true;
            CHECK(e.partial().size() >= 1);
            CHECK(e.partial().size() <= caps.max_nodes + 1);
        }
    }
    CHECK(truncated);
}

TEST_CASE("property: width, contour and tree bookkeeping agree") {
    std::mt19937_64 g(6);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    RngStream rng(6, 0);
    for (int rep = 0; rep < 2000; ++rep) {
        const JumpSpec spec = rep % 3 == 0 ? JumpSpec::dirac(0.6, 0.5 + u(g))
                                           : JumpSpec::exponential(0.3 + 0.6 * u(g), 1.0 + u(g));
        const SplittingTree t = sample_tree(spec, std::nullopt, rng);
        const WidthProcess w = width_process(t);
        CHECK(w.integral() == doctest::Approx(t.total_length()).epsilon(1e-10));
        CHECK(w.extinction_time() == doctest::Approx(t.extinction_time()));
        for (int k = 0; k < 10; ++k) {
            const double s = u(g) * t.extinction_time();
            CHECK(w.value(s) == alive_oracle(t, s));
        }

        const EventPath c = jccp(t);
        CHECK(c.lifetime() == doctest::Approx(t.total_length()).epsilon(1e-10));
        std::vector<double> spans;
        for (const TreeNode& v : t.nodes()) spans.push_back(v.lifespan);
        const auto js = sorted(c.jumps());
        const auto ls = sorted(spans);
        REQUIRE(js.size() == ls.size());
        for (std::size_t i = 0; i < js.size(); ++i) CHECK(js[i] == doctest::Approx(ls[i]));
        for (const Segment& s : c.segments()) CHECK(s.slope == -1.0);

        const WidthProcess r = reverse(reverse(w));
        for (int k = 0; k < 10; ++k) {
            const double s = u(g) * t.extinction_time();
            CHECK(r.value(s) == w.value(s));
        }
    }
}

TEST_CASE("property: contour crossing counts equal the width on 10^4 trees") {
    RngStream rng(7, 0);
    std::size_t failures = 0;
    for (int rep = 0; rep < 10000; ++rep) {
        const JumpSpec spec = rep % 2 == 0 ? JumpSpec::exponential(1.0, 2.0) : JumpSpec::exponential(0.8, 1.0);
        if (!contour_width_identity(sample_tree(spec, std::nullopt, rng))) ++failures;
    }
    CHECK(failures == 0);
}

TEST_CASE("contour of a tree with given root lifespan has the law of the killed process") {
    const JumpSpec spec = JumpSpec::exponential(1.0, 2.0);
    const LevyModel model = LevyModel::from_drift(1.0, spec);
    const double x = 1.0;
    const std::size_t n = 4000;
    RngStream tree_rng(8, 0);
    RngStream path_rng(8, 1);
    std::vector<double> va, vb, ha, hb, ka, kb;
    for (std::size_t i = 0; i < n; ++i) {
        const EventPath c = jccp(sample_tree(spec, x, tree_rng));
        va.push_back(c.lifetime());
        ha.push_back(c.sup());
        ka.push_back(static_cast<double>(c.jumps().size() - 1));

        const EventPath p = sample_path_fv(model, FirstPassage{0.0}, path_rng, x);
        vb.push_back(p.lifetime());
        hb.push_back(p.sup());
        kb.push_back(static_cast<double>(p.jumps().size()));
    }
    RngStream perm(8, 2);
    CHECK(two_sample_test(va, vb, false, perm).p_value > 0.001);
    CHECK(two_sample_test(ha, hb, false, perm).p_value > 0.001);
    CHECK(two_sample_test(ka, kb, true, perm).p_value > 0.001);
}

TEST_CASE("mean width at time 1 grows with the mean offspring number") {
    RngStream rng(9, 0);
    double prev = -1.0;
    for (double b : {0.5, 1.0, 1.5}) {
        double sum = 0.0;
        const int n = 20000;
        for (int i = 0; i < n; ++i) sum += width_process(sample_tree(JumpSpec::exponential(b, 2.0), std::nullopt, rng)).value(1.0);
        const double mean = sum / n;
        CAPTURE(b);
        CHECK(mean > prev);
        prev = mean;
    }
}
