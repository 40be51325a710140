#include "splp/verify.hpp"

#include "splp/excursion_ops.hpp"
#include "splp/parallel.hpp"
#include "splp/stats.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace splp {

// ---------------------------------------------------------------- functionals

namespace {

struct FunctionalName {
    Functional::Kind kind;
    const char* name;
    bool takes_q;
};

constexpr FunctionalName kFunctionalNames[] = {
    {Functional::Kind::Lifetime, "lifetime", false},
    {Functional::Kind::Height, "height", false},
    {Functional::Kind::ArgmaxTime, "argmax_time", false},
    {Functional::Kind::Area, "area", false},
    {Functional::Kind::ValueAtFraction, "value_at_fraction", true},
    {Functional::Kind::PreValueAtFraction, "pre_value_at_fraction", true},
    {Functional::Kind::JumpCount, "jump_count", false},
    {Functional::Kind::MaxJump, "max_jump", false},
    {Functional::Kind::LoctimeAtFraction, "loctime_at_fraction", true},
    {Functional::Kind::WidthAtFraction, "width_at_fraction", true},
    {Functional::Kind::TimeWeightedArea, "time_weighted_area", false},
};

const FunctionalName& entry(Functional::Kind k) {
    for (const auto& e : kFunctionalNames) {
        if (e.kind == k) return e;
    }
    throw std::logic_error("unknown functional kind");
}

std::string format_q(double q) {
    std::ostringstream os;
    os << q;
    return os.str();
}

}  // namespace

std::string Functional::name() const {
    const FunctionalName& e = entry(kind);
    if (!e.takes_q) return e.name;
    return std::string(e.name) + "(" + format_q(q) + ")";
}

bool Functional::discrete() const {
    return kind == Kind::JumpCount || kind == Kind::LoctimeAtFraction ||
           kind == Kind::WidthAtFraction;
}

Functional parse_functional(const std::string& name) {
    const auto open = name.find('(');
    const std::string base = name.substr(0, open);
    for (const auto& e : kFunctionalNames) {
        if (base != e.name) continue;
        Functional f{e.kind, 0.0};
        if (!e.takes_q) {
            if (open != std::string::npos) throw std::invalid_argument(base + " takes no argument");
            return f;
        }
        if (open == std::string::npos || name.back() != ')') {
            throw std::invalid_argument(base + " needs a fraction, e.g. " + base + "(0.5)");
        }
        std::size_t used = 0;
        const std::string arg = name.substr(open + 1, name.size() - open - 2);
        f.q = std::stod(arg, &used);
        if (used != arg.size() || f.q < 0.0 || f.q > 1.0) {
            throw std::invalid_argument("fraction must be a number in [0, 1]: " + arg);
        }
        return f;
    }
    throw std::invalid_argument("unknown functional: " + name);
}

std::vector<std::string> functional_names() {
    std::vector<std::string> out;
    for (const auto& e : kFunctionalNames) out.emplace_back(e.name);
    return out;
}

namespace {

double evaluate_path(const Functional& f, const EventPath& p) {
    using K = Functional::Kind;
    switch (f.kind) {
        case K::Lifetime:
            return p.lifetime();
        case K::Height:
            return p.sup();
        case K::ArgmaxTime:
            return first_argmax(p).time;
        case K::Area:
            return p.area();
        case K::ValueAtFraction:
            return p.evaluate(f.q * p.lifetime());
        case K::PreValueAtFraction:
            return p.evaluate(f.q * first_argmax(p).time);
        case K::JumpCount:
            return static_cast<double>(p.jumps().size());
        case K::MaxJump: {
            double m = 0.0;
            for (double j : p.jumps()) m = std::max(m, std::abs(j));
            return m;
        }
        case K::LoctimeAtFraction: {
            const double top = p.sup();
            if (!(top > 0.0)) throw DomainError("local time fraction needs a positive supremum");
            return local_time_fv(p).count_at(f.q * top);
        }
        default:
            throw DomainError(f.name() + " is not defined on paths");
    }
}

double evaluate_width(const Functional& f, const WidthProcess& w) {
    using K = Functional::Kind;
    switch (f.kind) {
        case K::Lifetime:
            return w.extinction_time();
        case K::Height:
            return w.values().empty() ? 0.0
                                      : *std::max_element(w.values().begin(), w.values().end());
        case K::Area:
            return w.integral();
        case K::WidthAtFraction:
            return w.value(f.q * w.extinction_time());
        case K::TimeWeightedArea:
            return w.time_weighted_integral();
        default:
            throw DomainError(f.name() + " is not defined on width processes");
    }
}

}  // namespace

double evaluate(const Functional& f, const Sample& s) {
    if (const auto* p = std::get_if<EventPath>(&s)) return evaluate_path(f, *p);
    return evaluate_width(f, std::get<WidthProcess>(s));
}

// --------------------------------------------------------------------- suites

std::string to_string(SuiteId id) {
    switch (id) {
        case SuiteId::Thm1: return "THM1";
        case SuiteId::PreSup: return "PRE_SUP";
        case SuiteId::PostSup: return "POST_SUP";
        case SuiteId::KilledX: return "KILLED_X";
        case SuiteId::LoctimeRev: return "LOCTIME_REV";
        case SuiteId::CmjRev: return "CMJ_REV";
        case SuiteId::SupExc: return "SUP_EXC";
        case SuiteId::NegControl: return "NEG_CONTROL";
    }
    return "?";
}

const std::vector<SuiteId>& all_suites() {
    static const std::vector<SuiteId> ids{SuiteId::Thm1,       SuiteId::PreSup, SuiteId::PostSup,
                                          SuiteId::KilledX,    SuiteId::LoctimeRev,
                                          SuiteId::CmjRev,     SuiteId::SupExc,
                                          SuiteId::NegControl};
    return ids;
}

std::optional<SuiteId> parse_suite(const std::string& name) {
    for (SuiteId id : all_suites()) {
        if (to_string(id) == name) return id;
    }
    return std::nullopt;
}

LevyModel default_model() { return LevyModel::from_drift(1.0, JumpSpec::exponential(1.0, 2.0)); }

bool SuiteResult::ok() const {
    if (exactness_failures > 0 || conditioning_failures > 0) return false;
    for (const TestReport& r : reports) {
        if (r.informational) continue;
        if (r.reject != r.expect_reject) return false;
    }
    return true;
}

namespace {

bool near(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

bool same_jumps(const EventPath& a, const EventPath& b) {
    std::vector<double> ja = a.jumps();
    std::vector<double> jb = b.jumps();
    if (ja.size() != jb.size()) return false;
    std::sort(ja.begin(), ja.end());
    std::sort(jb.begin(), jb.end());
    for (std::size_t i = 0; i < ja.size(); ++i) {
        if (!near(ja[i], jb[i])) return false;
    }
    return true;
}

/// One draw: the untransformed sample, its transform and the outcome of the
/// pathwise checks.
struct Drawn {
    Sample raw;
    Sample transformed;
    std::string exact_failure;  // empty when every exactness check held
    int conditioning = -1;      // -1: no check, 0: failed, 1: held
};

struct Group {
    std::string label;
    std::function<Drawn(RngStream&)> draw;
    /// Set for two-model comparisons: B comes from this draw, A from `draw`, both raw.
    std::function<Drawn(RngStream&)> draw_b;
    std::vector<Functional> functionals;
    bool informational = false;
    bool expect_reject = false;
};

std::uint64_t suite_code(SuiteId id) { return static_cast<std::uint64_t>(id) + 1; }

std::uint64_t stream_base(SuiteId id, std::size_t group, bool side_b) {
    return (suite_code(id) << 48) | (static_cast<std::uint64_t>(group) << 40) |
           (side_b ? (1ULL << 39) : 0ULL);
}

ExcursionOptions excursion_options(const SuiteConfig& c) {
    ExcursionOptions o;
    o.limits = c.limits;
    return o;
}

EventPath draw_excursion(const LevyModel& m, const SuiteConfig& c, RngStream& rng) {
    return sample_excursion(m, c.condition, rng, excursion_options(c)).event_path();
}

int conditioning_check(const SuiteConfig& c, const EventPath& original, const EventPath& image) {
    if (std::holds_alternative<AnyExcursion>(c.condition)) return 1;
    return satisfies(original, c.condition) == satisfies(image, c.condition) ? 1 : 0;
}

std::string chi_exactness(const EventPath& e, const EventPath& x) {
    if (!near(e.lifetime(), x.lifetime())) return "chi changed the lifetime";
    if (!near(e.sup(), x.sup())) return "chi changed the height";
    if (!near(gamma(e).time, gamma(x).time)) return "chi changed the argmax time";
    if (!same_jumps(e, x)) return "chi changed the jump multiset";
    return {};
}

std::string rotation_exactness(const EventPath& p, const EventPath& r) {
    if (!near(p.lifetime(), r.lifetime())) return "rotation changed the lifetime";
    if (!same_jumps(p, r)) return "rotation changed the jump multiset";
    return {};
}

/// Γ(χ'(e), r) = Γ(e, ε_γ - r) at every level strictly between breakpoints.
std::string reflection_exactness(const EventPath& e, const EventPath& reflected) {
    const double h = gamma(e).value;
    const LocalTimeProfile p = local_time_fv(e);
    const LocalTimeProfile q = local_time_fv(reflected);
    std::vector<double> levels = p.breakpoints;
    for (double r : q.breakpoints) levels.push_back(h - r);
    std::sort(levels.begin(), levels.end());
    for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
        if (levels[i + 1] - levels[i] <= 1e-9) continue;
        const double mid = 0.5 * (levels[i] + levels[i + 1]);
        if (mid <= 0.0 || mid >= h) continue;
        if (p.count_at(mid) != q.count_at(h - mid)) return "local time reflection identity failed";
    }
    return {};
}

std::vector<Functional> path_functionals() {
    using K = Functional::Kind;
    return {{K::Area, 0.0}, {K::ValueAtFraction, 0.5}, {K::JumpCount, 0.0}, {K::MaxJump, 0.0}};
}

std::vector<Group> build_groups(SuiteId id, const SuiteConfig& c) {
    using K = Functional::Kind;
    const LevyModel model = c.model;
    std::vector<Group> groups;

    switch (id) {
        case SuiteId::Thm1: {
            Group g;
            g.label = "chi";
            g.functionals = {{K::Area, 0.0},      {K::ValueAtFraction, 0.3},
                             {K::ValueAtFraction, 0.7}, {K::JumpCount, 0.0},
                             {K::MaxJump, 0.0},   {K::LoctimeAtFraction, 0.25}};
            g.draw = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                const EventPath x = chi(e);
                return Drawn{e, x, chi_exactness(e, x), conditioning_check(c, e, x)};
            };
            groups.push_back(std::move(g));
            break;
        }
        case SuiteId::PreSup: {
            Group g;
            g.label = "pre_sup";
            g.functionals = path_functionals();
            g.draw = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                const TimeValue top = gamma(e);
                const EventPath pre = kill(e, top.time);
                const EventPath r = rotate(pre);
                const EventPath whole = concat(r, shift(e, top.time));
                return Drawn{pre, r, rotation_exactness(pre, r), conditioning_check(c, e, whole)};
            };
            groups.push_back(std::move(g));
            break;
        }
        case SuiteId::PostSup: {
            Group g;
            g.label = "post_sup";
            g.functionals = path_functionals();
            g.draw = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                const TimeValue top = gamma(e);
                const EventPath post = shift_centered(e, top.time);
                const EventPath r = rotate(post);
                const EventPath whole = concat(kill(e, top.time), r.translated(top.value));
                std::string failure = rotation_exactness(post, r);
                if (failure.empty() && !near(post.lifetime(), e.lifetime() - top.time)) {
                    failure = "post-supremum lifetime differs from V - gamma";
                }
                return Drawn{post, r, failure, conditioning_check(c, e, whole)};
            };
            groups.push_back(std::move(g));
            break;
        }
        case SuiteId::KilledX: {
            for (double x : c.killed_x) {
                Group g;
                g.label = "x=" + format_q(x);
                g.functionals = path_functionals();
                g.draw = [model, c, x](RngStream& rng) {
                    const EventPath path = sample_path_fv(model, FirstPassage{-x}, rng, 0.0, c.limits);
                    const EventPath post = shift_centered(path, first_argmax(path).time);
                    const EventPath r = rotate(post);
                    return Drawn{post, r, rotation_exactness(post, r), -1};
                };
                groups.push_back(std::move(g));
            }
            break;
        }
        case SuiteId::LoctimeRev: {
            Group g;
            g.label = "chi_prime";
            for (double q : c.loctime_q) g.functionals.push_back({K::LoctimeAtFraction, q});
            g.draw = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                const EventPath r = chi_prime(e);
                return Drawn{e, r, reflection_exactness(e, r), conditioning_check(c, e, chi(e))};
            };
            groups.push_back(std::move(g));
            break;
        }
        case SuiteId::CmjRev: {
            Group g;
            g.label = "reversed_width";
            for (double q : c.cmj_q) g.functionals.push_back({K::WidthAtFraction, q});
            g.functionals.push_back({K::TimeWeightedArea, 0.0});
            const JumpSpec lifespans = model.jumps();
            const TreeCaps caps = c.tree_caps;
            g.draw = [lifespans, caps](RngStream& rng) {
                const SplittingTree tree = sample_tree(lifespans, std::nullopt, rng, caps);
                const WidthProcess w = width_process(tree);
                const WidthProcess r = reverse(w);
                std::string failure;
                if (!near(w.extinction_time(), r.extinction_time()) ||
                    !near(w.integral(), r.integral())) {
                    failure = "reversal changed the extinction time or the total length";
                } else if (!contour_width_identity(tree)) {
                    failure = "contour crossing counts differ from the width process";
                }
                return Drawn{w, r, failure, -1};
            };
            groups.push_back(std::move(g));
            break;
        }
        case SuiteId::SupExc: {
            Group g;
            const double x = c.sup_exc_x;
            g.label = "x=" + format_q(x);
            g.functionals = path_functionals();
            g.draw = [model, c, x](RngStream& rng) {
                const EventPath k = sample_sup_excursion_to_depth(model, x, rng, c.limits);
                const EventPath r = rotate(k);
                std::string failure = rotation_exactness(k, r);
                if (failure.empty() && (!near(r.end_value(), -x) || !near(r.start_value(), 0.0))) {
                    failure = "rotated killed excursion does not run from 0 to -x";
                }
                const double level = -x + 1e-9 * std::max(1.0, x);
                const bool before = first_passage_below(k, level).has_value();
                const bool after = first_passage_below(r, level).has_value();
                return Drawn{k, r, failure, before == after ? 1 : 0};
            };
            groups.push_back(std::move(g));
            break;
        }
        case SuiteId::NegControl: {
            Group g;
            g.label = "model_mismatch";
            g.functionals = {{K::Lifetime, 0.0}};
            g.expect_reject = true;
            const LevyModel alt = LevyModel::from_drift(model.drift(), c.control_jumps);
            g.draw = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                return Drawn{e, e, {}, -1};
            };
            g.draw_b = [alt, c](RngStream& rng) {
                const EventPath e = draw_excursion(alt, c, rng);
                return Drawn{e, e, {}, -1};
            };
            groups.push_back(std::move(g));

            Group h;
            h.label = "pre_vs_post";
            h.functionals = {{K::Area, 0.0}};
            h.informational = true;
            h.draw = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                const EventPath pre = pre_sup(e);
                return Drawn{pre, pre, {}, -1};
            };
            h.draw_b = [model, c](RngStream& rng) {
                const EventPath e = draw_excursion(model, c, rng);
                const EventPath post = shift(e, gamma(e).time);
                return Drawn{post, post, {}, -1};
            };
            groups.push_back(std::move(h));
            break;
        }
    }
    return groups;
}

struct GroupSamples {
    std::vector<Drawn> a;
    std::vector<Drawn> b;
};

GroupSamples draw_group(SuiteId id, std::size_t index, const Group& g, const SuiteConfig& c) {
    const unsigned threads = resolve_threads(c.threads);
    GroupSamples out;
    if (g.draw_b) {
        out.a = generate_blocks<Drawn>(c.n, c.block_size, threads, c.seed,
                                       stream_base(id, index, false), g.draw);
        out.b = generate_blocks<Drawn>(c.n, c.block_size, threads, c.seed,
                                       stream_base(id, index, true), g.draw_b);
        return out;
    }
    std::vector<Drawn> all = generate_blocks<Drawn>(2 * c.n, c.block_size, threads, c.seed,
                                                    stream_base(id, index, false), g.draw);
    out.b.assign(std::make_move_iterator(all.begin() + static_cast<std::ptrdiff_t>(c.n)),
                 std::make_move_iterator(all.end()));
    all.resize(c.n);
    out.a = std::move(all);
    return out;
}

const Sample& side_a(const Drawn& d, const Group& g, const SuiteConfig& c) {
    return (c.null_mode || g.draw_b) ? d.raw : d.transformed;
}

}  // namespace

SuiteResult run_suite(SuiteId id, const SuiteConfig& config) {
    if (config.n == 0) throw std::invalid_argument("suite sample size must be positive");
    SuiteResult result;
    result.suite = to_string(id);
    const std::vector<Group> groups = build_groups(id, config);

    std::size_t tested = 0;
    for (const Group& g : groups) {
        if (!g.informational && !g.expect_reject) tested += g.functionals.size();
    }
    const double bonferroni = config.alpha / static_cast<double>(std::max<std::size_t>(1, tested));
    const std::string model = config.model.describe();

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        const GroupSamples s = draw_group(id, gi, g, config);

        for (const auto* side : {&s.a, &s.b}) {
            for (const Drawn& d : *side) {
                if (!g.draw_b) {
                    ++result.exactness_checks;
                    if (!d.exact_failure.empty()) {
                        ++result.exactness_failures;
                        if (result.first_failure.empty()) result.first_failure = d.exact_failure;
                    }
                }
                if (d.conditioning >= 0) {
                    ++result.conditioning_checks;
                    if (d.conditioning == 0) {
                        ++result.conditioning_failures;
                        if (result.first_failure.empty()) {
                            result.first_failure = "conditioning event not preserved";
                        }
                    }
                }
            }
        }

        for (std::size_t fi = 0; fi < g.functionals.size(); ++fi) {
            const Functional& f = g.functionals[fi];
            std::vector<double> va, vb;
            va.reserve(s.a.size());
            vb.reserve(s.b.size());
            for (const Drawn& d : s.a) va.push_back(evaluate(f, side_a(d, g, config)));
            for (const Drawn& d : s.b) vb.push_back(evaluate(f, d.raw));

            RngStream perm(config.seed, stream_base(id, gi, false) | (0xFFULL << 32) | fi);
            const TwoSampleResult t = two_sample_test(va, vb, f.discrete(), perm, config.permutations);

            TestReport r;
            r.suite = result.suite;
            r.group = g.label;
            r.functional = f.name();
            r.n_a = va.size();
            r.n_b = vb.size();
            r.statistic = t.statistic;
            r.p_value = t.p_value;
            r.permutation = t.permutation;
            r.informational = g.informational;
            r.expect_reject = g.expect_reject;
            r.threshold = g.expect_reject ? config.reject_threshold
                          : g.informational ? config.alpha
                                            : bonferroni;
            r.reject = g.expect_reject ? t.p_value < r.threshold : t.p_value <= r.threshold;
            r.seed = config.seed;
            r.model = model;
            result.reports.push_back(std::move(r));
        }
    }
    return result;
}

SuiteDraw draw_suite_samples(SuiteId id, const SuiteConfig& config, std::size_t group) {
    const std::vector<Group> groups = build_groups(id, config);
    if (group >= groups.size()) throw std::invalid_argument("suite has no such group");
    const Group& g = groups[group];
    const GroupSamples s = draw_group(id, group, g, config);
    SuiteDraw out;
    for (const Drawn& d : s.a) out.a.push_back(side_a(d, g, config));
    for (const Drawn& d : s.b) out.b.push_back(d.raw);
    return out;
}

CalibrationResult calibrate_null(const SuiteConfig& config, std::size_t repetitions,
                                 std::size_t n_per_half, double level) {
    const LevyModel model = config.model;
    const SuiteConfig c = config;
    const auto run = [model, c, n_per_half, level](RngStream& rng) {
        std::vector<double> a(n_per_half), b(n_per_half);
        for (double& v : a) v = draw_excursion(model, c, rng).lifetime();
        for (double& v : b) v = draw_excursion(model, c, rng).lifetime();
        return ks_two_sample(a, b).p_value < level ? 1 : 0;
    };
    const std::vector<int> hits = generate_blocks<int>(
        repetitions, 1, resolve_threads(config.threads), config.seed, 0xCA1ULL << 48, run);
    CalibrationResult r;
    r.repetitions = repetitions;
    r.level = level;
    for (int h : hits) r.rejections += static_cast<std::size_t>(h);
    return r;
}

}  // namespace splp
