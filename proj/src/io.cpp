#include "splp/io.hpp"

#include <iomanip>
#include <set>
#include <sstream>

namespace splp {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    for (const auto& item : j.items()) {
        if (!allowed.count(item.key())) {
            throw ConfigError("unknown key '" + item.key() + "' in " + where);
        }
    }
}

double number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + " needs '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + "." + key + " must be a number");
    return j.at(key).get<double>();
}

std::string csv_number(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

json to_json(const EventPath& p) {
    json segs = json::array();
    for (const Segment& s : p.segments()) segs.push_back({s.duration, s.slope, s.end_jump});
    return {{"x0", p.x0()}, {"initial_jump", p.initial_jump()}, {"segments", segs}};
}

json to_json(const GridPath& p) { return {{"h", p.h()}, {"values", p.values()}}; }

json to_json(const Path& p) {
    return std::visit([](const auto& q) { return to_json(q); }, p);
}

Path path_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("path must be a JSON object");
    if (j.contains("h")) {
        reject_unknown(j, {"h", "values"}, "grid path");
        return GridPath(number(j, "h", "grid path"), j.at("values").get<std::vector<double>>());
    }
    reject_unknown(j, {"x0", "initial_jump", "segments"}, "path");
    std::vector<Segment> segs;
    for (const json& s : j.value("segments", json::array())) {
        if (!s.is_array() || s.size() != 3) throw ConfigError("segments are [duration, slope, jump]");
        segs.push_back({s[0].get<double>(), s[1].get<double>(), s[2].get<double>()});
    }
    return EventPath(number(j, "x0", "path"), j.value("initial_jump", 0.0), std::move(segs));
}

json to_json(const JumpSpec& s) {
    if (s.is_null()) return {{"family", "null"}};
    const auto one = [](const JumpComponent& c) -> json {
        if (c.family == JumpComponent::Family::Exponential) {
            return {{"family", "exp"}, {"b", c.mass}, {"theta", c.param}};
        }
        return {{"family", "dirac"}, {"b", c.mass}, {"c", c.param}};
    };
    if (s.components().size() == 1) return one(s.components()[0]);
    json parts = json::array();
    for (const JumpComponent& c : s.components()) parts.push_back(one(c));
    return {{"family", "mixture"}, {"components", parts}};
}

json to_json(const LevyModel& m) {
    return {{"alpha", m.alpha()}, {"beta", m.beta()}, {"jumps", to_json(m.jumps())}};
}

JumpSpec jumps_from_json(const json& j) {
    if (j.is_null()) return JumpSpec::null();
    if (!j.is_object() || !j.contains("family") || !j.at("family").is_string()) {
        throw ConfigError("jumps must be an object with a 'family'");
    }
    const std::string family = j.at("family").get<std::string>();
    try {
        if (family == "null") {
            reject_unknown(j, {"family"}, "jumps");
            return JumpSpec::null();
        }
        if (family == "exp") {
            reject_unknown(j, {"family", "b", "theta"}, "jumps");
            return JumpSpec::exponential(number(j, "b", "jumps"), number(j, "theta", "jumps"));
        }
        if (family == "dirac") {
            reject_unknown(j, {"family", "b", "c"}, "jumps");
            return JumpSpec::dirac(number(j, "b", "jumps"), number(j, "c", "jumps"));
        }
        if (family == "mixture") {
            reject_unknown(j, {"family", "components"}, "jumps");
            std::vector<JumpComponent> parts;
            for (const json& c : j.at("components")) {
                const JumpSpec one = jumps_from_json(c);
                parts.insert(parts.end(), one.components().begin(), one.components().end());
            }
            return JumpSpec(std::move(parts));
        }
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid jump measure: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid jump measure: ") + e.what());
    }
    throw ConfigError("unknown jump family '" + family + "'");
}

LevyModel model_preset(const std::string& name) {
    if (name == "bd") return LevyModel::from_drift(1.0, JumpSpec::exponential(1.0, 2.0));
    if (name == "bd-critical") return LevyModel::from_drift(1.0, JumpSpec::exponential(2.0, 2.0));
    if (name == "bm") return LevyModel(0.0, 1.0, JumpSpec::null());
    throw ConfigError("unknown model preset '" + name + "' (known: bd, bd-critical, bm)");
}

LevyModel model_from_json(const json& j) {
    if (j.is_string()) return model_preset(j.get<std::string>());
    if (!j.is_object()) throw ConfigError("model must be a preset name or an object");
    const JumpSpec jumps = jumps_from_json(j.value("jumps", json()));
    try {
        if (j.contains("d")) {
            reject_unknown(j, {"d", "jumps"}, "model");
            return LevyModel::from_drift(number(j, "d", "model"), jumps);
        }
        reject_unknown(j, {"alpha", "beta", "jumps"}, "model");
        return LevyModel(j.contains("alpha") ? number(j, "alpha", "model") : 0.0,
                         j.contains("beta") ? number(j, "beta", "model") : 0.0, jumps);
    } catch (const DomainError& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("invalid model: ") + e.what());
    }
}

json to_json(const SplittingTree& t) {
    json nodes = json::array();
    for (const TreeNode& n : t.nodes()) {
        nodes.push_back({{"id", n.id},
                         {"parent", n.parent ? json(*n.parent) : json(nullptr)},
                         {"birth", n.birth},
                         {"lifespan", n.lifespan}});
    }
    return nodes;
}

json to_json(const WidthProcess& w) {
    return {{"times", w.times()}, {"values", w.values()}, {"extinction_time", w.extinction_time()}};
}

void write_profile_csv(std::ostream& out, const LocalTimeProfile& p) {
    out << "level_lo,level_hi,count_or_density\n";
    for (std::size_t i = 0; i < p.size(); ++i) {
        out << csv_number(p.breakpoints[i]) << ',' << csv_number(p.breakpoints[i + 1]) << ',';
        if (p.kind == LocalTimeProfile::Kind::Counts) {
            out << p.counts[i];
        } else {
            out << csv_number(p.density[i]);
        }
        out << '\n';
    }
}

void write_reports_csv(std::ostream& out, const std::vector<SuiteResult>& results) {
    out << "suite,group,functional,nA,nB,D,p,threshold,test,verdict,role\n";
    for (const SuiteResult& s : results) {
        for (const TestReport& r : s.reports) {
            out << r.suite << ',' << r.group << ',' << '"' << r.functional << '"' << ',' << r.n_a
                << ',' << r.n_b << ',' << csv_number(r.statistic) << ',' << csv_number(r.p_value)
                << ',' << csv_number(r.threshold) << ',' << (r.permutation ? "permutation" : "ks")
                << ',' << (r.reject ? "Reject" : "Pass") << ','
                << (r.informational ? "informational"
                                    : r.expect_reject ? "must_reject" : "must_pass")
                << '\n';
        }
    }
}

json to_json(const SuiteResult& r) {
    json reports = json::array();
    for (const TestReport& t : r.reports) {
        reports.push_back({{"suite", t.suite},
                           {"group", t.group},
                           {"functional", t.functional},
                           {"n_a", t.n_a},
                           {"n_b", t.n_b},
                           {"statistic", t.statistic},
                           {"p_value", t.p_value},
                           {"threshold", t.threshold},
                           {"test", t.permutation ? "permutation" : "ks"},
                           {"verdict", t.reject ? "Reject" : "Pass"},
                           {"informational", t.informational},
                           {"expect_reject", t.expect_reject},
                           {"seed", t.seed},
                           {"model", t.model}});
    }
    return {{"suite", r.suite},
            {"ok", r.ok()},
            {"exactness_checks", r.exactness_checks},
            {"exactness_failures", r.exactness_failures},
            {"conditioning_checks", r.conditioning_checks},
            {"conditioning_failures", r.conditioning_failures},
            {"first_failure", r.first_failure},
            {"reports", reports}};
}

}  // namespace splp
