#include "splp/cli.hpp"

#include "splp/excursion_ops.hpp"
#include "splp/io.hpp"
#include "splp/parallel.hpp"
#include "splp/splitting_tree.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace splp {

using nlohmann::json;

namespace {

const std::set<std::string> kConfigKeys{
    "model",     "suites",           "n",             "n_per_suite", "condition",
    "killed_x",  "sup_exc_x",        "loctime_q",     "cmj_q",       "alpha",
    "reject_threshold", "control_jumps", "permutations", "seed",      "threads",
    "output_dir", "grid",            "null_mode",     "limits"};

template <class T>
T get_as(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "' has the wrong type: " + e.what());
    }
}

std::size_t positive_count(const json& j, const char* key) {
    const auto v = get_as<long long>(j, key);
    if (v <= 0) throw ConfigError(std::string("config key '") + key + "' must be positive");
    return static_cast<std::size_t>(v);
}

std::vector<double> fractions(const json& j, const char* key, bool open_unit) {
    auto v = get_as<std::vector<double>>(j, key);
    for (double q : v) {
        if (open_unit ? !(q > 0.0 && q < 1.0) : !(q > 0.0)) {
            throw ConfigError(std::string("config key '") + key + "' has an out-of-range entry");
        }
    }
    return v;
}

double parse_number(const std::string& text, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("cannot read a number from '" + text + "' in " + what);
    }
}

std::vector<std::string> split_list(const std::vector<std::string>& items) {
    std::vector<std::string> out;
    for (const std::string& item : items) {
        std::stringstream ss(item);
        std::string part;
        while (std::getline(ss, part, ',')) {
            if (!part.empty()) out.push_back(part);
        }
    }
    return out;
}

std::vector<SuiteId> resolve_suites(const std::vector<std::string>& names) {
    if (names.empty() || (names.size() == 1 && names[0] == "all")) return all_suites();
    std::vector<SuiteId> out;
    for (const std::string& n : names) {
        const auto id = parse_suite(n);
        if (!id) throw ConfigError("unknown suite '" + n + "'");
        out.push_back(*id);
    }
    return out;
}

}  // namespace

ExcursionCondition parse_condition(const std::string& text) {
    if (text == "any") return AnyExcursion{};
    const auto colon = text.find(':');
    const std::string kind = text.substr(0, colon);
    if (colon == std::string::npos) throw ConfigError("condition must be any, lifetime:δ or height:x");
    const double v = parse_number(text.substr(colon + 1), "condition");
    if (!(v > 0.0)) throw ConfigError("condition threshold must be positive");
    if (kind == "lifetime") return LifetimeAtLeast{v};
    if (kind == "height") return HeightAtLeast{v};
    throw ConfigError("unknown condition '" + kind + "'");
}

StopRule parse_stop(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw ConfigError("stop rule must be horizon:T, first-passage:L or excursions:n");
    }
    const std::string kind = text.substr(0, colon);
    const double v = parse_number(text.substr(colon + 1), "stop rule");
    if (kind == "horizon") {
        if (!(v >= 0.0)) throw ConfigError("horizon must be nonnegative");
        return Horizon{v};
    }
    if (kind == "first-passage") {
        if (!(v < 0.0)) throw ConfigError("first-passage level must be negative");
        return FirstPassage{v};
    }
    if (kind == "excursions") {
        if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("excursion count must be a positive integer");
        return ExcursionCount{static_cast<std::size_t>(v)};
    }
    throw ConfigError("unknown stop rule '" + kind + "'");
}

RunConfig load_config(const json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& item : j.items()) {
        if (!kConfigKeys.count(item.key())) throw ConfigError("unknown config key '" + item.key() + "'");
    }
    RunConfig rc;
    if (j.contains("model")) rc.model = model_from_json(j.at("model"));
    if (j.contains("suites")) {
        rc.suites = get_as<std::vector<std::string>>(j, "suites");
        resolve_suites(rc.suites);
    }
    if (j.contains("n")) rc.n = positive_count(j, "n");
    if (j.contains("n_per_suite")) {
        const json& m = j.at("n_per_suite");
        if (!m.is_object()) throw ConfigError("n_per_suite must be an object");
        for (const auto& item : m.items()) {
            if (!parse_suite(item.key())) throw ConfigError("unknown suite '" + item.key() + "'");
            rc.n_per_suite[item.key()] = positive_count(m, item.key().c_str());
        }
    }
    if (j.contains("condition")) rc.condition = parse_condition(get_as<std::string>(j, "condition"));
    if (j.contains("killed_x")) rc.killed_x = fractions(j, "killed_x", false);
    if (j.contains("sup_exc_x")) {
        rc.sup_exc_x = get_as<double>(j, "sup_exc_x");
        if (!(rc.sup_exc_x > 0.0)) throw ConfigError("sup_exc_x must be positive");
    }
    if (j.contains("loctime_q")) rc.loctime_q = fractions(j, "loctime_q", true);
    if (j.contains("cmj_q")) rc.cmj_q = fractions(j, "cmj_q", true);
    if (j.contains("alpha")) {
        rc.alpha = get_as<double>(j, "alpha");
        if (!(rc.alpha > 0.0 && rc.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
    }
    if (j.contains("reject_threshold")) {
        rc.reject_threshold = get_as<double>(j, "reject_threshold");
        if (!(rc.reject_threshold > 0.0 && rc.reject_threshold < 1.0)) {
            throw ConfigError("reject_threshold must lie in (0, 1)");
        }
    }
    if (j.contains("control_jumps")) rc.control_jumps = jumps_from_json(j.at("control_jumps"));
    if (j.contains("permutations")) rc.permutations = positive_count(j, "permutations");
    if (j.contains("seed")) rc.seed = get_as<std::uint64_t>(j, "seed");
    if (j.contains("threads")) rc.threads = get_as<unsigned>(j, "threads");
    if (j.contains("output_dir")) rc.output_dir = get_as<std::string>(j, "output_dir");
    if (j.contains("null_mode")) rc.null_mode = get_as<bool>(j, "null_mode");
    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("grid must be an object");
        for (const auto& item : g.items()) {
            if (item.key() != "h" && item.key() != "dr" && item.key() != "h_w" && item.key() != "x_max") {
                throw ConfigError("unknown grid key '" + item.key() + "'");
            }
            if (!(get_as<double>(g, item.key().c_str()) > 0.0)) {
                throw ConfigError("grid." + item.key() + " must be positive");
            }
        }
        rc.grid.h = g.value("h", rc.grid.h);
        rc.grid.dr = g.value("dr", rc.grid.dr);
        rc.grid.h_w = g.value("h_w", rc.grid.h_w);
        rc.grid.x_max = g.value("x_max", rc.grid.x_max);
    }
    if (j.contains("limits")) {
        const json& l = j.at("limits");
        if (!l.is_object()) throw ConfigError("limits must be an object");
        for (const auto& item : l.items()) {
            if (item.key() != "max_events" && item.key() != "max_seconds") {
                throw ConfigError("unknown limits key '" + item.key() + "'");
            }
        }
        if (l.contains("max_events")) rc.limits.max_events = positive_count(l, "max_events");
        if (l.contains("max_seconds")) {
            rc.limits.max_seconds = get_as<double>(l, "max_seconds");
            if (!(rc.limits.max_seconds > 0.0)) throw ConfigError("limits.max_seconds must be positive");
        }
    }
    return rc;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    try {
        return load_config(json::parse(in));
    } catch (const json::parse_error& e) {
        throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
    }
}

SuiteConfig suite_config(const RunConfig& rc, SuiteId id) {
    SuiteConfig c;
    c.model = rc.model;
    const auto it = rc.n_per_suite.find(to_string(id));
    c.n = it != rc.n_per_suite.end() ? it->second : rc.n;
    c.condition = rc.condition;
    c.killed_x = rc.killed_x;
    c.sup_exc_x = rc.sup_exc_x;
    c.loctime_q = rc.loctime_q;
    c.cmj_q = rc.cmj_q;
    c.alpha = rc.alpha;
    c.reject_threshold = rc.reject_threshold;
    c.control_jumps = rc.control_jumps;
    c.permutations = rc.permutations;
    c.seed = rc.seed;
    c.threads = rc.threads;
    c.null_mode = rc.null_mode;
    c.limits = rc.limits;
    return c;
}

namespace {

struct CommonFlags {
    std::string config;
    std::string model;
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::size_t n = 0;
    std::string condition;
    CLI::Option* seed_opt = nullptr;
    CLI::Option* threads_opt = nullptr;
    CLI::Option* n_opt = nullptr;
};

RunConfig resolve_config(const CommonFlags& f) {
    RunConfig rc = f.config.empty() ? RunConfig{} : load_config_file(f.config);
    if (!f.model.empty()) {
        const bool inline_json = f.model.front() == '{';
        try {
            rc.model = inline_json ? model_from_json(json::parse(f.model)) : model_preset(f.model);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("--model is not valid JSON: ") + e.what());
        }
    }
    if (f.seed_opt->count() > 0) rc.seed = f.seed;
    if (f.threads_opt->count() > 0) rc.threads = f.threads;
    if (f.n_opt->count() > 0) {
        if (f.n == 0) throw ConfigError("--n must be positive");
        rc.n = f.n;
        rc.n_per_suite.clear();
    }
    if (!f.condition.empty()) rc.condition = parse_condition(f.condition);
    return rc;
}

int cmd_simulate(const RunConfig& rc, const std::string& stop_text, const std::string& what,
                 double depth, std::size_t count, std::ostream& out) {
    const LevyModel& m = rc.model;
    if (what == "paths") {
        const StopRule stop = parse_stop(stop_text);
        for (std::size_t i = 0; i < count; ++i) {
            RngStream rng(rc.seed, i);
            if (m.finite_variation()) {
                out << to_json(sample_path_fv(m, stop, rng, 0.0, rc.limits)).dump() << '\n';
            } else {
                const auto* h = std::get_if<Horizon>(&stop);
                if (h == nullptr) throw ConfigError("models with β > 0 only support horizon:T stops");
                out << to_json(sample_path_grid(m, rc.grid.h, h->time, rng)).dump() << '\n';
            }
        }
        return kExitOk;
    }
    if (what == "excursions") {
        ExcursionOptions opt;
        opt.limits = rc.limits;
        opt.grid_h = rc.grid.h;
        for (std::size_t i = 0; i < count; ++i) {
            RngStream rng(rc.seed, i);
            const Excursion e = sample_excursion(m, rc.condition, rng, opt);
            out << to_json(e.path).dump() << '\n';
        }
        return kExitOk;
    }
    if (what == "sup-excursions") {
        for (std::size_t i = 0; i < count; ++i) {
            RngStream rng(rc.seed, i);
            out << to_json(sample_sup_excursion_to_depth(m, depth, rng, rc.limits)).dump() << '\n';
        }
        return kExitOk;
    }
    throw ConfigError("--what must be paths, excursions or sup-excursions");
}

int cmd_scale_fn(const RunConfig& rc, std::ostream& out) {
    const ScaleTable w = scale_function(rc.model, rc.grid.x_max, rc.grid.h_w);
    out << "x,W\n" << std::setprecision(17);
    for (std::size_t k = 0; k < w.values().size(); ++k) {
        out << w.h() * static_cast<double>(k) << ',' << w.values()[k] << '\n';
    }
    return kExitOk;
}

int cmd_verify(const RunConfig& rc, const std::vector<std::string>& names, std::ostream& out,
               std::ostream& err) {
    const std::vector<SuiteId> ids = resolve_suites(names.empty() ? rc.suites : names);
    std::vector<SuiteResult> results;
    bool all_ok = true;
    for (SuiteId id : ids) {
        results.push_back(run_suite(id, suite_config(rc, id)));
        const SuiteResult& r = results.back();
        all_ok = all_ok && r.ok();
        err << r.suite << ": " << (r.ok() ? "ok" : "FAILED") << " (exactness " << r.exactness_checks
            << " checks, " << r.exactness_failures << " failures; conditioning "
            << r.conditioning_checks << " checks, " << r.conditioning_failures << " failures)";
        if (!r.first_failure.empty()) err << " first failure: " << r.first_failure;
        err << '\n';
    }
    write_reports_csv(out, results);
    if (!rc.output_dir.empty()) {
        std::filesystem::create_directories(rc.output_dir);
        std::ofstream csv(std::filesystem::path(rc.output_dir) / "reports.csv");
        write_reports_csv(csv, results);
        json all = json::array();
        for (const SuiteResult& r : results) all.push_back(to_json(r));
        std::ofstream js(std::filesystem::path(rc.output_dir) / "reports.json");
        js << all.dump(2) << '\n';
        if (!csv || !js) throw ConfigError("cannot write reports to " + rc.output_dir);
    }
    return all_ok ? kExitOk : kExitRejected;
}

int cmd_hist(const RunConfig& rc, const std::string& suite, const std::string& functional,
             std::size_t bins, const std::string& side, std::size_t group, std::ostream& out) {
    const auto id = parse_suite(suite);
    if (!id) throw ConfigError("unknown suite '" + suite + "'");
    if (bins == 0) throw ConfigError("--bins must be positive");
    if (side != "a" && side != "b") throw ConfigError("--side must be a or b");
    Functional f;
    try {
        f = parse_functional(functional);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    const SuiteDraw draw = draw_suite_samples(*id, suite_config(rc, *id), group);
    const std::vector<Sample>& samples = side == "a" ? draw.a : draw.b;
    std::vector<double> v;
    v.reserve(samples.size());
    for (const Sample& s : samples) v.push_back(evaluate(f, s));
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = hi > lo ? (hi - lo) / static_cast<double>(bins) : 0.0;
    std::vector<std::size_t> counts(bins, 0);
    for (double x : v) {
        std::size_t k = width > 0.0 ? static_cast<std::size_t>((x - lo) / width) : 0;
        counts[std::min(k, bins - 1)] += 1;
    }
    out << "bin_lo,bin_hi,count,mass\n" << std::setprecision(17);
    for (std::size_t k = 0; k < bins; ++k) {
        const double a = lo + width * static_cast<double>(k);
        const double b = k + 1 == bins ? hi : lo + width * static_cast<double>(k + 1);
        out << a << ',' << b << ',' << counts[k] << ','
            << static_cast<double>(counts[k]) / static_cast<double>(v.size()) << '\n';
    }
    return kExitOk;
}

int cmd_tree(const RunConfig& rc, std::size_t count, double root_lifespan, std::ostream& out) {
    const std::optional<double> root =
        root_lifespan > 0.0 ? std::optional<double>(root_lifespan) : std::nullopt;
    for (std::size_t i = 0; i < count; ++i) {
        RngStream rng(rc.seed, i);
        const SplittingTree t = sample_tree(rc.model.jumps(), root, rng);
        json line{{"index", i},
                  {"nodes", to_json(t)},
                  {"contour", to_json(jccp(t))},
                  {"width", to_json(width_process(t))}};
        out << line.dump() << '\n';
    }
    return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Simulation and verification toolkit for spectrally positive Lévy processes",
                 "splp"};
    app.require_subcommand(1);
    app.fallthrough();

    CommonFlags f;
    app.add_option("--config", f.config, "JSON run configuration");
    app.add_option("--model", f.model, "preset name (bd, bd-critical, bm) or inline JSON model");
    f.seed_opt = app.add_option("--seed", f.seed, "random seed");
    f.threads_opt = app.add_option("--threads", f.threads, "worker threads (default: SPLP_THREADS)");
    f.n_opt = app.add_option("--n", f.n, "sample count (paths, trees, or samples per half)");
    app.add_option("--condition", f.condition, "any | lifetime:δ | height:x");

    std::string stop = "horizon:10";
    std::string what = "paths";
    double depth = 0.5;
    auto* sim = app.add_subcommand("simulate", "emit sampled paths as JSON lines");
    sim->add_option("--stop", stop, "horizon:T | first-passage:L | excursions:n");
    sim->add_option("--what", what, "paths | excursions | sup-excursions");
    sim->add_option("--depth", depth, "depth x for sup-excursions");

    auto* scale = app.add_subcommand("scale-fn", "tabulate the scale function W as CSV");
    double x_max = 0.0, h_w = 0.0;
    scale->add_option("--x-max", x_max, "table range");
    scale->add_option("--h-w", h_w, "grid step");

    std::vector<std::string> suites;
    std::string out_dir;
    bool null_mode = false;
    auto* verify = app.add_subcommand("verify", "run verification suites");
    verify->add_option("--suite", suites, "suite names (comma separated) or all");
    verify->add_option("--out-dir", out_dir, "also write reports.csv and reports.json here");
    verify->add_flag("--null-mode", null_mode, "replace every transform by the identity");

    std::string hist_suite = "THM1", functional, side = "a";
    std::size_t bins = 20, group = 0;
    auto* hist = app.add_subcommand("hist", "histogram of a functional under a suite's sampling");
    hist->add_option("--suite", hist_suite, "suite whose sampling is used");
    hist->add_option("--functional", functional, "functional name, e.g. value_at_fraction(0.3)")
        ->required();
    hist->add_option("--bins", bins, "bin count");
    hist->add_option("--side", side, "a (transformed) or b (untransformed)");
    hist->add_option("--group", group, "group index inside the suite");

    double root_lifespan = 0.0;
    auto* tree = app.add_subcommand("tree", "emit splitting trees with contour and width");
    tree->add_option("--root-lifespan", root_lifespan, "fixed root lifespan (default: random)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        RunConfig rc = resolve_config(f);
        if (sim->parsed()) {
            const std::size_t count = f.n_opt->count() > 0 ? f.n : 1;
            return cmd_simulate(rc, stop, what, depth, count, out);
        }
        if (scale->parsed()) {
            if (x_max > 0.0) rc.grid.x_max = x_max;
            if (h_w > 0.0) rc.grid.h_w = h_w;
            return cmd_scale_fn(rc, out);
        }
        if (verify->parsed()) {
            if (!out_dir.empty()) rc.output_dir = out_dir;
            if (null_mode) rc.null_mode = true;
            return cmd_verify(rc, split_list(suites), out, err);
        }
        if (hist->parsed()) {
            if (f.n_opt->count() == 0) rc.n = 2000;
            rc.n_per_suite.clear();
            return cmd_hist(rc, hist_suite, functional, bins, side, group, out);
        }
        if (tree->parsed()) {
            const std::size_t count = f.n_opt->count() > 0 ? f.n : 1;
            return cmd_tree(rc, count, root_lifespan, out);
        }
    } catch (const ResourceCapError& e) {
        err << "resource cap: " << e.what() << '\n';
        return kExitResourceCap;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnsupportedModel& e) {
        err << "unsupported: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return kExitUsage;
    }
    err << "error: no subcommand\n";
    return kExitUsage;
}

}  // namespace splp
