#ifndef SPLP_CLI_HPP
#define SPLP_CLI_HPP

#include "splp/levy_model.hpp"
#include "splp/simulate.hpp"
#include "splp/verify.hpp"

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace splp {

enum ExitCode : int {
    kExitOk = 0,
    kExitRejected = 1,
    kExitUsage = 2,
    kExitResourceCap = 3,
};

struct GridConfig {
    double h = 1e-3;    // grid step for diffusive models
    double dr = 0.01;   // level bin width for grid local times
    double h_w = 1e-3;  // scale-function step
    double x_max = 5.0;
};

/// Everything a run needs; loaded from one JSON document, then overridden by flags.
struct RunConfig {
    LevyModel model = default_model();
    std::vector<std::string> suites;  // empty: every suite
    std::size_t n = 20000;
    std::map<std::string, std::size_t> n_per_suite;
    ExcursionCondition condition = AnyExcursion{};
    std::vector<double> killed_x{0.5, 2.0};
    double sup_exc_x = 0.5;
    std::vector<double> loctime_q{0.2, 0.35};
    std::vector<double> cmj_q{0.2, 0.5, 0.8};
    double alpha = 0.001;
    double reject_threshold = 1e-6;
    JumpSpec control_jumps = JumpSpec::exponential(0.8, 2.0);
    std::size_t permutations = 2000;
    std::uint64_t seed = 7;
    unsigned threads = 0;
    std::string output_dir;
    GridConfig grid;
    bool null_mode = false;
    SimLimits limits{};
};

/// Validates `j` against the RunConfig schema; unknown keys raise ConfigError.
RunConfig load_config(const nlohmann::json& j);
RunConfig load_config_file(const std::string& path);

ExcursionCondition parse_condition(const std::string& text);
StopRule parse_stop(const std::string& text);

SuiteConfig suite_config(const RunConfig& rc, SuiteId id);

/// Entry point of the `splp` executable; data goes to `out`, diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace splp

#endif  // SPLP_CLI_HPP
