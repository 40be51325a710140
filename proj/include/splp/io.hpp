#ifndef SPLP_IO_HPP
#define SPLP_IO_HPP

#include "splp/excursion_ops.hpp"
#include "splp/levy_model.hpp"
#include "splp/path.hpp"
#include "splp/splitting_tree.hpp"
#include "splp/verify.hpp"

#include <json.hpp>

#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace splp {

/// Malformed configuration or model description.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

nlohmann::json to_json(const EventPath& p);
nlohmann::json to_json(const GridPath& p);
nlohmann::json to_json(const Path& p);
Path path_from_json(const nlohmann::json& j);

nlohmann::json to_json(const JumpSpec& s);
nlohmann::json to_json(const LevyModel& m);
JumpSpec jumps_from_json(const nlohmann::json& j);
/// Accepts a preset name ("bd", "bd-critical", "bm"), the Lévy–Khintchine
/// form {"alpha", "beta", "jumps"} or the drift form {"d", "jumps"}.
LevyModel model_from_json(const nlohmann::json& j);
LevyModel model_preset(const std::string& name);

nlohmann::json to_json(const SplittingTree& t);
nlohmann::json to_json(const WidthProcess& w);

void write_profile_csv(std::ostream& out, const LocalTimeProfile& p);
void write_reports_csv(std::ostream& out, const std::vector<SuiteResult>& results);
nlohmann::json to_json(const SuiteResult& r);

}  // namespace splp

#endif  // SPLP_IO_HPP
