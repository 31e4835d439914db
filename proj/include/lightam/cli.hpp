#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json.hpp"
#include "lightam/config.hpp"
#include "lightam/grid.hpp"

namespace lightam::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

// Raised for malformed configs and bad flag values; maps to exit code 2.
class SchemaError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    PhysConfig units{};
    std::optional<GridSpec> grid;
    nlohmann::json mode = nlohmann::json::object();
    std::uint64_t seed = 1;
    nlohmann::json tolerances = nlohmann::json::object();
    nlohmann::json output = nlohmann::json::object();
    nlohmann::json options = nlohmann::json::object();

    [[nodiscard]] double tolerance(const std::string& key, double fallback) const;
};

// Validates the schema; a config file must name a grid.
RunConfig parse_run_config(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

int run_cli(int argc, char** argv);

}  // namespace lightam::cli
