#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "rwre/env.hpp"

namespace rwre {

// {"offspring":{"support":[[count,prob],...]},"weights":{"support":[[value,prob],...]}}
// Throws ConfigError on malformed input. No law validation is done here.
EnvironmentSpec parse_environment(std::string_view json_text);
EnvironmentSpec load_environment(const std::filesystem::path& path);
std::string environment_to_json(const EnvironmentSpec& spec);

}  // namespace rwre
