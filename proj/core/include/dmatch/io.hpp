#pragma once

#include <string>

#include "dmatch/instance.hpp"
#include "dmatch/policy.hpp"

namespace dmatch {

// Instance files: {"types": [...], "lambda": [...], "mu": [...], "r": [[...]]}.
// "types" may be omitted; any other key is rejected. Syntax errors throw
// Error(kParseError) naming line and column; invalid values throw
// ValidationError.
Instance parse_instance_json(const std::string& text);
Instance load_instance(const std::string& path);
std::string instance_to_json(const Instance& instance);

// Policy files: {"preferences": {"<type id>": ["<type id>", ...], ...}}.
// Types missing from the object get an empty list.
GreedyPolicy parse_policy_json(const std::string& text, const Instance& instance);
GreedyPolicy load_policy(const std::string& path, const Instance& instance);
std::string policy_to_json(const GreedyPolicy& policy, const Instance& instance);

// Whole file as a string; throws Error(kParseError) when unreadable.
std::string read_file(const std::string& path);

}  // namespace dmatch
