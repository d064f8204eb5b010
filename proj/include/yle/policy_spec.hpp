#pragma once

#include <memory>
#include <string>

#include "yle/agents.hpp"

namespace yle {

// Policy from a command-line spec: "random", "greedy", "oracle",
// "ext:cmd:<command>" or "ext:tcp:<host>:<port>". Throws
// std::invalid_argument on anything else.
std::unique_ptr<Policy> make_policy(const std::string& spec);

// Validates `spec` without connecting to external peers.
void check_policy_spec(const std::string& spec);

}  // namespace yle
