#ifndef SADDLESCOPE_SPEC_IO_HPP
#define SADDLESCOPE_SPEC_IO_HPP

#include <string>

#include "saddlescope/systems.hpp"

namespace saddlescope {

// Parses a system spec from JSON text.  Strict: unknown keys and parameter
// range violations are rejected with a message naming the offending key.
SystemSpec parse_spec(const std::string& json_text);
SystemSpec load_spec(const std::string& path);

std::string serialize_spec(const SystemSpec& spec);

}  // namespace saddlescope

#endif
