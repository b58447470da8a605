#pragma once

#include <string>

#include "qsatlink/protocol.hpp"

namespace qsatlink {

/// Loads a sectioned key = value session description and assembles the
/// complete SessionConfig: satellite catalog lookup, pass file or synthetic
/// pass generation, link parameters, schedule, gate and session settings.
/// Relative paths inside the file resolve against the file's directory.
/// Unknown sections or keys are rejected. Throws ParseError (with line
/// numbers where available) or InvalidArgumentError.
SessionConfig load_session_config(const std::string& path);

}  // namespace qsatlink
