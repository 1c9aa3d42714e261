#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "krf/config.hpp"

namespace krf {

const std::vector<std::string>& commands();

// Runs classify | curvature | flow | compare | check-theorems, writing into
// cfg.output_dir. Returns the process exit status: 0 on success, 1 when a
// check fails, 2 on an error (reported on err as "<module>: <message>").
int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out, std::ostream& err);

}  // namespace krf
