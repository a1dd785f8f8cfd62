#pragma once

#include "curtailkit/timeseries.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace curtailkit::cli {

/// Runs one invocation; `args` excludes the program name. Returns the exit
/// status: 0 on success, 1 on a library or config error, 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Percent of observed steps with curtailment (MW > 0 or flag true).
double percent_time_curtailed(const Series& curtailment);

} // namespace curtailkit::cli
