#pragma once

#include <iosfwd>

#include "config.hpp"

namespace elastobayes::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitNotConverged = 2;

// Writes the per-level observation tables, force vectors and ground truth
// under config.output, plus the resolved config.
int cmd_generate(const RunConfig& config, std::ostream& log);

// Runs the cascade on config.dataset (or on freshly generated data when no
// dataset is given) and writes trace, per-level discrepancy fields, the
// final-level sample store and its summary tables.
int cmd_invert(const RunConfig& config, std::ostream& log);

// Rebuilds the summary tables of a finished run in config.output.
int cmd_summarize(const RunConfig& config, std::ostream& log);

}  // namespace elastobayes::cli
