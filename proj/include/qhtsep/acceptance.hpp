#pragma once
// The go / no-go gate: every release-blocking numerical claim about the
// artifact, each checked end to end through the same entry points the command
// line uses, printing one [PASS]/[FAIL] line per criterion.

#include <ostream>

namespace qhtsep::acceptance {

// Runs all criteria against the current build.  Returns true when every one
// passes.  Output is a human-readable line per criterion plus a summary.
bool run_acceptance(std::ostream& out);

}  // namespace qhtsep::acceptance
