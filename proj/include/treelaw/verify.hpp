#pragma once

/**
 * Named self-checks pinning the library against its closed-form oracles:
 * the Gaussian linear case (fixed point, resolvent, regime table), the
 * Kesten-McKay measure, the degree-two and degree-three log-repulsive cases,
 * the boundary-law identities and the sampler/simulator statistics. Each
 * check is a desk-scale verification designed to run in seconds; `verify
 * --all` on the command line prints the whole table.
 */

#include <string>
#include <vector>

namespace treelaw {

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string details;  ///< one line per quantity compared
};

std::vector<std::string> available_checks();

/// Runs one named check; unknown names throw std::invalid_argument with the
/// available names in the message.
CheckResult run_check(const std::string& name);

std::vector<CheckResult> run_all_checks();

}  // namespace treelaw
