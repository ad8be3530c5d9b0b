#pragma once

// Front end for the plan / simulate / verify / profile subcommands.
// Exit codes: 0 success, 1 verification failure, 2 usage or configuration
// error, 3 runtime abort (boundary breach, I/O failure).

#include "relaxfv/config.hpp"
#include "relaxfv/diagnostics.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace relaxfv {

enum ExitCode : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUsage = 2, kExitRuntime = 3 };

/// What `simulate` records about how a run ended.
struct OutcomeInfo {
    std::string kind; // to_string(Outcome)
    double t = 0.0;
    double x = 0.0;
    std::string reason;
    std::size_t steps = 0;
    double max_grad = 0.0;
};

/// Plan used for the run described by `spec`: the smallest admissible plan
/// when L and M are absent, otherwise the evaluation at the given (L, M).
TheoremPlan resolve_plan(const RunSpec &spec);

/// Every diagnostics check applicable to a finished run. `have_aux` says
/// whether the auxiliary integrals were available.
std::vector<CheckResult> verify_run(const std::vector<DiagRecord> &records, bool have_aux, const TheoremPlan &plan,
                                    const RunSpec &spec, const OutcomeInfo &outcome);

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace relaxfv
