#pragma once

namespace camellia {

/// Entry point for the `camellia` command-line tool.
/// Exit codes: 0 on success, 2 for configuration/usage errors, 3 when a
/// request exceeds the exact-computation budgets.
int run_cli(int argc, char** argv);

}  // namespace camellia
