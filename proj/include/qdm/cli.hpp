/**
 * @file
 * Command-line entry point.
 *
 *     qdm check-classical <spec.json>
 *     qdm fit <spec.json> [--seed N] [--starts K] [--tol T] [--threads N]
 *     qdm disjunction --p-a X --p-b Y --p-or Z
 *     qdm scenario <name> [--published-tol T] [--seed N] [--starts K] [--tol T]
 *
 * Every command takes --format table|json and --out <path>. Exit codes:
 * 0 when every check passes, 1 when a check fails (infeasible pattern, fit
 * not converged), 2 on input errors.
 */
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;
inline constexpr int kExitInput = 2;

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

/// args excludes the program name.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace qdm::cli
