#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "ksub/expr.hpp"

namespace ksub {

struct CheckResult {
    std::string name;
    bool passed = false;
    double residual = 0.0;   // worst deviation observed
    double tolerance = 0.0;
};

struct SuiteResult {
    std::string suite;
    std::vector<CheckResult> checks;
    bool passed() const;
};

/// Seed of every randomized check; recorded in the report so runs are
/// reproducible byte for byte.
inline constexpr std::uint64_t kVerifySeed = 0x9e3779b9ull;

/// Suites in report order: exprs, numerics, frames, holonomy, curvature,
/// geodesics, sphere.
const std::vector<std::string>& suite_names();

/// Run one named suite. Unknown names throw std::invalid_argument. Each suite
/// seeds its own generator, so results do not depend on which other suites
/// ran before it.
SuiteResult run_suite(const std::string& name);

/// Single-line JSON: {"seed":...,"passed":...,"suites":[...]}.
std::string verify_report_json(const std::vector<SuiteResult>& suites);

/// Random well-formed expression in x and y: depth-bounded tree over the
/// full grammar, constants in [-2, 2], regenerated until it evaluates to
/// moderate finite values on a fixed validation grid (so FD comparisons are
/// well conditioned). Deterministic in the generator state.
Expr random_expression(std::mt19937_64& rng, int max_depth = 4);

}  // namespace ksub
