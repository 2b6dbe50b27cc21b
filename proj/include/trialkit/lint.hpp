#pragma once

#include <string>
#include <vector>

#include "trialkit/config.hpp"

namespace trialkit {

struct LintFinding {
    std::string code;
    std::string severity;  // "warn" | "info"
    std::string path;
    std::string message;

    bool operator==(const LintFinding&) const = default;
};

struct LintReport {
    std::vector<LintFinding> findings;  // stable order: by path, then code
};

/// Non-blocking design-hygiene findings on a config that already passed
/// validateConfig. Purely programmatic hygiene; experimental-design
/// semantics (confounders etc.) are out of scope.
LintReport lint(const StudyConfig& config);

}  // namespace trialkit
