#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trialkit/config.hpp"
#include "trialkit/latin.hpp"
#include "trialkit/runtime.hpp"
#include "trialkit/staircase.hpp"

namespace trialkit {

/// Synthetic participant behavior for cohort simulation.
struct ParticipantPolicy {
    enum class Kind { Oracle, UniformRandom, WeberObserver, AlwaysLeft };
    Kind kind = Kind::Oracle;
    // weberObserver: P(correct | d) = 0.5 + 0.5 * logistic((d - jnd75)/slope),
    // calibrated so P(jnd75) = 0.75 exactly.
    double jnd75 = 0.12;
    double slope = 0.04;
    double abandonProb = 0.0;

    static std::optional<Kind> kindFromName(const std::string& name);
    static std::string kindName(Kind kind);
};

struct SideResponse {
    std::string selectedSide;
    bool correct = false;
};

/// 2-AFC response draw. Attention checks are answered correctly with
/// probability 0.995 (rare lapses) under the weber observer.
SideResponse weberObserverRespond(const TrialSpec& trial, const ParticipantPolicy& policy,
                                  Xoshiro256& rng);

/// Any policy's answer to a 2-AFC trial.
SideResponse respondToTrial(const TrialSpec& trial, const ParticipantPolicy& policy,
                            Xoshiro256& rng);

/// One full staircase run driven by a policy (no cohort machinery).
struct StaircaseRunResult {
    std::uint64_t seed = 0;
    long long trials = 0;  // served trials, attention checks included
    std::string termination;
    double jndEstimate = 0.0;
    double attentionPassRate = 1.0;
    bool excluded = false;
    std::vector<long long> attentionTrialIndices;  // 1-based served positions
};

StaircaseRunResult runStaircase(const StaircaseParams& params, const ParticipantPolicy& policy,
                                std::uint64_t seed);

struct ParticipantOutcome {
    std::string id;
    long long participantIndex = 0;
    std::string outcome;  // completed | abandoned | excluded
    long long trials = 0;
    std::optional<double> jndEstimate;
    std::map<std::string, std::vector<int>> assignedRows;  // blockPath -> row
};

struct CohortResult {
    std::vector<ParticipantOutcome> participants;
    std::map<std::string, LatinPool> pools;  // final state per latinSquare block
    /// counts[child][position] per block path, over completed sessions only.
    std::map<std::string, std::vector<std::vector<long long>>> balance;
    long long completed = 0;
    long long abandoned = 0;
    long long excluded = 0;
    long long attempts = 0;
    std::int64_t simulatedMs = 0;
    double wallClockMs = 0.0;  // diagnostics only; excluded from serialization
};

struct SimulateOptions {
    long long n = 0;
    ParticipantPolicy policy;
    std::uint64_t seed = 0;
    std::int64_t timeoutMs = 1'800'000;
    std::int64_t interArrivalMs = 3'600'000;
    std::string emitLogsDir;  // when set: <pid>.jsonl + <pid>.trials.json per participant
};

/// Runs sessions on a virtual clock until n of them complete (excluded runs
/// do not count) or 4n attempts are spent (E_ATTEMPT_CAP). Abandoned rows
/// return to their pools via timeout reclamation at later arrivals. Fully
/// deterministic under (config, options).
CohortResult simulateCohort(const StudyConfig& config, const SimulateOptions& options);

const std::map<std::string, std::vector<std::vector<long long>>>& coverageStats(
    const CohortResult& cohort);

Json cohortToJson(const CohortResult& cohort);

}  // namespace trialkit
