#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "trialkit/jsonio.hpp"
#include "trialkit/rng.hpp"

namespace trialkit {

/// Adaptive 2-AFC staircase: difficulty steps down 0.01 on a correct answer
/// and up 0.03 on an incorrect one, which places the stochastic equilibrium
/// at the 75%-correct point. Every attentionEvery-th served trial is an
/// attention check (r = 0.01 vs 1.0) whose correct side is reversed from the
/// participant's previous selection.
struct StaircaseParams {
    double baseR = 0.3;
    bool negativeCorrelation = false;  // sign of the emitted correlations
    enum class Approach { Above, Below };
    Approach approach = Approach::Above;
    double startDiff = 0.1;
    double stepDown = 0.01;
    double stepUp = 0.03;
    long long windowSize = 24;
    long long maxTrials = 50;
    long long attentionEvery = 10;
    double attentionRA = 0.01;
    double attentionRB = 1.0;
    double convergenceAlpha = 0.05;

    /// Largest difference that keeps both correlations in [0, 1].
    double maxDiff() const {
        return approach == Approach::Above ? 1.0 - baseR : baseR;
    }
};

/// Throws E_BAD_PARAMS on any violated constraint (stepDown < stepUp,
/// startDiff > stepDown, windowSize <= maxTrials, baseR in [0,1], ...).
void validateStaircaseParams(const StaircaseParams& params);

/// Parses the strategy-params object of a dynamic block. Unknown keys and
/// constraint violations throw E_BAD_PARAMS.
StaircaseParams staircaseParamsFromJson(const Json& j);

struct TrialSpec {
    double r1 = 0.0;  // base correlation (attention: the near-zero member)
    double r2 = 0.0;  // comparison correlation (attention: the r = 1 member)
    std::string correctSide;  // "left" | "right": where the stronger correlation sits
    bool isAttentionCheck = false;
};

enum class StopReason { Converged, Capped };

struct StaircaseResponse {
    std::string selectedSide;  // "left" | "right"
    bool correct = false;
};

struct StaircaseTrialRecord {
    double diff = 0.0;
    bool correct = false;
};

struct StaircaseState {
    StaircaseParams params;
    double currentDiff = 0.0;
    long long trialIndex = 0;  // 1-based count of served trials, checks included
    std::vector<StaircaseTrialRecord> history;  // regular trials only
    std::vector<bool> attentionLedger;          // pass flags
    std::string lastSelectionSide;              // empty until the first answer
    enum class Termination { None, Converged, Capped };
    Termination terminated = Termination::None;

    Xoshiro256 rng{0};
    std::optional<TrialSpec> pending;  // served, not yet answered
};

StaircaseState staircaseInit(const StaircaseParams& params, std::uint64_t seed);

/// Applies lastResponse to the pending trial (stepping the difficulty for
/// regular trials, recording pass/fail for attention checks), terminates on
/// the trial cap or on convergence of the last windowSize regular trials,
/// then emits the next trial. E_TERMINATED if already stopped.
std::variant<TrialSpec, StopReason> staircaseNext(
    StaircaseState& state, const std::optional<StaircaseResponse>& lastResponse);

/// No-significant-trend test: OLS diff ~ index over the window, F with df
/// (1, n-2); converged iff p > alpha. Zero-variance windows converge.
bool checkConvergence(std::span<const double> window, double alpha);

/// Mean of the last windowSize regular-trial differences (all, if fewer).
/// E_NOT_TERMINATED before the staircase stops.
double estimateJnd(const StaircaseState& state);

/// True iff attention-check failures exceed 20% of the checks served.
bool shouldExclude(const StaircaseState& state);

std::string stopReasonName(StopReason reason);

}  // namespace trialkit
