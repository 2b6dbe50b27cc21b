#include "trialkit/staircase.hpp"

#include <algorithm>
#include <cmath>

#include "trialkit/errors.hpp"
#include "trialkit/stats.hpp"

namespace trialkit {

void validateStaircaseParams(const StaircaseParams& p) {
    auto fail = [](const std::string& msg) { throw EngineError(errc::bad_params, msg); };
    if (!(p.baseR >= 0.0 && p.baseR <= 1.0)) fail("baseR must be in [0, 1]");
    if (!(p.stepDown > 0.0)) fail("stepDown must be positive");
    if (!(p.stepUp > 0.0)) fail("stepUp must be positive");
    if (!(p.stepDown < p.stepUp)) fail("stepDown must be < stepUp");
    if (!(p.startDiff > p.stepDown)) fail("startDiff must be > stepDown");
    if (p.windowSize < 3) fail("windowSize must be >= 3");
    if (p.windowSize > p.maxTrials) fail("windowSize must be <= maxTrials");
    if (p.attentionEvery < 1) fail("attentionEvery must be >= 1");
    if (!(p.convergenceAlpha > 0.0 && p.convergenceAlpha < 1.0))
        fail("convergenceAlpha must be in (0, 1)");
    if (p.maxDiff() < p.stepDown)
        fail("baseR/approach leave no room for a difference >= stepDown");
}

StaircaseParams staircaseParamsFromJson(const Json& j) {
    StaircaseParams p;
    if (!j.is_object()) throw EngineError(errc::bad_params, "params must be an object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        const Json& v = it.value();
        auto num = [&](const char* what) {
            if (!v.is_number())
                throw EngineError(errc::bad_params, std::string(what) + " must be a number");
            return v.get<double>();
        };
        auto integer = [&](const char* what) {
            if (!v.is_number_integer())
                throw EngineError(errc::bad_params, std::string(what) + " must be an integer");
            return v.get<long long>();
        };
        if (key == "baseR") p.baseR = num("baseR");
        else if (key == "sign") {
            std::string s = v.is_string() ? v.get<std::string>() : "";
            if (s == "positive") p.negativeCorrelation = false;
            else if (s == "negative") p.negativeCorrelation = true;
            else throw EngineError(errc::bad_params, "sign must be 'positive' or 'negative'");
        } else if (key == "approach") {
            std::string s = v.is_string() ? v.get<std::string>() : "";
            if (s == "above") p.approach = StaircaseParams::Approach::Above;
            else if (s == "below") p.approach = StaircaseParams::Approach::Below;
            else throw EngineError(errc::bad_params, "approach must be 'above' or 'below'");
        } else if (key == "startDiff") p.startDiff = num("startDiff");
        else if (key == "stepDown") p.stepDown = num("stepDown");
        else if (key == "stepUp") p.stepUp = num("stepUp");
        else if (key == "windowSize") p.windowSize = integer("windowSize");
        else if (key == "maxTrials") p.maxTrials = integer("maxTrials");
        else if (key == "attentionEvery") p.attentionEvery = integer("attentionEvery");
        else if (key == "attentionPair") {
            if (!v.is_object() || !v.contains("rA") || !v.contains("rB"))
                throw EngineError(errc::bad_params, "attentionPair must be {rA, rB}");
            p.attentionRA = v.at("rA").get<double>();
            p.attentionRB = v.at("rB").get<double>();
        } else if (key == "convergenceAlpha") p.convergenceAlpha = num("convergenceAlpha");
        else throw EngineError(errc::bad_params, "unknown staircase parameter '" + key + "'");
    }
    validateStaircaseParams(p);
    return p;
}

namespace {

double clampDiff(const StaircaseParams& p, double d) {
    return std::clamp(d, p.stepDown, p.maxDiff());
}

double signr(const StaircaseParams& p, double r) {
    return p.negativeCorrelation ? -r : r;
}

std::string oppositeSide(const std::string& side) {
    return side == "left" ? "right" : "left";
}

}  // namespace

StaircaseState staircaseInit(const StaircaseParams& params, std::uint64_t seed) {
    validateStaircaseParams(params);
    StaircaseState state;
    state.params = params;
    state.currentDiff = clampDiff(params, params.startDiff);
    state.rng = Xoshiro256(seedCombine(seed, std::string_view("staircase")));
    return state;
}

std::variant<TrialSpec, StopReason> staircaseNext(
    StaircaseState& state, const std::optional<StaircaseResponse>& lastResponse) {
    if (state.terminated != StaircaseState::Termination::None)
        throw EngineError(errc::terminated, "staircase already stopped");
    const StaircaseParams& p = state.params;

    if (state.pending) {
        if (!lastResponse)
            throw EngineError(errc::no_pending, "pending trial has not been answered");
        if (state.pending->isAttentionCheck) {
            state.attentionLedger.push_back(lastResponse->correct);
        } else {
            state.history.push_back({state.currentDiff, lastResponse->correct});
            state.currentDiff = clampDiff(
                p, lastResponse->correct ? state.currentDiff - p.stepDown
                                         : state.currentDiff + p.stepUp);
        }
        state.lastSelectionSide = lastResponse->selectedSide;
        state.pending.reset();
    } else if (lastResponse) {
        throw EngineError(errc::no_pending, "no trial was pending");
    }

    const long long regular = static_cast<long long>(state.history.size());
    if (regular >= p.maxTrials) {
        state.terminated = StaircaseState::Termination::Capped;
        return StopReason::Capped;
    }
    if (regular >= p.windowSize) {
        std::vector<double> window;
        window.reserve(static_cast<std::size_t>(p.windowSize));
        for (std::size_t i = state.history.size() - static_cast<std::size_t>(p.windowSize);
             i < state.history.size(); ++i)
            window.push_back(state.history[i].diff);
        if (checkConvergence(window, p.convergenceAlpha)) {
            state.terminated = StaircaseState::Termination::Converged;
            return StopReason::Converged;
        }
    }

    TrialSpec spec;
    if ((state.trialIndex + 1) % p.attentionEvery == 0) {
        spec.isAttentionCheck = true;
        spec.r1 = signr(p, p.attentionRA);
        spec.r2 = signr(p, p.attentionRB);
        spec.correctSide = state.lastSelectionSide.empty()
                               ? (state.rng.coin() ? std::string("left") : std::string("right"))
                               : oppositeSide(state.lastSelectionSide);
    } else {
        spec.r1 = signr(p, p.baseR);
        spec.r2 = signr(p, p.approach == StaircaseParams::Approach::Above
                               ? p.baseR + state.currentDiff
                               : p.baseR - state.currentDiff);
        // correctSide marks where the stronger |r| stimulus is rendered
        spec.correctSide = state.rng.coin() ? "left" : "right";
    }
    state.trialIndex += 1;
    state.pending = spec;
    return spec;
}

bool checkConvergence(std::span<const double> window, double alpha) {
    TrendTest t = olsTrendFTest(window);
    return t.pValue > alpha;
}

double estimateJnd(const StaircaseState& state) {
    if (state.terminated == StaircaseState::Termination::None)
        throw EngineError(errc::not_terminated, "staircase still running");
    if (state.history.empty()) return 0.0;
    const std::size_t window = std::min(state.history.size(),
                                        static_cast<std::size_t>(state.params.windowSize));
    double sum = 0.0;
    for (std::size_t i = state.history.size() - window; i < state.history.size(); ++i)
        sum += state.history[i].diff;
    return sum / static_cast<double>(window);
}

bool shouldExclude(const StaircaseState& state) {
    if (state.attentionLedger.empty()) return false;
    const double total = static_cast<double>(state.attentionLedger.size());
    double failures = 0.0;
    for (bool passed : state.attentionLedger)
        if (!passed) failures += 1.0;
    return failures / total > 0.20;
}

std::string stopReasonName(StopReason reason) {
    return reason == StopReason::Converged ? "converged" : "capped";
}

}  // namespace trialkit
