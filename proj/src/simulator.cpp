#include "trialkit/simulator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>

#include "trialkit/errors.hpp"
#include "trialkit/provenance.hpp"
#include "trialkit/stats.hpp"

namespace trialkit {

std::optional<ParticipantPolicy::Kind> ParticipantPolicy::kindFromName(const std::string& name) {
    if (name == "oracle") return Kind::Oracle;
    if (name == "random") return Kind::UniformRandom;
    if (name == "weber") return Kind::WeberObserver;
    if (name == "alwaysLeft") return Kind::AlwaysLeft;
    return std::nullopt;
}

std::string ParticipantPolicy::kindName(Kind kind) {
    switch (kind) {
        case Kind::Oracle: return "oracle";
        case Kind::UniformRandom: return "random";
        case Kind::WeberObserver: return "weber";
        case Kind::AlwaysLeft: return "alwaysLeft";
    }
    return "oracle";
}

namespace {

std::string oppositeSide(const std::string& side) {
    return side == "left" ? "right" : "left";
}

}  // namespace

SideResponse weberObserverRespond(const TrialSpec& trial, const ParticipantPolicy& policy,
                                  Xoshiro256& rng) {
    double pCorrect;
    if (trial.isAttentionCheck) {
        pCorrect = 0.995;
    } else {
        const double d = std::abs(trial.r1 - trial.r2);
        pCorrect = 0.5 + 0.5 * logisticCdf((d - policy.jnd75) / policy.slope);
    }
    const bool correct = rng.real() < pCorrect;
    return {correct ? trial.correctSide : oppositeSide(trial.correctSide), correct};
}

SideResponse respondToTrial(const TrialSpec& trial, const ParticipantPolicy& policy,
                            Xoshiro256& rng) {
    switch (policy.kind) {
        case ParticipantPolicy::Kind::Oracle:
            return {trial.correctSide, true};
        case ParticipantPolicy::Kind::AlwaysLeft:
            return {"left", trial.correctSide == "left"};
        case ParticipantPolicy::Kind::UniformRandom: {
            const std::string side = rng.coin() ? "left" : "right";
            return {side, side == trial.correctSide};
        }
        case ParticipantPolicy::Kind::WeberObserver:
            return weberObserverRespond(trial, policy, rng);
    }
    return {trial.correctSide, true};
}

StaircaseRunResult runStaircase(const StaircaseParams& params, const ParticipantPolicy& policy,
                                std::uint64_t seed) {
    StaircaseState state = staircaseInit(params, seed);
    Xoshiro256 rng(seedCombine(seed, std::string_view("observer")));
    StaircaseRunResult result;
    result.seed = seed;
    std::optional<StaircaseResponse> response;
    for (;;) {
        auto next = staircaseNext(state, response);
        if (std::holds_alternative<StopReason>(next)) {
            result.termination = stopReasonName(std::get<StopReason>(next));
            break;
        }
        const TrialSpec& spec = std::get<TrialSpec>(next);
        if (spec.isAttentionCheck) result.attentionTrialIndices.push_back(state.trialIndex);
        SideResponse side = respondToTrial(spec, policy, rng);
        response = StaircaseResponse{side.selectedSide, side.correct};
    }
    result.trials = state.trialIndex;
    result.jndEstimate = estimateJnd(state);
    result.excluded = shouldExclude(state);
    if (!state.attentionLedger.empty()) {
        double passed = 0;
        for (bool ok : state.attentionLedger) passed += ok ? 1 : 0;
        result.attentionPassRate = passed / static_cast<double>(state.attentionLedger.size());
    }
    return result;
}

// ---------------------------------------------------------------------------
// Cohort simulation
// ---------------------------------------------------------------------------

namespace {

Json fillerForKind(const std::string& kind) {
    if (kind == "numerical") return 0;
    if (kind == "likert") return 3;
    if (kind == "slider") return 50;
    if (kind == "checkbox" || kind == "video") return true;
    if (kind == "dropdown" || kind == "radio" || kind == "matrix") return "option-1";
    return "ok";
}

/// Answers for a non-dynamic component under the policy: graded responses
/// follow the policy (oracle answers correctAnswers; random is right half
/// the time), the rest get per-kind filler.
Json respondToComponent(const ComponentDef* component, const ParticipantPolicy& policy,
                        Xoshiro256& rng) {
    Json responses = Json::object();
    if (!component) return responses;
    for (const auto& response : component->responses) {
        const auto answer = component->correctAnswers.find(response.id);
        if (answer != component->correctAnswers.end()) {
            const bool answerCorrectly =
                policy.kind != ParticipantPolicy::Kind::UniformRandom || rng.coin();
            if (answerCorrectly) {
                responses[response.id] = *answer;
            } else if (answer->is_number()) {
                responses[response.id] = answer->get<double>() + 1.0;
            } else {
                responses[response.id] = "wrong";
            }
        } else {
            responses[response.id] = fillerForKind(response.kind);
        }
    }
    return responses;
}

struct LatinBlockInfo {
    std::string blockPath;
    int order = 0;
};

std::vector<LatinBlockInfo> latinBlocks(const StudyConfig& config) {
    std::vector<LatinBlockInfo> blocks;
    forEachBlock(config.sequence, [&](const std::string& path, const Block& block) {
        if (block.order == Order::LatinSquare)
            blocks.push_back({path, static_cast<int>(block.children.size())});
    });
    return blocks;
}

struct EmittedLogs {
    std::vector<ProvenanceEvent> events;
};

void synthesizeTrialEvents(const TrialRecord& record, Xoshiro256& rng,
                           std::vector<ProvenanceEvent>& events) {
    ProvenanceEvent start;
    start.t = record.startedAt;
    start.kind = "componentStart";
    start.instanceId = record.instanceId;
    events.push_back(start);

    std::int64_t t = record.startedAt + 100;
    const std::uint64_t hovers = rng.below(4);
    for (std::uint64_t h = 0; h < hovers; ++h) {
        const std::int64_t span = 200 + static_cast<std::int64_t>(rng.below(400));
        if (t + span + 50 >= record.endedAt) break;
        ProvenanceEvent enter;
        enter.t = t;
        enter.kind = "hoverEnter";
        enter.instanceId = record.instanceId;
        enter.itemId = "item" + std::to_string(rng.below(5));
        enter.searchHighlighted = rng.coin();
        ProvenanceEvent exit;
        exit.t = t + span;
        exit.kind = "hoverExit";
        exit.instanceId = record.instanceId;
        exit.itemId = enter.itemId;
        events.push_back(enter);
        events.push_back(exit);
        t += span + 50;
    }

    ProvenanceEvent end;
    end.t = record.endedAt;
    end.kind = "componentEnd";
    end.instanceId = record.instanceId;
    events.push_back(end);
}

}  // namespace

CohortResult simulateCohort(const StudyConfig& config, const SimulateOptions& options) {
    const auto wallStart = std::chrono::steady_clock::now();
    CohortResult cohort;

    const std::vector<LatinBlockInfo> latin = latinBlocks(config);
    for (const auto& info : latin)
        cohort.pools.emplace(info.blockPath,
                             makePool(info.blockPath, info.order,
                                      seedCombine(options.seed, std::string_view("pool"),
                                                  info.blockPath)));

    std::map<std::string, long long> childCounts;
    forEachBlock(config.sequence, [&](const std::string& path, const Block& block) {
        childCounts[path] = static_cast<long long>(block.children.size());
    });

    const long long attemptCap = 4 * options.n;
    std::int64_t now = 0;
    while (cohort.completed < options.n) {
        if (cohort.attempts >= attemptCap)
            throw EngineError(errc::attempt_cap,
                              "attempt cap " + std::to_string(attemptCap) +
                                  " reached with only " + std::to_string(cohort.completed) +
                                  " completions");
        const long long attempt = cohort.attempts++;
        now = attempt * options.interArrivalMs;

        for (auto& [path, pool] : cohort.pools) reclaimExpired(pool, now, options.timeoutMs);

        char pidBuf[16];
        std::snprintf(pidBuf, sizeof pidBuf, "p%03lld", attempt);
        ParticipantOutcome participant;
        participant.id = pidBuf;
        participant.participantIndex = attempt;

        PoolAssignments assignments;
        for (auto& [path, pool] : cohort.pools) {
            const std::vector<int>& row = assignRow(pool, participant.id, now);
            assignments[path] = row;
            participant.assignedRows[path] = row;
        }

        RealizedSequence realized =
            realizeSequence(config, attempt, options.seed, assignments);
        Session session = startSession(config, std::move(realized));

        Xoshiro256 rng(seedCombine(options.seed, std::string_view("participant"),
                                   static_cast<std::uint64_t>(attempt)));
        const bool abandons =
            options.policy.abandonProb > 0.0 && rng.real() < options.policy.abandonProb;
        const std::uint64_t abandonAfter =
            1 + rng.below(std::max<std::uint64_t>(1, session.sequence.items.size()));

        std::int64_t clock = now;
        long long served = 0;
        bool abandoned = false;
        for (;;) {
            auto next = nextComponent(session);
            if (std::holds_alternative<Done>(next)) break;
            served += 1;
            if (abandons && static_cast<std::uint64_t>(served) == abandonAfter) {
                abandoned = true;  // walks away without answering this trial
                break;
            }
            const ServedComponent& component = std::get<ServedComponent>(next);
            Json responses;
            if (component.orderParams.contains("correctSide")) {
                TrialSpec spec;
                spec.r1 = component.orderParams.at("r1").get<double>();
                spec.r2 = component.orderParams.at("r2").get<double>();
                spec.correctSide = component.orderParams.at("correctSide").get<std::string>();
                spec.isAttentionCheck =
                    component.orderParams.at("isAttentionCheck").get<bool>();
                SideResponse side = respondToTrial(spec, options.policy, rng);
                responses = Json{{"selectedSide", side.selectedSide}};
            } else {
                const ComponentDef* def = nullptr;
                if (auto it = config.components.find(component.componentName);
                    it != config.components.end())
                    def = &it->second;
                responses = respondToComponent(def, options.policy, rng);
            }
            const std::int64_t duration = 1500 + static_cast<std::int64_t>(rng.below(3001));
            submitAnswer(session, responses, clock, clock + duration);
            clock += duration + 200;
        }

        participant.trials = static_cast<long long>(session.answers.size());

        bool isExcluded = false;
        for (const auto& [path, strategy] : session.dynamicStates) {
            const StaircaseState* stair = strategy->staircase();
            if (!stair) continue;
            if (stair->terminated != StaircaseState::Termination::None)
                participant.jndEstimate = estimateJnd(*stair);
            if (shouldExclude(*stair)) isExcluded = true;
        }

        if (abandoned) {
            participant.outcome = "abandoned";
            cohort.abandoned += 1;
            // assigned pool rows stay out until timeout reclamation
        } else {
            for (auto& [path, pool] : cohort.pools) completeRow(pool, participant.id);
            if (isExcluded) {
                participant.outcome = "excluded";
                cohort.excluded += 1;
            } else {
                participant.outcome = "completed";
                cohort.completed += 1;
                for (const auto& [path, order] : session.sequence.blockOrders) {
                    auto& table = cohort.balance[path];
                    if (table.empty())
                        table.assign(static_cast<std::size_t>(childCounts[path]),
                                     std::vector<long long>(order.size(), 0));
                    for (std::size_t pos = 0; pos < order.size(); ++pos)
                        table[static_cast<std::size_t>(order[pos])][pos] += 1;
                }
            }
        }

        if (!options.emitLogsDir.empty()) {
            namespace fs = std::filesystem;
            fs::create_directories(options.emitLogsDir);
            Xoshiro256 eventRng(seedCombine(options.seed, std::string_view("events"),
                                            static_cast<std::uint64_t>(attempt)));
            std::vector<ProvenanceEvent> events;
            Json trials = Json::array();
            for (const auto& record : session.answers) {
                synthesizeTrialEvents(record, eventRng, events);
                trials.push_back(trialToJson(record));
            }
            const fs::path dir(options.emitLogsDir);
            writeFileAtomic(dir / (participant.id + ".jsonl"), serializeEventLog(events));
            writeFileAtomic(dir / (participant.id + ".trials.json"), canonicalDump(trials));
        }

        cohort.simulatedMs = std::max(cohort.simulatedMs, clock);
        cohort.participants.push_back(std::move(participant));
    }

    cohort.wallClockMs = std::chrono::duration<double, std::milli>(
                             std::chrono::steady_clock::now() - wallStart)
                             .count();
    return cohort;
}

const std::map<std::string, std::vector<std::vector<long long>>>& coverageStats(
    const CohortResult& cohort) {
    return cohort.balance;
}

Json cohortToJson(const CohortResult& cohort) {
    Json participants = Json::array();
    for (const auto& p : cohort.participants) {
        Json j = Json::object();
        j["id"] = p.id;
        j["participantIndex"] = p.participantIndex;
        j["outcome"] = p.outcome;
        j["trials"] = p.trials;
        if (p.jndEstimate) j["jndEstimate"] = *p.jndEstimate;
        if (!p.assignedRows.empty()) {
            Json rows = Json::object();
            for (const auto& [path, row] : p.assignedRows) rows[path] = row;
            j["assignedRows"] = rows;
        }
        participants.push_back(std::move(j));
    }
    Json pools = Json::object();
    for (const auto& [path, pool] : cohort.pools) pools[path] = poolToJson(pool);
    Json balance = Json::object();
    for (const auto& [path, table] : cohort.balance) balance[path] = table;
    return Json{{"participants", participants},
                {"pools", pools},
                {"balance", balance},
                {"completed", cohort.completed},
                {"abandoned", cohort.abandoned},
                {"excluded", cohort.excluded},
                {"attempts", cohort.attempts},
                {"simulatedMs", cohort.simulatedMs}};
}

}  // namespace trialkit
