#include "trialkit/runtime.hpp"

#include <algorithm>

#include "trialkit/errors.hpp"

namespace trialkit {

Json trialToJson(const TrialRecord& r) {
    Json j = Json::object();
    j["instanceId"] = r.instanceId;
    j["componentName"] = r.componentName;
    j["blockPath"] = r.blockPath;
    j["startedAt"] = r.startedAt;
    j["endedAt"] = r.endedAt;
    j["responses"] = r.responses;
    j["correct"] = r.correct ? Json(*r.correct) : Json(nullptr);
    j["orderParams"] = r.orderParams;
    j["isInterruption"] = r.isInterruption;
    return j;
}

TrialRecord trialFromJson(const Json& j) {
    TrialRecord r;
    r.instanceId = j.at("instanceId").get<std::string>();
    r.componentName = j.at("componentName").get<std::string>();
    r.blockPath = j.at("blockPath").get<std::string>();
    r.startedAt = j.at("startedAt").get<std::int64_t>();
    r.endedAt = j.at("endedAt").get<std::int64_t>();
    r.responses = j.at("responses");
    if (!j.at("correct").is_null()) r.correct = j.at("correct").get<bool>();
    r.orderParams = j.at("orderParams");
    r.isInterruption = j.at("isInterruption").get<bool>();
    return r;
}

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

namespace {

class StaircaseStrategy final : public DynamicStrategy {
public:
    StaircaseStrategy(const Json& params, std::uint64_t seed)
        : state_(staircaseInit(staircaseParamsFromJson(params), seed)) {}

    std::variant<TrialSpec, StopReason> nextTrial() override {
        auto result = staircaseNext(state_, unfed_);
        unfed_.reset();
        return result;
    }

    bool feedAnswer(const Json& responses) override {
        auto it = responses.find("selectedSide");
        if (it == responses.end() || !it->is_string())
            throw EngineError(errc::missing_required,
                              "staircase trials require a 'selectedSide' response");
        const std::string side = it->get<std::string>();
        if (!state_.pending)
            throw EngineError(errc::no_pending, "no staircase trial is pending");
        const bool correct = side == state_.pending->correctSide;
        unfed_ = StaircaseResponse{side, correct};
        return correct;
    }

    const StaircaseState* staircase() const override { return &state_; }

private:
    StaircaseState state_;
    std::optional<StaircaseResponse> unfed_;
};

}  // namespace

bool strategyExists(const std::string& name) {
    return name == "staircase";
}

std::unique_ptr<DynamicStrategy> makeStrategy(const std::string& name, const Json& params,
                                              std::uint64_t seed) {
    if (name == "staircase") return std::make_unique<StaircaseStrategy>(params, seed);
    throw EngineError(errc::unknown_strategy, "unknown dynamic strategy '" + name + "'");
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

Session startSession(const StudyConfig& config, RealizedSequence realized) {
    Session session;
    session.config = &config;
    session.sequence = std::move(realized);
    forEachBlock(config.sequence, [&](const std::string& path, const Block& block) {
        session.blocksByPath[path] = &block;
    });
    for (const auto& item : session.sequence.items) {
        if (!item.isDynamic) continue;
        auto blockIt = session.blocksByPath.find(item.blockPath);
        if (blockIt == session.blocksByPath.end())
            throw EngineError(errc::missing_assignment,
                              "dynamic item references unknown block '" + item.blockPath + "'");
        const Block& block = *blockIt->second;
        session.dynamicStates[item.blockPath] = makeStrategy(
            block.strategyName, block.strategyParams,
            seedCombine(session.sequence.seed, std::string_view("strategy"), item.blockPath,
                        static_cast<std::uint64_t>(session.sequence.participantIndex)));
    }
    if (session.sequence.items.empty()) session.status = SessionStatus::Finished;
    return session;
}

std::variant<ServedComponent, Done> nextComponent(Session& session) {
    if (session.status != SessionStatus::Active) return Done{};
    while (session.cursor < session.sequence.items.size()) {
        SequenceItem& item = session.sequence.items[session.cursor];
        if (!item.isDynamic) {
            session.pendingServe = true;
            session.pendingDynamic = false;
            return ServedComponent{item.instanceId, item.componentName, item.orderParams};
        }
        DynamicStrategy& strategy = *session.dynamicStates.at(item.blockPath);
        auto result = strategy.nextTrial();
        if (std::holds_alternative<StopReason>(result)) {
            session.cursor += 1;  // block closed; walk on
            continue;
        }
        const TrialSpec& spec = std::get<TrialSpec>(result);
        SequenceItem trial;
        long long& count = session.dynamicTrialCounts[item.blockPath];
        trial.instanceId = item.blockPath + "/trial#" + std::to_string(count++);
        trial.componentName = item.componentName;
        trial.blockPath = item.blockPath;
        trial.orderParams = Json{{"r1", spec.r1},
                                 {"r2", spec.r2},
                                 {"correctSide", spec.correctSide},
                                 {"isAttentionCheck", spec.isAttentionCheck}};
        session.sequence.items.insert(
            session.sequence.items.begin() + static_cast<std::ptrdiff_t>(session.cursor),
            std::move(trial));
        session.pendingServe = true;
        session.pendingDynamic = true;
        const SequenceItem& served = session.sequence.items[session.cursor];
        return ServedComponent{served.instanceId, served.componentName, served.orderParams};
    }
    session.status = SessionStatus::Finished;
    return Done{};
}

namespace {

bool scalarLess(const Json& lhs, const Json& rhs) {
    if (lhs.is_number() && rhs.is_number()) return lhs.get<double>() < rhs.get<double>();
    if (lhs.is_string() && rhs.is_string())
        return lhs.get<std::string>() < rhs.get<std::string>();
    return false;
}

bool comparatorHolds(const std::string& comparator, const Json& actual, const Json& expected) {
    if (comparator == "eq") return actual == expected;
    if (comparator == "neq") return actual != expected;
    if (comparator == "lt") return scalarLess(actual, expected);
    if (comparator == "gt") return scalarLess(expected, actual);
    return false;
}

bool withinBlock(const std::string& itemPath, const std::string& blockPath) {
    return itemPath == blockPath || itemPath.rfind(blockPath + "/", 0) == 0;
}

std::string lastSegment(const std::string& path) {
    auto pos = path.find_last_of('/');
    return pos == std::string::npos ? path : path.substr(pos + 1);
}

/// Paths of realized block instances whose block id equals `id`.
std::vector<std::string> instancePathsForBlockId(const Session& session, const std::string& id) {
    std::vector<std::string> paths;
    for (const auto& [path, block] : session.blocksByPath)
        if (block->id == id) paths.push_back(path);
    return paths;
}

long long countGraded(const Session& session, const std::vector<std::string>& paths,
                      bool wantCorrect) {
    long long count = 0;
    for (const auto& record : session.answers) {
        if (!record.correct) continue;
        if (*record.correct != wantCorrect) continue;
        for (const auto& path : paths) {
            if (withinBlock(record.blockPath, path)) {
                ++count;
                break;
            }
        }
    }
    return count;
}

bool conditionSatisfied(const Session& session, const SkipCondition& cond,
                        const std::string& answeredPath) {
    switch (cond.variant) {
        case SkipCondition::Variant::Block:
        case SkipCondition::Variant::RepeatedBlock: {
            std::vector<std::string> paths = instancePathsForBlockId(session, cond.blockId);
            if (paths.empty()) return false;
            if (cond.variant == SkipCondition::Variant::Block) {
                // current realization: prefer the instance enclosing the answer
                std::string chosen;
                for (const auto& path : paths)
                    if (withinBlock(answeredPath, path) && path.size() > chosen.size())
                        chosen = path;
                if (chosen.empty()) chosen = paths.front();
                paths = {chosen};
            }
            const bool wantCorrect = cond.check == "numCorrect";
            return countGraded(session, paths, wantCorrect) >= cond.threshold;
        }
        case SkipCondition::Variant::Response: {
            const TrialRecord& last = session.answers.back();
            if (last.componentName != cond.componentName) return false;
            auto it = last.responses.find(cond.responseId);
            if (it == last.responses.end()) return false;
            return comparatorHolds(cond.comparator, *it, cond.value);
        }
    }
    return false;
}

}  // namespace

std::optional<std::string> evaluateSkip(const Session& session,
                                        const std::string& justAnsweredBlockPath) {
    // enclosing chain, innermost first
    std::vector<std::string> chain;
    std::string path = justAnsweredBlockPath;
    for (;;) {
        chain.push_back(path);
        auto pos = path.find_last_of('/');
        if (pos == std::string::npos) break;
        path.resize(pos);
    }
    for (const auto& blockPath : chain) {
        auto it = session.blocksByPath.find(blockPath);
        if (it == session.blocksByPath.end()) continue;
        for (const auto& cond : it->second->skip) {
            if (conditionSatisfied(session, cond, justAnsweredBlockPath)) return cond.target;
        }
    }
    return std::nullopt;
}

namespace {

void applyJump(Session& session, const std::string& target) {
    if (target == "end") {
        session.status = SessionStatus::SkippedToEnd;
        return;
    }
    std::vector<std::string> blockPaths = instancePathsForBlockId(session, target);
    for (std::size_t i = session.cursor; i < session.sequence.items.size(); ++i) {
        const SequenceItem& item = session.sequence.items[i];
        if (item.componentName == target) {
            session.cursor = i;
            return;
        }
        for (const auto& path : blockPaths) {
            if (withinBlock(item.blockPath, path)) {
                session.cursor = i;
                return;
            }
        }
    }
    session.warnings.push_back("skip target '" + target +
                               "' not found at or after the cursor; session ended");
    session.status = SessionStatus::SkippedToEnd;
}

}  // namespace

void submitAnswer(Session& session, const Json& responses, std::int64_t startedAt,
                  std::int64_t endedAt) {
    if (session.status != SessionStatus::Active)
        throw EngineError(errc::session_ended, "session has ended");
    if (!session.pendingServe)
        throw EngineError(errc::no_pending, "no component is awaiting an answer");
    if (endedAt < startedAt)
        throw EngineError(errc::bad_time, "endedAt precedes startedAt");
    if (!responses.is_object())
        throw EngineError(errc::missing_required, "responses must be an object");

    const SequenceItem& item = session.sequence.items[session.cursor];
    const ComponentDef* component = nullptr;
    if (auto it = session.config->components.find(item.componentName);
        it != session.config->components.end())
        component = &it->second;

    if (component) {
        for (const auto& response : component->responses) {
            if (response.required && !responses.contains(response.id))
                throw EngineError(errc::missing_required,
                                  "required response '" + response.id + "' is missing");
        }
    }

    std::optional<bool> correct;
    if (session.pendingDynamic) {
        correct = session.dynamicStates.at(item.blockPath)->feedAnswer(responses);
    } else if (component && component->hasCorrectAnswers()) {
        bool allMatch = true;
        for (auto it = component->correctAnswers.begin(); it != component->correctAnswers.end();
             ++it) {
            auto answered = responses.find(it.key());
            if (answered == responses.end() || *answered != it.value()) {
                allMatch = false;
                break;
            }
        }
        correct = allMatch;
    }

    TrialRecord record;
    record.instanceId = item.instanceId;
    record.componentName = item.componentName;
    record.blockPath = item.blockPath;
    record.startedAt = startedAt;
    record.endedAt = endedAt;
    record.responses = responses;
    record.correct = correct;
    record.orderParams = item.orderParams;
    record.isInterruption = item.isInterruption;
    session.answers.push_back(std::move(record));

    session.pendingServe = false;
    session.pendingDynamic = false;
    session.cursor += 1;

    if (auto target = evaluateSkip(session, item.blockPath)) applyJump(session, *target);
}

}  // namespace trialkit
