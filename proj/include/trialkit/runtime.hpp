#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trialkit/config.hpp"
#include "trialkit/sequence.hpp"
#include "trialkit/staircase.hpp"

namespace trialkit {

struct TrialRecord {
    std::string instanceId;
    std::string componentName;
    std::string blockPath;
    std::int64_t startedAt = 0;
    std::int64_t endedAt = 0;
    Json responses = Json::object();      // responseId -> scalar
    std::optional<bool> correct;          // present iff the trial was graded
    Json orderParams = Json::object();
    bool isInterruption = false;
};

Json trialToJson(const TrialRecord& record);
TrialRecord trialFromJson(const Json& j);

/// Dynamic-ordering strategy driving one block. nextTrial is called when the
/// session cursor reaches the block; feedAnswer grades and records the
/// response to the trial most recently emitted.
class DynamicStrategy {
public:
    virtual ~DynamicStrategy() = default;
    virtual std::variant<TrialSpec, StopReason> nextTrial() = 0;
    virtual bool feedAnswer(const Json& responses) = 0;  // returns correctness
    /// Introspection for analytics; null for non-staircase strategies.
    virtual const StaircaseState* staircase() const { return nullptr; }
};

bool strategyExists(const std::string& name);
/// Throws E_UNKNOWN_STRATEGY / E_BAD_PARAMS.
std::unique_ptr<DynamicStrategy> makeStrategy(const std::string& name, const Json& params,
                                              std::uint64_t seed);

enum class SessionStatus { Active, Finished, SkippedToEnd };

struct ServedComponent {
    std::string instanceId;
    std::string componentName;
    Json orderParams;
};

struct Done {};

/// One participant's session. Single-threaded value; the config must outlive
/// it. Serving and answering alternate strictly; dynamic blocks grow the
/// item list as their strategies emit trials.
struct Session {
    const StudyConfig* config = nullptr;
    RealizedSequence sequence;
    std::size_t cursor = 0;
    std::vector<TrialRecord> answers;
    std::map<std::string, std::unique_ptr<DynamicStrategy>> dynamicStates;  // by blockPath
    SessionStatus status = SessionStatus::Active;
    std::vector<std::string> warnings;

    // serving bookkeeping
    bool pendingServe = false;
    bool pendingDynamic = false;
    std::map<std::string, long long> dynamicTrialCounts;
    std::map<std::string, const Block*> blocksByPath;
};

Session startSession(const StudyConfig& config, RealizedSequence realized);

/// Serves the item under the cursor; a dynamic block is asked for its next
/// trial (Stop closes the block and the walk continues). Returns Done once
/// the sequence is exhausted or the session has ended.
std::variant<ServedComponent, Done> nextComponent(Session& session);

/// Grades the served component, appends the TrialRecord, advances the
/// cursor, and applies the first satisfied skip condition (innermost block
/// first, declaration order within a block). E_NO_PENDING without a served
/// component, E_MISSING_REQUIRED if a required response is absent (session
/// unchanged), E_SESSION_ENDED after the session ended.
void submitAnswer(Session& session, const Json& responses, std::int64_t startedAt,
                  std::int64_t endedAt);

/// Returns the jump target of the first satisfied skip condition among the
/// blocks enclosing the just-answered item, or nullopt.
std::optional<std::string> evaluateSkip(const Session& session,
                                        const std::string& justAnsweredBlockPath);

}  // namespace trialkit
