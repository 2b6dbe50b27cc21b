#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "trialkit/config.hpp"
#include "trialkit/rng.hpp"

namespace trialkit {

struct SequenceItem {
    std::string instanceId;
    std::string componentName;
    std::string blockPath;  // slash-joined block ids/indices
    bool isInterruption = false;
    bool isDynamic = false;  // placeholder grown by the runtime
    Json orderParams = Json::object();

    bool operator==(const SequenceItem&) const = default;
};

/// One participant's ordered, flattened component schedule. Pure function of
/// (config, participantIndex, seed, poolAssignments); bit-identical across
/// runs and platforms.
struct RealizedSequence {
    long long participantIndex = 0;
    std::uint64_t seed = 0;
    std::vector<SequenceItem> items;
    /// Ordered (truncated) child indices per non-dynamic block path.
    std::map<std::string, std::vector<int>> blockOrders;

    bool operator==(const RealizedSequence&) const = default;
};

/// blockPath of each latinSquare block -> its assigned condition row.
using PoolAssignments = std::map<std::string, std::vector<int>>;

/// Orders each block's immediate children as units (nested blocks stay
/// contiguous), truncates to the numSamples prefix, flattens depth-first,
/// then inserts interruptions. Dynamic blocks contribute one placeholder
/// item. E_MISSING_ASSIGNMENT if a latinSquare block has no pool row.
RealizedSequence realizeSequence(const StudyConfig& config, long long participantIndex,
                                 std::uint64_t seed, const PoolAssignments& assignments = {});

/// Deterministic variant: interruptions occupy final-list indices
/// firstLocation, firstLocation + spacing, ... while originals keep their
/// relative order; never past the last original. Random variant: insertion
/// gaps drawn uniformly among all feasible gap sets (gaps 1..len, at least
/// minGap originals between consecutive interruptions); E_UNSATISFIABLE when
/// no feasible set exists. Interruption names are cycled in spec order.
std::vector<SequenceItem> insertInterruptions(std::vector<SequenceItem> items,
                                              const InterruptionSpec& spec, Xoshiro256& rng,
                                              const std::string& blockPath);

Json sequenceToJson(const RealizedSequence& seq);
RealizedSequence sequenceFromJson(const Json& j);

}  // namespace trialkit
