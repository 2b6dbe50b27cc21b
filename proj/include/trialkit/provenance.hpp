#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "trialkit/jsonio.hpp"

namespace trialkit {

/// One line of a participant event log (UTF-8 JSON Lines, t in epoch ms).
struct ProvenanceEvent {
    std::int64_t t = 0;
    std::string kind;  // componentStart, componentEnd, hoverEnter, hoverExit,
                       // click, keypress, searchQuery, custom
    std::string instanceId;
    std::string itemId;  // optional target identifier (chart element)
    Json payload = Json::object();
    std::optional<bool> searchHighlighted;

    bool operator==(const ProvenanceEvent&) const = default;
};

const std::vector<std::string>& provenanceEventKinds();

Json eventToJson(const ProvenanceEvent& event);
ProvenanceEvent eventFromJson(const Json& j);

std::vector<ProvenanceEvent> parseEventLog(const std::string& jsonl);
std::string serializeEventLog(std::span<const ProvenanceEvent> events);

struct LogFlag {
    std::string code;        // NON_MONOTONIC, UNMATCHED_EXIT, ...
    std::size_t eventIndex;  // offending line
    std::string message;
};

/// Flags non-monotonic timestamps, unmatched hover/component pairs, events
/// outside any component interval, same-item overlapping hovers, and unknown
/// kinds. A log with zero flags is replayable.
std::vector<LogFlag> validateLog(std::span<const ProvenanceEvent> events);

struct TimelineEntry {
    std::string instanceId;
    std::int64_t start = 0;
    std::int64_t end = 0;
    std::int64_t duration = 0;
    long long eventCount = 0;  // events strictly inside the interval
};

struct Timeline {
    std::vector<TimelineEntry> entries;  // in log order
    std::int64_t totalDuration = 0;      // first start to last end
};

/// One interval per componentStart/componentEnd pair, in log order.
/// E_INVALID_LOG when validateLog reports structural flags.
Timeline reconstructTimeline(std::span<const ProvenanceEvent> events);

Json timelineToJson(const Timeline& timeline);

struct DwellStats {
    std::int64_t totalDwell = 0;
    long long visits = 0;
    std::int64_t searchDwell = 0;
    std::int64_t nonSearchDwell = 0;
};

struct DwellReport {
    std::map<std::string, DwellStats> items;  // by itemId
    std::int64_t maxDwell = 0;
};

/// Hover dwell per itemId within one component instance. Spans whose enter
/// event carried searchHighlighted=true accrue to searchDwell for the whole
/// span; a hover still open at componentEnd closes there.
DwellReport dwellPerItem(std::span<const ProvenanceEvent> events,
                         const std::string& instanceId);

/// Keeps participants whose maxDwell strictly exceeds thresholdMs, sorted.
std::vector<std::string> excludeByDwell(const std::map<std::string, DwellReport>& participants,
                                        std::int64_t thresholdMs = 500);

}  // namespace trialkit
