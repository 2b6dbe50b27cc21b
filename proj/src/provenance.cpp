#include "trialkit/provenance.hpp"

#include <algorithm>
#include <sstream>

#include "trialkit/errors.hpp"

namespace trialkit {

const std::vector<std::string>& provenanceEventKinds() {
    static const std::vector<std::string> kinds = {
        "componentStart", "componentEnd", "hoverEnter", "hoverExit",
        "click",          "keypress",     "searchQuery", "custom"};
    return kinds;
}

Json eventToJson(const ProvenanceEvent& event) {
    Json j = Json::object();
    j["t"] = event.t;
    j["kind"] = event.kind;
    j["instanceId"] = event.instanceId;
    if (!event.itemId.empty()) j["itemId"] = event.itemId;
    if (!event.payload.empty()) j["payload"] = event.payload;
    if (event.searchHighlighted) j["searchHighlighted"] = *event.searchHighlighted;
    return j;
}

ProvenanceEvent eventFromJson(const Json& j) {
    ProvenanceEvent event;
    event.t = j.at("t").get<std::int64_t>();
    event.kind = j.at("kind").get<std::string>();
    event.instanceId = j.at("instanceId").get<std::string>();
    if (j.contains("itemId")) event.itemId = j.at("itemId").get<std::string>();
    if (j.contains("payload")) event.payload = j.at("payload");
    if (j.contains("searchHighlighted"))
        event.searchHighlighted = j.at("searchHighlighted").get<bool>();
    return event;
}

std::vector<ProvenanceEvent> parseEventLog(const std::string& jsonl) {
    std::vector<ProvenanceEvent> events;
    std::istringstream in(jsonl);
    std::string line;
    std::size_t lineNo = 0;
    while (std::getline(in, line)) {
        ++lineNo;
        if (line.empty()) continue;
        Json j = Json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw EngineError(errc::syntax,
                              "event log line " + std::to_string(lineNo) + " is not JSON");
        try {
            events.push_back(eventFromJson(j));
        } catch (const Json::exception& e) {
            throw EngineError(errc::type, "event log line " + std::to_string(lineNo) + ": " +
                                              e.what());
        }
    }
    return events;
}

std::string serializeEventLog(std::span<const ProvenanceEvent> events) {
    std::string out;
    for (const auto& event : events) {
        out += compactDump(eventToJson(event));
        out += '\n';
    }
    return out;
}

std::vector<LogFlag> validateLog(std::span<const ProvenanceEvent> events) {
    std::vector<LogFlag> flags;
    auto flag = [&](const char* code, std::size_t index, std::string message) {
        flags.push_back({code, index, std::move(message)});
    };

    const auto& kinds = provenanceEventKinds();
    std::int64_t lastT = std::numeric_limits<std::int64_t>::min();
    // open component: instanceId -> start index
    std::map<std::string, std::size_t> openComponents;
    // open hover: (instanceId, itemId) -> enter index
    std::map<std::pair<std::string, std::string>, std::size_t> openHovers;

    for (std::size_t i = 0; i < events.size(); ++i) {
        const ProvenanceEvent& e = events[i];
        if (std::find(kinds.begin(), kinds.end(), e.kind) == kinds.end())
            flag("UNKNOWN_KIND", i, "unknown event kind '" + e.kind + "'");
        if (e.t < lastT) flag("NON_MONOTONIC", i, "timestamp decreases");
        lastT = std::max(lastT, e.t);

        if (e.kind == "componentStart") {
            if (!openComponents.empty())
                flag("COMPONENT_OVERLAP", i,
                     "component starts while another is open");
            if (openComponents.count(e.instanceId))
                flag("DUPLICATE_START", i, "component '" + e.instanceId + "' already open");
            openComponents[e.instanceId] = i;
        } else if (e.kind == "componentEnd") {
            auto it = openComponents.find(e.instanceId);
            if (it == openComponents.end()) {
                flag("UNMATCHED_END", i, "componentEnd without componentStart");
            } else {
                openComponents.erase(it);
                // open hovers close silently at componentEnd
                for (auto h = openHovers.begin(); h != openHovers.end();) {
                    if (h->first.first == e.instanceId)
                        h = openHovers.erase(h);
                    else
                        ++h;
                }
            }
        } else {
            if (!openComponents.count(e.instanceId))
                flag("OUTSIDE_COMPONENT", i,
                     "event outside any open component interval");
            if (e.kind == "hoverEnter") {
                if (e.itemId.empty()) flag("MISSING_ITEM_ID", i, "hoverEnter without itemId");
                auto key = std::make_pair(e.instanceId, e.itemId);
                if (openHovers.count(key))
                    flag("SAME_ITEM_OVERLAP", i,
                         "hover on '" + e.itemId + "' is already open");
                openHovers[key] = i;
            } else if (e.kind == "hoverExit") {
                auto key = std::make_pair(e.instanceId, e.itemId);
                auto it = openHovers.find(key);
                if (it == openHovers.end())
                    flag("UNMATCHED_EXIT", i, "hoverExit without hoverEnter");
                else
                    openHovers.erase(it);
            }
        }
    }
    for (const auto& [instanceId, index] : openComponents)
        flag("UNMATCHED_START", index, "component '" + instanceId + "' never ends");
    return flags;
}

namespace {

void requireValid(std::span<const ProvenanceEvent> events) {
    auto flags = validateLog(events);
    if (!flags.empty())
        throw EngineError(errc::invalid_log,
                          flags.front().code + " at event " +
                              std::to_string(flags.front().eventIndex));
}

}  // namespace

Timeline reconstructTimeline(std::span<const ProvenanceEvent> events) {
    requireValid(events);
    Timeline timeline;
    std::map<std::string, std::pair<std::int64_t, long long>> open;  // start t, event count
    for (const auto& e : events) {
        if (e.kind == "componentStart") {
            open[e.instanceId] = {e.t, 0};
        } else if (e.kind == "componentEnd") {
            auto it = open.find(e.instanceId);
            TimelineEntry entry;
            entry.instanceId = e.instanceId;
            entry.start = it->second.first;
            entry.end = e.t;
            entry.duration = entry.end - entry.start;
            entry.eventCount = it->second.second;
            timeline.entries.push_back(std::move(entry));
            open.erase(it);
        } else {
            auto it = open.find(e.instanceId);
            if (it != open.end()) it->second.second += 1;
        }
    }
    if (!timeline.entries.empty())
        timeline.totalDuration = timeline.entries.back().end - timeline.entries.front().start;
    return timeline;
}

Json timelineToJson(const Timeline& timeline) {
    Json entries = Json::array();
    for (const auto& entry : timeline.entries) {
        entries.push_back(Json{{"instanceId", entry.instanceId},
                               {"start", entry.start},
                               {"end", entry.end},
                               {"duration", entry.duration},
                               {"eventCount", entry.eventCount}});
    }
    return Json{{"entries", entries}, {"totalDuration", timeline.totalDuration}};
}

DwellReport dwellPerItem(std::span<const ProvenanceEvent> events,
                         const std::string& instanceId) {
    requireValid(events);
    DwellReport report;
    struct OpenHover {
        std::int64_t enteredAt;
        bool highlighted;
    };
    std::map<std::string, OpenHover> open;  // by itemId
    bool inside = false;

    auto close = [&](const std::string& itemId, std::int64_t at) {
        auto it = open.find(itemId);
        if (it == open.end()) return;
        DwellStats& stats = report.items[itemId];
        const std::int64_t span = at - it->second.enteredAt;
        stats.totalDwell += span;
        stats.visits += 1;
        (it->second.highlighted ? stats.searchDwell : stats.nonSearchDwell) += span;
        open.erase(it);
    };

    for (const auto& e : events) {
        if (e.instanceId != instanceId) continue;
        if (e.kind == "componentStart") {
            inside = true;
        } else if (e.kind == "componentEnd") {
            // unclosed hovers accrue up to the component end
            while (!open.empty()) close(open.begin()->first, e.t);
            inside = false;
        } else if (inside && e.kind == "hoverEnter") {
            open[e.itemId] = {e.t, e.searchHighlighted.value_or(false)};
        } else if (inside && e.kind == "hoverExit") {
            close(e.itemId, e.t);
        }
    }
    for (const auto& [itemId, stats] : report.items)
        report.maxDwell = std::max(report.maxDwell, stats.totalDwell);
    return report;
}

std::vector<std::string> excludeByDwell(const std::map<std::string, DwellReport>& participants,
                                        std::int64_t thresholdMs) {
    std::vector<std::string> kept;
    for (const auto& [id, report] : participants)
        if (report.maxDwell > thresholdMs) kept.push_back(id);
    return kept;  // map iteration is already id-sorted
}

}  // namespace trialkit
