#include "trialkit/csv.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <sstream>

#include "trialkit/errors.hpp"

namespace trialkit {

std::string csvEscape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string csvScalar(const Json& value) {
    if (value.is_null()) return "";
    if (value.is_string()) return csvEscape(value.get<std::string>());
    if (value.is_boolean()) return value.get<bool>() ? "true" : "false";
    if (value.is_number_integer()) return std::to_string(value.get<long long>());
    if (value.is_number_unsigned()) return std::to_string(value.get<unsigned long long>());
    if (value.is_number_float()) return formatDouble(value.get<double>());
    return csvEscape(compactDump(value));
}

std::string tidyCsv(const std::map<std::string, std::vector<TrialRecord>>& byParticipant) {
    std::string out =
        "participantId,instanceId,componentName,responseId,value,correct,startedAt,endedAt\n";
    for (const auto& [pid, records] : byParticipant) {
        for (const auto& record : records) {
            for (auto it = record.responses.begin(); it != record.responses.end(); ++it) {
                out += csvEscape(pid);
                out += ',';
                out += csvEscape(record.instanceId);
                out += ',';
                out += csvEscape(record.componentName);
                out += ',';
                out += csvEscape(it.key());
                out += ',';
                out += csvScalar(it.value());
                out += ',';
                out += record.correct ? (*record.correct ? "true" : "false") : "";
                out += ',';
                out += std::to_string(record.startedAt);
                out += ',';
                out += std::to_string(record.endedAt);
                out += '\n';
            }
        }
    }
    return out;
}

std::string tidyCsvFromDir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::map<std::string, std::vector<TrialRecord>> byParticipant;
    if (!fs::is_directory(dir))
        throw EngineError(errc::io, "'" + dir + "' is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > 12 && name.substr(name.size() - 12) == ".trials.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        std::string pid = path.filename().string();
        pid.resize(pid.size() - 12);
        Json doc = Json::parse(readFile(path), nullptr, false);
        if (doc.is_discarded() || !doc.is_array())
            throw EngineError(errc::syntax, path.string() + " is not a JSON trial list");
        std::vector<TrialRecord> records;
        for (const auto& j : doc) records.push_back(trialFromJson(j));
        byParticipant.emplace(std::move(pid), std::move(records));
    }
    return tidyCsv(byParticipant);
}

std::string dwellCsv(const std::map<std::string, DwellReport>& byInstance) {
    std::string out = "instanceId,itemId,totalDwellMs,visits,searchDwellMs,nonSearchDwellMs\n";
    for (const auto& [instanceId, report] : byInstance) {
        for (const auto& [itemId, stats] : report.items) {
            out += csvEscape(instanceId);
            out += ',';
            out += csvEscape(itemId);
            out += ',';
            out += std::to_string(stats.totalDwell);
            out += ',';
            out += std::to_string(stats.visits);
            out += ',';
            out += std::to_string(stats.searchDwell);
            out += ',';
            out += std::to_string(stats.nonSearchDwell);
            out += '\n';
        }
    }
    return out;
}

std::string staircaseRunsCsv(const std::vector<StaircaseRunResult>& runs) {
    std::string out = "seed,trials,terminationReason,jndEstimate,attentionPassRate,excluded\n";
    for (const auto& run : runs) {
        out += std::to_string(run.seed);
        out += ',';
        out += std::to_string(run.trials);
        out += ',';
        out += run.termination;
        out += ',';
        out += formatDouble(run.jndEstimate);
        out += ',';
        out += formatDouble(run.attentionPassRate);
        out += ',';
        out += run.excluded ? "true" : "false";
        out += '\n';
    }
    return out;
}

std::vector<double> readNumberColumn(const std::string& text) {
    std::vector<double> values;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
        if (line.empty()) continue;
        double v = 0.0;
        auto res = std::from_chars(line.data(), line.data() + line.size(), v);
        if (res.ec != std::errc{} || res.ptr != line.data() + line.size()) {
            if (first) {
                first = false;  // permit one header line
                continue;
            }
            throw EngineError(errc::type, "not a number: '" + line + "'");
        }
        first = false;
        values.push_back(v);
    }
    return values;
}

}  // namespace trialkit
