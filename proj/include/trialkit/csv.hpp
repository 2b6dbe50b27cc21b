#pragma once

#include <map>
#include <string>
#include <vector>

#include "trialkit/provenance.hpp"
#include "trialkit/runtime.hpp"
#include "trialkit/simulator.hpp"

namespace trialkit {

std::string csvEscape(const std::string& field);
std::string csvScalar(const Json& value);

/// Tidy long-format export: one row per (participant, instanceId,
/// responseId), participants and response ids in sorted order, trials in
/// session order.
std::string tidyCsv(const std::map<std::string, std::vector<TrialRecord>>& byParticipant);

/// Reads every <participantId>.trials.json under dir and renders tidyCsv.
std::string tidyCsvFromDir(const std::string& dir);

/// One row per (instanceId, itemId) with dwell totals and visit counts.
std::string dwellCsv(const std::map<std::string, DwellReport>& byInstance);

std::string staircaseRunsCsv(const std::vector<StaircaseRunResult>& runs);

/// Single column of reals, optional non-numeric header line.
std::vector<double> readNumberColumn(const std::string& text);

}  // namespace trialkit
