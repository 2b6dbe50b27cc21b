#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <string>
#include <vector>

#include "trialkit/jsonio.hpp"

namespace trialkit {

/// An n x n grid where each condition index 0..n-1 appears exactly once per
/// row and per column; rows serve as balanced condition orders.
struct LatinSquare {
    int n = 0;
    std::vector<std::vector<int>> rows;
};

/// Unshuffled cyclic construction: row i = [i, i+1, ...] mod n.
LatinSquare buildCyclicLatinSquare(int n);

/// Cyclic square with rows then columns relabeled by seeded permutations.
LatinSquare buildLatinSquare(int n, std::uint64_t seed);

bool isLatinSquare(const LatinSquare& square);

struct PoolAssignment {
    std::vector<int> row;
    std::int64_t assignedAt = 0;  // epoch ms
};

struct PoolRejection {
    std::string participantId;
    std::vector<int> row;
    std::string reason;
};

/// Ledger of Latin square rows across a participant population. Conservation
/// holds after every operation: |queue| + |assigned| + |completed| equals
/// squaresIssued * n (rejected rows were returned to the queue head).
/// Mutations must be externally serialized; the value itself is
/// single-threaded.
struct LatinPool {
    std::string blockPath;
    std::deque<std::vector<int>> queue;
    std::map<std::string, PoolAssignment> assigned;
    std::map<std::string, std::vector<int>> completed;
    std::vector<PoolRejection> rejected;
    std::uint64_t seed = 0;
    long long squaresIssued = 0;

    int order() const;
};

LatinPool makePool(std::string blockPath, int order, std::uint64_t seed);

/// Pops the queue head for this participant, replenishing with a freshly
/// built square first if the queue is empty. E_DOUBLE_ASSIGN if the
/// participant is already assigned or completed.
const std::vector<int>& assignRow(LatinPool& pool, const std::string& participantId,
                                  std::int64_t now);

/// Moves the participant's entry to completed. E_NOT_ASSIGNED if absent.
void completeRow(LatinPool& pool, const std::string& participantId);

/// Returns the participant's row to the queue head and logs the rejection.
void rejectRow(LatinPool& pool, const std::string& participantId, const std::string& reason);

/// Rejects (reason "timeout") every assignment with now - assignedAt
/// strictly greater than timeoutMs; returns the ids in assignment order.
std::vector<std::string> reclaimExpired(LatinPool& pool, std::int64_t now,
                                        std::int64_t timeoutMs);

/// counts[condition][position] over completed rows only.
std::vector<std::vector<int>> balanceReport(const LatinPool& pool);

bool conservationHolds(const LatinPool& pool);

Json poolToJson(const LatinPool& pool);
LatinPool poolFromJson(const Json& j);

}  // namespace trialkit
