#include "trialkit/latin.hpp"

#include <algorithm>

#include "trialkit/errors.hpp"
#include "trialkit/rng.hpp"

namespace trialkit {

LatinSquare buildCyclicLatinSquare(int n) {
    if (n < 1) throw EngineError(errc::bad_order, "square order must be >= 1");
    LatinSquare sq;
    sq.n = n;
    sq.rows.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& row = sq.rows[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) row[static_cast<std::size_t>(j)] = (i + j) % n;
    }
    return sq;
}

LatinSquare buildLatinSquare(int n, std::uint64_t seed) {
    LatinSquare base = buildCyclicLatinSquare(n);
    Xoshiro256 rng(seedCombine(seed, std::string_view("latin-square")));
    std::vector<int> rowPerm = randomPermutation(n, rng);
    std::vector<int> colPerm = randomPermutation(n, rng);
    LatinSquare out;
    out.n = n;
    out.rows.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        auto& row = out.rows[static_cast<std::size_t>(i)];
        row.resize(static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j)
            row[static_cast<std::size_t>(j)] =
                base.rows[static_cast<std::size_t>(rowPerm[static_cast<std::size_t>(i)])]
                         [static_cast<std::size_t>(colPerm[static_cast<std::size_t>(j)])];
    }
    return out;
}

bool isLatinSquare(const LatinSquare& square) {
    const int n = square.n;
    if (n < 1 || square.rows.size() != static_cast<std::size_t>(n)) return false;
    for (int i = 0; i < n; ++i) {
        if (square.rows[static_cast<std::size_t>(i)].size() != static_cast<std::size_t>(n))
            return false;
        std::vector<bool> seenRow(static_cast<std::size_t>(n), false);
        std::vector<bool> seenCol(static_cast<std::size_t>(n), false);
        for (int j = 0; j < n; ++j) {
            int r = square.rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            int c = square.rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
            if (r < 0 || r >= n || c < 0 || c >= n) return false;
            if (seenRow[static_cast<std::size_t>(r)] || seenCol[static_cast<std::size_t>(c)])
                return false;
            seenRow[static_cast<std::size_t>(r)] = true;
            seenCol[static_cast<std::size_t>(c)] = true;
        }
    }
    return true;
}

int LatinPool::order() const {
    if (!queue.empty()) return static_cast<int>(queue.front().size());
    if (!assigned.empty()) return static_cast<int>(assigned.begin()->second.row.size());
    if (!completed.empty()) return static_cast<int>(completed.begin()->second.size());
    return 0;
}

namespace {

void replenish(LatinPool& pool, int n) {
    LatinSquare sq =
        buildLatinSquare(n, seedCombine(pool.seed, static_cast<std::uint64_t>(pool.squaresIssued)));
    for (auto& row : sq.rows) pool.queue.push_back(std::move(row));
    pool.squaresIssued += 1;
}

}  // namespace

LatinPool makePool(std::string blockPath, int order, std::uint64_t seed) {
    if (order < 1) throw EngineError(errc::bad_order, "pool order must be >= 1");
    LatinPool pool;
    pool.blockPath = std::move(blockPath);
    pool.seed = seed;
    replenish(pool, order);
    return pool;
}

const std::vector<int>& assignRow(LatinPool& pool, const std::string& participantId,
                                  std::int64_t now) {
    if (pool.assigned.count(participantId) || pool.completed.count(participantId))
        throw EngineError(errc::double_assign,
                          "participant '" + participantId + "' already holds a row");
    if (pool.queue.empty()) replenish(pool, pool.order());
    PoolAssignment entry{std::move(pool.queue.front()), now};
    pool.queue.pop_front();
    auto [it, inserted] = pool.assigned.emplace(participantId, std::move(entry));
    (void)inserted;
    return it->second.row;
}

void completeRow(LatinPool& pool, const std::string& participantId) {
    auto it = pool.assigned.find(participantId);
    if (it == pool.assigned.end())
        throw EngineError(errc::not_assigned,
                          "participant '" + participantId + "' has no assigned row");
    pool.completed.emplace(participantId, std::move(it->second.row));
    pool.assigned.erase(it);
}

void rejectRow(LatinPool& pool, const std::string& participantId, const std::string& reason) {
    auto it = pool.assigned.find(participantId);
    if (it == pool.assigned.end())
        throw EngineError(errc::not_assigned,
                          "participant '" + participantId + "' has no assigned row");
    pool.rejected.push_back({participantId, it->second.row, reason});
    pool.queue.push_front(std::move(it->second.row));
    pool.assigned.erase(it);
}

std::vector<std::string> reclaimExpired(LatinPool& pool, std::int64_t now,
                                        std::int64_t timeoutMs) {
    std::vector<std::pair<std::int64_t, std::string>> expired;
    for (const auto& [pid, entry] : pool.assigned) {
        if (now - entry.assignedAt > timeoutMs) expired.emplace_back(entry.assignedAt, pid);
    }
    std::stable_sort(expired.begin(), expired.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<std::string> reclaimed;
    reclaimed.reserve(expired.size());
    for (const auto& [at, pid] : expired) {
        rejectRow(pool, pid, "timeout");
        reclaimed.push_back(pid);
    }
    return reclaimed;
}

std::vector<std::vector<int>> balanceReport(const LatinPool& pool) {
    const int n = pool.order();
    std::vector<std::vector<int>> counts(static_cast<std::size_t>(n),
                                         std::vector<int>(static_cast<std::size_t>(n), 0));
    for (const auto& [pid, row] : pool.completed) {
        for (std::size_t pos = 0; pos < row.size(); ++pos)
            counts[static_cast<std::size_t>(row[pos])][pos] += 1;
    }
    return counts;
}

bool conservationHolds(const LatinPool& pool) {
    const long long total = static_cast<long long>(pool.queue.size()) +
                            static_cast<long long>(pool.assigned.size()) +
                            static_cast<long long>(pool.completed.size());
    return total == pool.squaresIssued * pool.order();
}

Json poolToJson(const LatinPool& pool) {
    Json j = Json::object();
    j["blockPath"] = pool.blockPath;
    j["queue"] = Json::array();
    for (const auto& row : pool.queue) j["queue"].push_back(row);
    Json assigned = Json::object();
    for (const auto& [pid, entry] : pool.assigned)
        assigned[pid] = Json{{"row", entry.row}, {"assignedAt", entry.assignedAt}};
    j["assigned"] = assigned;
    Json completed = Json::object();
    for (const auto& [pid, row] : pool.completed) completed[pid] = row;
    j["completed"] = completed;
    Json rejected = Json::array();
    for (const auto& r : pool.rejected)
        rejected.push_back(
            Json{{"participantId", r.participantId}, {"row", r.row}, {"reason", r.reason}});
    j["rejected"] = rejected;
    j["seed"] = pool.seed;
    j["squaresIssued"] = pool.squaresIssued;
    return j;
}

LatinPool poolFromJson(const Json& j) {
    LatinPool pool;
    pool.blockPath = j.at("blockPath").get<std::string>();
    for (const auto& row : j.at("queue")) pool.queue.push_back(row.get<std::vector<int>>());
    for (auto it = j.at("assigned").begin(); it != j.at("assigned").end(); ++it)
        pool.assigned[it.key()] = PoolAssignment{it.value().at("row").get<std::vector<int>>(),
                                                 it.value().at("assignedAt").get<std::int64_t>()};
    for (auto it = j.at("completed").begin(); it != j.at("completed").end(); ++it)
        pool.completed[it.key()] = it.value().get<std::vector<int>>();
    for (const auto& r : j.at("rejected"))
        pool.rejected.push_back({r.at("participantId").get<std::string>(),
                                 r.at("row").get<std::vector<int>>(),
                                 r.at("reason").get<std::string>()});
    pool.seed = j.at("seed").get<std::uint64_t>();
    pool.squaresIssued = j.at("squaresIssued").get<long long>();
    return pool;
}

}  // namespace trialkit
