#include "trialkit/sequence.hpp"

#include <algorithm>
#include <set>

#include "trialkit/errors.hpp"

namespace trialkit {

namespace {

SequenceItem makeInterruptionItem(const InterruptionSpec& spec, std::size_t ordinal,
                                  const std::string& blockPath) {
    SequenceItem item;
    item.componentName = spec.components[ordinal % spec.components.size()];
    item.blockPath = blockPath;
    item.isInterruption = true;
    return item;
}

std::vector<SequenceItem> insertDeterministic(std::vector<SequenceItem> items,
                                              const InterruptionSpec& spec,
                                              const std::string& blockPath) {
    if (spec.spacing < 1) throw EngineError(errc::bad_spacing, "spacing must be >= 1");
    std::vector<SequenceItem> out;
    out.reserve(items.size() + items.size() / static_cast<std::size_t>(spec.spacing) + 1);
    std::size_t nextOriginal = 0;
    std::size_t placed = 0;
    for (long long finalIndex = 0; nextOriginal < items.size(); ++finalIndex) {
        const bool interruptionSlot =
            finalIndex >= spec.firstLocation &&
            (finalIndex - spec.firstLocation) % spec.spacing == 0;
        if (interruptionSlot) {
            out.push_back(makeInterruptionItem(spec, placed++, blockPath));
        } else {
            out.push_back(std::move(items[nextOriginal++]));
        }
    }
    return out;
}

std::vector<SequenceItem> insertRandom(std::vector<SequenceItem> items,
                                       const InterruptionSpec& spec, Xoshiro256& rng,
                                       const std::string& blockPath) {
    const long long len = static_cast<long long>(items.size());
    const long long k = spec.numInterruptions;
    const long long d = std::max<long long>(spec.minGap, 1);  // distinct gaps regardless
    const long long reduced = len - (k - 1) * (d - 1);
    if (k < 1) throw EngineError(errc::bad_count, "numInterruptions must be >= 1");
    if (reduced < k)
        throw EngineError(errc::unsatisfiable,
                          "cannot place " + std::to_string(k) + " interruptions with minGap " +
                              std::to_string(spec.minGap) + " into " + std::to_string(len) +
                              " items");

    // Floyd's uniform k-subset of {1..reduced}, then the stars-and-bars shift
    // g_i = y_i + (i-1)(d-1) maps it bijectively onto feasible gap sets.
    std::set<long long> picked;
    for (long long j = reduced - k + 1; j <= reduced; ++j) {
        long long t = 1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(j)));
        if (!picked.insert(t).second) picked.insert(j);
    }
    std::vector<long long> gaps(picked.begin(), picked.end());
    for (std::size_t i = 0; i < gaps.size(); ++i)
        gaps[i] += static_cast<long long>(i) * (d - 1);

    std::vector<SequenceItem> out;
    out.reserve(items.size() + static_cast<std::size_t>(k));
    std::size_t nextGap = 0;
    for (long long i = 0; i < len; ++i) {
        out.push_back(std::move(items[static_cast<std::size_t>(i)]));
        while (nextGap < gaps.size() && gaps[nextGap] == i + 1) {
            out.push_back(makeInterruptionItem(spec, nextGap, blockPath));
            ++nextGap;
        }
    }
    return out;
}

}  // namespace

std::vector<SequenceItem> insertInterruptions(std::vector<SequenceItem> items,
                                              const InterruptionSpec& spec, Xoshiro256& rng,
                                              const std::string& blockPath) {
    if (spec.components.empty())
        throw EngineError(errc::bad_count, "interruption spec has no components");
    if (items.empty()) return items;
    if (spec.variant == InterruptionSpec::Variant::Deterministic)
        return insertDeterministic(std::move(items), spec, blockPath);
    return insertRandom(std::move(items), spec, rng, blockPath);
}

namespace {

struct Realizer {
    const StudyConfig& config;
    long long participantIndex;
    std::uint64_t seed;
    const PoolAssignments& assignments;
    std::map<std::string, std::vector<int>>& blockOrders;

    std::vector<SequenceItem> realizeBlock(const Block& block, const std::string& path) {
        if (block.order == Order::Dynamic) {
            SequenceItem placeholder;
            placeholder.componentName =
                !block.children.empty() && !block.children.front().isBlock()
                    ? block.children.front().name
                    : "";
            placeholder.blockPath = path;
            placeholder.isDynamic = true;
            return {placeholder};
        }

        std::vector<std::size_t> unitOrder(block.children.size());
        for (std::size_t i = 0; i < unitOrder.size(); ++i) unitOrder[i] = i;
        switch (block.order) {
            case Order::Fixed:
                break;
            case Order::Random: {
                Xoshiro256 rng(seedCombine(seed, std::string_view("order"), path,
                                           static_cast<std::uint64_t>(participantIndex)));
                shuffle(unitOrder, rng);
                break;
            }
            case Order::LatinSquare: {
                auto it = assignments.find(path);
                if (it == assignments.end())
                    throw EngineError(errc::missing_assignment,
                                      "latinSquare block '" + path + "' has no pool row");
                if (it->second.size() != block.children.size())
                    throw EngineError(errc::missing_assignment,
                                      "pool row length does not match child count of '" + path +
                                          "'");
                unitOrder.assign(it->second.begin(), it->second.end());
                break;
            }
            case Order::Dynamic:
                break;  // handled above
        }

        if (block.numSamples && *block.numSamples < static_cast<long long>(unitOrder.size()))
            unitOrder.resize(static_cast<std::size_t>(*block.numSamples));
        blockOrders[path] = std::vector<int>(unitOrder.begin(), unitOrder.end());

        std::vector<SequenceItem> items;
        for (std::size_t unit : unitOrder) {
            const BlockChild& child = block.children[unit];
            if (child.isBlock()) {
                const Block& nested = child.block.front();
                auto nestedItems =
                    realizeBlock(nested, path + "/" + blockSegment(nested, unit, false));
                std::move(nestedItems.begin(), nestedItems.end(), std::back_inserter(items));
            } else {
                SequenceItem item;
                item.componentName = child.name;
                item.blockPath = path;
                items.push_back(std::move(item));
            }
        }

        for (std::size_t i = 0; i < block.interruptions.size(); ++i) {
            Xoshiro256 rng(seedCombine(seed, std::string_view("interruptions"), path,
                                       static_cast<std::uint64_t>(i),
                                       static_cast<std::uint64_t>(participantIndex)));
            items = insertInterruptions(std::move(items), block.interruptions[i], rng, path);
        }
        return items;
    }
};

}  // namespace

RealizedSequence realizeSequence(const StudyConfig& config, long long participantIndex,
                                 std::uint64_t seed, const PoolAssignments& assignments) {
    RealizedSequence seq;
    seq.participantIndex = participantIndex;
    seq.seed = seed;
    Realizer realizer{config, participantIndex, seed, assignments, seq.blockOrders};
    seq.items = realizer.realizeBlock(config.sequence, blockSegment(config.sequence, 0, true));

    std::set<std::string> used;
    std::map<std::string, int> ordinals;
    for (auto& item : seq.items) {
        if (item.isDynamic) {
            item.instanceId = item.blockPath + "#dyn";
        } else {
            int& ordinal = ordinals[item.componentName];
            item.instanceId = item.componentName + "#" + std::to_string(ordinal++);
        }
        while (!used.insert(item.instanceId).second) item.instanceId += "'";
    }
    return seq;
}

Json sequenceToJson(const RealizedSequence& seq) {
    Json items = Json::array();
    for (const auto& item : seq.items) {
        Json j = Json::object();
        j["instanceId"] = item.instanceId;
        j["componentName"] = item.componentName;
        j["blockPath"] = item.blockPath;
        j["isInterruption"] = item.isInterruption;
        j["isDynamic"] = item.isDynamic;
        j["orderParams"] = item.orderParams;
        items.push_back(std::move(j));
    }
    Json orders = Json::object();
    for (const auto& [path, order] : seq.blockOrders) orders[path] = order;
    return Json{{"participantIndex", seq.participantIndex},
                {"seed", seq.seed},
                {"items", items},
                {"blockOrders", orders}};
}

RealizedSequence sequenceFromJson(const Json& j) {
    RealizedSequence seq;
    seq.participantIndex = j.at("participantIndex").get<long long>();
    seq.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("blockOrders")) {
        for (auto it = j.at("blockOrders").begin(); it != j.at("blockOrders").end(); ++it)
            seq.blockOrders[it.key()] = it.value().get<std::vector<int>>();
    }
    for (const auto& it : j.at("items")) {
        SequenceItem item;
        item.instanceId = it.at("instanceId").get<std::string>();
        item.componentName = it.at("componentName").get<std::string>();
        item.blockPath = it.at("blockPath").get<std::string>();
        item.isInterruption = it.at("isInterruption").get<bool>();
        item.isDynamic = it.at("isDynamic").get<bool>();
        item.orderParams = it.at("orderParams");
        seq.items.push_back(std::move(item));
    }
    return seq;
}

}  // namespace trialkit
