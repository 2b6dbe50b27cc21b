#include <algorithm>
#include <set>

#include "trialkit/config.hpp"
#include "trialkit/errors.hpp"
#include "trialkit/latin.hpp"
#include "trialkit/runtime.hpp"
#include "trialkit/sequence.hpp"

namespace trialkit {

namespace {

constexpr int kSampleParticipants = 100;  // skip reachability: indices 0..99, seed 0
constexpr std::uint64_t kSampleSeed = 0;

bool validLibraryName(const std::string& name) {
    if (name.empty()) return false;
    auto alpha = [](char c) {
        return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
    };
    auto tail = [&](char c) {
        return alpha(c) || (c >= '0' && c <= '9') || c == '-' || c == '.';
    };
    if (!alpha(name.front())) return false;
    return std::all_of(name.begin() + 1, name.end(), tail);
}

struct BlockRef {
    std::string docPath;    // document path, for report entries
    std::string blockPath;  // realized path, for sampling
    const Block* block;
};

void collectBlocks(const Block& block, const std::string& docPath, const std::string& blockPath,
                   std::vector<BlockRef>& out) {
    out.push_back({docPath, blockPath, &block});
    for (std::size_t i = 0; i < block.children.size(); ++i) {
        const BlockChild& child = block.children[i];
        if (!child.isBlock()) continue;
        const Block& nested = child.block.front();
        collectBlocks(nested, docPath + ".components[" + std::to_string(i) + "]",
                      blockPath + "/" + blockSegment(nested, i, false), out);
    }
}

void checkComponentRef(const StudyConfig& config, const std::string& name,
                       const std::string& path, ValidationReport& report) {
    if (config.components.count(name)) return;
    if (isLibraryRef(name)) {
        report.addWarning("W_LIBRARY_REF", path,
                          "'" + name + "' is treated as externally defined");
        return;
    }
    report.addError(errc::undefined_component, path,
                    "component '" + name + "' is not defined");
}

/// Synthesizes per-participant latinSquare rows so sampling can realize
/// configs without a live pool.
PoolAssignments sampleAssignments(const std::vector<BlockRef>& blocks, long long participant) {
    PoolAssignments assignments;
    for (const auto& ref : blocks) {
        if (ref.block->order != Order::LatinSquare) continue;
        const int n = static_cast<int>(ref.block->children.size());
        if (n < 1) continue;
        LatinSquare square = buildLatinSquare(n, seedCombine(kSampleSeed, ref.blockPath));
        assignments[ref.blockPath] =
            square.rows[static_cast<std::size_t>(participant % n)];
    }
    return assignments;
}

void checkSkipReachability(const StudyConfig& config, const std::vector<BlockRef>& blocks,
                           ValidationReport& report) {
    struct Pending {
        const BlockRef* ref;
        std::size_t condIndex;
        std::string target;
        std::vector<std::string> targetBlockPaths;  // instances when target is a block id
        bool targetIsComponent;
    };
    std::vector<Pending> pending;
    for (const auto& ref : blocks) {
        for (std::size_t c = 0; c < ref.block->skip.size(); ++c) {
            const std::string& target = ref.block->skip[c].target;
            if (target == "end" || isLibraryRef(target)) continue;
            const bool isComponent = config.components.count(target) > 0;
            std::vector<std::string> instancePaths;
            for (const auto& other : blocks)
                if (other.block->id == target) instancePaths.push_back(other.blockPath);
            if (!isComponent && instancePaths.empty()) {
                report.addError(errc::skip_target_undefined,
                                ref.docPath + ".skip[" + std::to_string(c) + "].target",
                                "'" + target + "' names neither a component nor a block id");
                continue;
            }
            pending.push_back({&ref, c, target, std::move(instancePaths), isComponent});
        }
    }
    if (pending.empty()) return;

    std::vector<bool> reachable(pending.size(), true);
    for (long long participant = 0; participant < kSampleParticipants; ++participant) {
        RealizedSequence seq = realizeSequence(config, participant, kSampleSeed,
                                               sampleAssignments(blocks, participant));
        for (std::size_t p = 0; p < pending.size(); ++p) {
            if (!reachable[p]) continue;
            const Pending& entry = pending[p];
            auto inBlock = [](const SequenceItem& item, const std::string& path) {
                return item.blockPath == path ||
                       item.blockPath.rfind(path + "/", 0) == 0;
            };
            std::ptrdiff_t blockFirst = -1;
            for (std::size_t i = 0; i < seq.items.size(); ++i) {
                if (inBlock(seq.items[i], entry.ref->blockPath)) {
                    blockFirst = static_cast<std::ptrdiff_t>(i);
                    break;
                }
            }
            if (blockFirst < 0) continue;  // block absent in this realization
            bool found = false;
            for (std::size_t i = static_cast<std::size_t>(blockFirst) + 1;
                 i < seq.items.size() && !found; ++i) {
                const SequenceItem& item = seq.items[i];
                if (entry.targetIsComponent && item.componentName == entry.target) found = true;
                for (const auto& path : entry.targetBlockPaths)
                    if (inBlock(item, path)) found = true;
            }
            if (!found) reachable[p] = false;
        }
    }
    for (std::size_t p = 0; p < pending.size(); ++p) {
        if (reachable[p]) continue;
        const Pending& entry = pending[p];
        report.addError(errc::skip_target_unreachable,
                        entry.ref->docPath + ".skip[" + std::to_string(entry.condIndex) +
                            "].target",
                        "'" + entry.target +
                            "' does not appear after the block in every sampled realization");
    }
}

}  // namespace

ValidationReport validateConfig(const StudyConfig& config) {
    ValidationReport report;

    for (const auto& [name, def] : config.baseComponents) {
        if (config.components.count(name))
            report.addError(errc::name_collision, "baseComponents." + name,
                            "name is defined both as a component and a base component");
        if (!def.baseComponent.empty())
            report.addError(errc::base_chain, "baseComponents." + name,
                            "base components may not name a base themselves");
    }

    for (const auto& [name, comp] : config.components) {
        const std::string path = "components." + name;
        if (!comp.baseComponent.empty() && !config.baseComponents.count(comp.baseComponent))
            report.addError(errc::base_missing, path,
                            "base component '" + comp.baseComponent + "' is not defined");
        if (comp.compType.empty() && comp.baseComponent.empty())
            report.addError(errc::type, path + ".compType", "compType is missing");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < comp.responses.size(); ++i) {
            const auto& response = comp.responses[i];
            if (!ids.insert(response.id).second)
                report.addError(errc::duplicate_response_id,
                                path + ".responses[" + std::to_string(i) + "].id",
                                "response id '" + response.id + "' repeats");
        }
        for (auto it = comp.correctAnswers.begin(); it != comp.correctAnswers.end(); ++it) {
            if (!ids.count(it.key()))
                report.addError(errc::undefined_response, path + ".correctAnswers." + it.key(),
                                "no response with id '" + it.key() + "'");
        }
    }

    for (std::size_t i = 0; i < config.importedLibraries.size(); ++i) {
        if (!validLibraryName(config.importedLibraries[i]))
            report.addError(errc::bad_library_name,
                            "importedLibraries[" + std::to_string(i) + "]",
                            "'" + config.importedLibraries[i] + "' is not a valid library name");
    }

    std::vector<BlockRef> blocks;
    collectBlocks(config.sequence, "sequence",
                  blockSegment(config.sequence, 0, true), blocks);

    for (const auto& ref : blocks) {
        const Block& block = *ref.block;
        const std::string& path = ref.docPath;

        if (block.order == Order::Dynamic) {
            if (block.id.empty())
                report.addError(errc::missing_block_id, path + ".id",
                                "dynamic blocks require an id");
            if (block.strategyName.empty()) {
                report.addError(errc::dynamic_no_strategy, path + ".strategyName",
                                "dynamic blocks must name a strategy");
            } else if (!strategyExists(block.strategyName)) {
                report.addError(errc::unknown_strategy, path + ".strategyName",
                                "unknown strategy '" + block.strategyName + "'");
            } else {
                try {
                    makeStrategy(block.strategyName, block.strategyParams, 0);
                } catch (const EngineError& e) {
                    report.addError(errc::bad_strategy_params, path + ".params", e.what());
                }
            }
        } else if (block.children.empty()) {
            report.addError(errc::empty_block, path + ".components",
                            "non-dynamic blocks need at least one child");
        }

        if (block.numSamples && !block.children.empty() &&
            *block.numSamples > static_cast<long long>(block.children.size()))
            report.addError(errc::numsamples_exceeds, path + ".numSamples",
                            "numSamples " + std::to_string(*block.numSamples) + " exceeds " +
                                std::to_string(block.children.size()) + " children");

        for (std::size_t i = 0; i < block.children.size(); ++i) {
            const BlockChild& child = block.children[i];
            if (!child.isBlock())
                checkComponentRef(config, child.name,
                                  path + ".components[" + std::to_string(i) + "]", report);
        }

        for (std::size_t i = 0; i < block.interruptions.size(); ++i) {
            const InterruptionSpec& spec = block.interruptions[i];
            const std::string ipath = path + ".interruptions[" + std::to_string(i) + "]";
            if (spec.variant == InterruptionSpec::Variant::Deterministic && spec.spacing < 1)
                report.addError(errc::bad_spacing, ipath + ".spacing", "spacing must be >= 1");
            if (spec.variant == InterruptionSpec::Variant::Random && spec.numInterruptions < 1)
                report.addError(errc::bad_count, ipath + ".numInterruptions",
                                "numInterruptions must be >= 1");
            if (spec.components.empty())
                report.addError(errc::bad_count, ipath + ".components",
                                "interruption needs at least one component");
            for (std::size_t c = 0; c < spec.components.size(); ++c)
                checkComponentRef(config, spec.components[c],
                                  ipath + ".components[" + std::to_string(c) + "]", report);
        }

        for (std::size_t i = 0; i < block.skip.size(); ++i) {
            const SkipCondition& cond = block.skip[i];
            const std::string spath = path + ".skip[" + std::to_string(i) + "]";
            if (cond.variant == SkipCondition::Variant::Response) {
                checkComponentRef(config, cond.componentName, spath + ".componentName", report);
                auto comp = config.components.find(cond.componentName);
                if (comp != config.components.end()) {
                    bool found = false;
                    for (const auto& response : comp->second.responses)
                        if (response.id == cond.responseId) found = true;
                    if (!found)
                        report.addError(errc::undefined_response, spath + ".responseId",
                                        "component '" + cond.componentName +
                                            "' has no response '" + cond.responseId + "'");
                }
            } else {
                bool found = false;
                for (const auto& other : blocks)
                    if (other.block->id == cond.blockId) found = true;
                if (!found)
                    report.addError(errc::skip_target_undefined, spath + ".blockId",
                                    "no block has id '" + cond.blockId + "'");
            }
        }
    }

    if (report.ok()) checkSkipReachability(config, blocks, report);
    return report;
}

}  // namespace trialkit
