#include "trialkit/lint.hpp"

#include <algorithm>
#include <set>

namespace trialkit {

namespace {

void collectReferences(const Block& block, std::set<std::string>& referenced) {
    for (const auto& child : block.children) {
        if (child.isBlock())
            collectReferences(child.block.front(), referenced);
        else
            referenced.insert(child.name);
    }
    for (const auto& spec : block.interruptions)
        referenced.insert(spec.components.begin(), spec.components.end());
}

}  // namespace

LintReport lint(const StudyConfig& config) {
    LintReport report;
    auto add = [&](const char* code, const char* severity, std::string path,
                   std::string message) {
        report.findings.push_back({code, severity, std::move(path), std::move(message)});
    };

    std::set<std::string> referenced;
    collectReferences(config.sequence, referenced);

    for (const auto& [name, comp] : config.components) {
        if (!referenced.count(name))
            add("W_UNUSED_COMPONENT", "warn", "components." + name,
                "component '" + name + "' is defined but never used");
        if (comp.compType == "form" && comp.responses.empty())
            add("W_NO_RESPONSES", "warn", "components." + name,
                "form component '" + name + "' collects no responses");
    }

    std::set<std::string> usedBases;
    for (const auto& [name, comp] : config.components)
        if (!comp.baseComponent.empty()) usedBases.insert(comp.baseComponent);
    for (const auto& [name, base] : config.baseComponents) {
        if (!usedBases.count(name))
            add("W_UNUSED_BASE", "warn", "baseComponents." + name,
                "base component '" + name + "' is never inherited from");
    }

    struct Walker {
        decltype(add)& emit;
        void walk(const Block& block, const std::string& path) {
            if (block.order == Order::Dynamic && block.children.empty())
                emit("W_EMPTY_BLOCK", "info", path,
                     "dynamic block has no static children; trials carry no component");
            if (block.order == Order::LatinSquare && block.children.size() == 1)
                emit("W_SINGLE_CHILD_LATIN", "warn", path + ".order",
                     "latinSquare over a single child is degenerate");
            if (!block.interruptions.empty()) {
                std::set<std::string> childNames;
                for (const auto& child : block.children)
                    if (!child.isBlock()) childNames.insert(child.name);
                for (std::size_t i = 0; i < block.interruptions.size(); ++i) {
                    for (const auto& name : block.interruptions[i].components) {
                        if (childNames.count(name))
                            emit("W_INTERRUPTION_SHADOWS_NUMSAMPLES", "info",
                                 path + ".interruptions[" + std::to_string(i) + "]",
                                 "interruption component '" + name +
                                     "' is also a child of this block");
                    }
                }
            }
            for (std::size_t i = 0; i < block.children.size(); ++i) {
                if (block.children[i].isBlock())
                    walk(block.children[i].block.front(),
                         path + ".components[" + std::to_string(i) + "]");
            }
        }
    } walker{add};
    walker.walk(config.sequence, "sequence");

    std::stable_sort(report.findings.begin(), report.findings.end(),
                     [](const LintFinding& a, const LintFinding& b) {
                         if (a.path != b.path) return a.path < b.path;
                         return a.code < b.code;
                     });
    return report;
}

}  // namespace trialkit
