#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "trialkit/jsonio.hpp"

namespace trialkit {

/// Domain model of the study DSL. A study document is UTF-8 JSON; field
/// names match these types one to one (lowerCamelCase). Canonical form:
/// keys sorted lexicographically, 2-space indent, LF line endings.

enum class Order { Fixed, Random, LatinSquare, Dynamic };

std::string orderName(Order o);

struct InterruptionSpec {
    enum class Variant { Deterministic, Random };
    Variant variant = Variant::Deterministic;
    // deterministic
    long long firstLocation = 0;
    long long spacing = 1;
    // random
    long long numInterruptions = 1;
    long long minGap = 0;
    std::vector<std::string> components;  // cycled over insertion points

    bool operator==(const InterruptionSpec&) const = default;
};

struct SkipCondition {
    enum class Variant { Block, RepeatedBlock, Response };
    Variant variant = Variant::Block;
    // blockCondition / repeatedBlockCondition
    std::string blockId;
    std::string check;  // numCorrect | numIncorrect
    long long threshold = 1;
    // responseCondition
    std::string componentName;
    std::string responseId;
    std::string comparator;  // eq | neq | lt | gt
    Json value;
    // common
    std::string target;  // component Name, block id, or "end"

    bool operator==(const SkipCondition&) const = default;
};

struct Block;

/// Exactly one of {name, block} is set; vector-of-one keeps the type
/// regular while Block is still incomplete here.
struct BlockChild {
    std::string name;
    std::vector<Block> block;

    bool isBlock() const { return !block.empty(); }
    bool operator==(const BlockChild&) const;
};

struct Block {
    Order order = Order::Fixed;
    std::string strategyName;       // dynamic only
    Json strategyParams = Json::object();
    std::vector<BlockChild> children;
    std::optional<long long> numSamples;
    std::vector<InterruptionSpec> interruptions;
    std::vector<SkipCondition> skip;
    std::string id;  // optional; required for dynamic blocks

    bool operator==(const Block&) const = default;
};

struct ResponseDef {
    std::string id;
    std::string kind;  // closed set, see responseKinds()
    bool required = false;
    Json parameters = Json::object();

    bool operator==(const ResponseDef&) const = default;
};

const std::vector<std::string>& responseKinds();

struct ComponentDef {
    std::string baseComponent;  // cleared by resolveInheritance
    std::string compType;
    Json payload = Json::object();  // opaque; never interpreted
    std::vector<ResponseDef> responses;
    Json correctAnswers = Json::object();  // responseId -> scalar

    bool hasCorrectAnswers() const { return !correctAnswers.empty(); }
    bool operator==(const ComponentDef&) const = default;
};

struct StudyConfig {
    Json studyMetadata = Json::object();
    std::vector<std::string> importedLibraries;
    std::map<std::string, ComponentDef> baseComponents;
    std::map<std::string, ComponentDef> components;
    Block sequence;

    bool operator==(const StudyConfig&) const = default;
};

struct Issue {
    std::string code;
    std::string path;
    std::string message;

    bool operator==(const Issue&) const = default;
};

struct ValidationReport {
    std::vector<Issue> errors;
    std::vector<Issue> warnings;

    bool ok() const { return errors.empty(); }
    bool hasError(const std::string& code) const;
    void addError(std::string code, std::string path, std::string message);
    void addWarning(std::string code, std::string path, std::string message);
};

enum class ParseMode { Strict, Lenient };

using ParseResult = std::variant<StudyConfig, ValidationReport>;

/// Syntax + shape only: builds the value exactly as written (inheritance
/// references intact). Strict mode rejects unknown fields outside opaque
/// payload/parameter mappings.
ParseResult parseDocument(const std::string& text, ParseMode mode = ParseMode::Strict);

/// Single-level shallow merge: the child's explicitly set top-level fields
/// win; responses lists replace wholesale. A base naming another base is an
/// error (E_BASE_CHAIN), as is a missing base (E_BASE_MISSING).
ParseResult resolveInheritance(const StudyConfig& config);

/// Structural validation of a (resolved) config. Errors are data; an empty
/// error list means the config is compilable. Skip-target reachability is
/// checked over sampled realizations for participant indices 0..99, seed 0.
ValidationReport validateConfig(const StudyConfig& config);

/// Full pipeline: parse -> resolveInheritance -> validateConfig. Returns the
/// resolved config, or the first stage's report with at least one error.
ParseResult parseStudyConfig(const std::string& text, ParseMode mode = ParseMode::Strict);

Json toJson(const StudyConfig& config);
std::string canonicalizeConfig(const StudyConfig& config);

/// "lib:"-prefixed names are treated as externally defined (see
/// importedLibraries); they lint as W_LIBRARY_REF instead of failing
/// reference validation.
bool isLibraryRef(const std::string& name);

/// Path segment contributed by a block: its id when set, else its child
/// index within the parent. The root block's fallback segment is "root".
std::string blockSegment(const Block& block, std::size_t indexInParent, bool isRoot);

/// Pre-order walk over a block tree with slash-joined paths.
void forEachBlock(const Block& root,
                  const std::function<void(const std::string& path, const Block&)>& fn);

}  // namespace trialkit
