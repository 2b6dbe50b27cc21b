#include "trialkit/config.hpp"

#include <algorithm>

#include "trialkit/errors.hpp"

namespace trialkit {

bool BlockChild::operator==(const BlockChild& other) const {
    return name == other.name && block == other.block;
}

std::string orderName(Order o) {
    switch (o) {
        case Order::Fixed: return "fixed";
        case Order::Random: return "random";
        case Order::LatinSquare: return "latinSquare";
        case Order::Dynamic: return "dynamic";
    }
    return "fixed";
}

const std::vector<std::string>& responseKinds() {
    static const std::vector<std::string> kinds = {
        "numerical", "shortText", "longText", "likert",  "dropdown", "slider",
        "radio",     "checkbox",  "matrix",   "reactive", "video"};
    return kinds;
}

bool isLibraryRef(const std::string& name) {
    return name.rfind("lib:", 0) == 0;
}

bool ValidationReport::hasError(const std::string& code) const {
    return std::any_of(errors.begin(), errors.end(),
                       [&](const Issue& i) { return i.code == code; });
}

void ValidationReport::addError(std::string code, std::string path, std::string message) {
    errors.push_back({std::move(code), std::move(path), std::move(message)});
}

void ValidationReport::addWarning(std::string code, std::string path, std::string message) {
    warnings.push_back({std::move(code), std::move(path), std::move(message)});
}

std::string blockSegment(const Block& block, std::size_t indexInParent, bool isRoot) {
    if (!block.id.empty()) return block.id;
    return isRoot ? std::string("root") : std::to_string(indexInParent);
}

namespace {

void walkBlocks(const Block& block, const std::string& path,
                const std::function<void(const std::string&, const Block&)>& fn) {
    fn(path, block);
    for (std::size_t i = 0; i < block.children.size(); ++i) {
        const BlockChild& child = block.children[i];
        if (child.isBlock()) {
            const Block& nested = child.block.front();
            walkBlocks(nested, path + "/" + blockSegment(nested, i, false), fn);
        }
    }
}

}  // namespace

void forEachBlock(const Block& root,
                  const std::function<void(const std::string& path, const Block&)>& fn) {
    walkBlocks(root, blockSegment(root, 0, true), fn);
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Shape {
    ValidationReport& report;
    bool strict;

    void error(const char* code, const std::string& path, const std::string& msg) {
        report.addError(code, path, msg);
    }

    bool requireObject(const Json& j, const std::string& path) {
        if (j.is_object()) return true;
        error(errc::type, path, "expected an object");
        return false;
    }

    void checkKnownKeys(const Json& obj, const std::string& path,
                        std::initializer_list<const char*> known) {
        if (!strict) return;
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            bool found = false;
            for (const char* k : known) {
                if (it.key() == k) {
                    found = true;
                    break;
                }
            }
            if (!found) error(errc::unknown_field, path + "." + it.key(), "unknown field");
        }
    }

    std::string getString(const Json& obj, const char* key, const std::string& path,
                          bool required, const std::string& fallback = "") {
        auto it = obj.find(key);
        if (it == obj.end()) {
            if (required) error(errc::type, path + "." + key, "missing required string field");
            return fallback;
        }
        if (!it->is_string()) {
            error(errc::type, path + "." + key, "expected a string");
            return fallback;
        }
        return it->get<std::string>();
    }

    std::optional<long long> getInteger(const Json& obj, const char* key,
                                        const std::string& path, long long minValue) {
        auto it = obj.find(key);
        if (it == obj.end()) return std::nullopt;
        if (!it->is_number_integer() && !it->is_number_unsigned()) {
            error(errc::type, path + "." + key, "expected an integer");
            return std::nullopt;
        }
        long long v = it->get<long long>();
        if (v < minValue) {
            error(errc::type, path + "." + key,
                  "must be >= " + std::to_string(minValue));
            return std::nullopt;
        }
        return v;
    }

    bool getBool(const Json& obj, const char* key, const std::string& path, bool fallback) {
        auto it = obj.find(key);
        if (it == obj.end()) return fallback;
        if (!it->is_boolean()) {
            error(errc::type, path + "." + key, "expected a boolean");
            return fallback;
        }
        return it->get<bool>();
    }

    Json getObject(const Json& obj, const char* key, const std::string& path) {
        auto it = obj.find(key);
        if (it == obj.end()) return Json::object();
        if (!it->is_object()) {
            error(errc::type, path + "." + key, "expected an object");
            return Json::object();
        }
        return *it;
    }
};

bool isScalar(const Json& j) {
    return j.is_string() || j.is_number() || j.is_boolean() || j.is_null();
}

ResponseDef parseResponse(Shape& s, const Json& j, const std::string& path) {
    ResponseDef r;
    if (!s.requireObject(j, path)) return r;
    s.checkKnownKeys(j, path, {"id", "kind", "required", "parameters"});
    r.id = s.getString(j, "id", path, true);
    r.kind = s.getString(j, "kind", path, true);
    if (!r.kind.empty()) {
        const auto& kinds = responseKinds();
        if (std::find(kinds.begin(), kinds.end(), r.kind) == kinds.end())
            s.error(errc::unknown_kind, path + ".kind", "unknown response kind '" + r.kind + "'");
    }
    r.required = s.getBool(j, "required", path, false);
    r.parameters = s.getObject(j, "parameters", path);
    return r;
}

ComponentDef parseComponent(Shape& s, const Json& j, const std::string& path) {
    ComponentDef c;
    if (!s.requireObject(j, path)) return c;
    s.checkKnownKeys(j, path,
                     {"baseComponent", "compType", "payload", "responses", "correctAnswers"});
    c.baseComponent = s.getString(j, "baseComponent", path, false);
    c.compType = s.getString(j, "compType", path, false);
    c.payload = s.getObject(j, "payload", path);
    if (auto it = j.find("responses"); it != j.end()) {
        if (!it->is_array()) {
            s.error(errc::type, path + ".responses", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i)
                c.responses.push_back(
                    parseResponse(s, (*it)[i], path + ".responses[" + std::to_string(i) + "]"));
        }
    }
    if (auto it = j.find("correctAnswers"); it != j.end()) {
        if (!it->is_object()) {
            s.error(errc::type, path + ".correctAnswers", "expected an object");
        } else {
            for (auto ans = it->begin(); ans != it->end(); ++ans) {
                if (!isScalar(ans.value()))
                    s.error(errc::type, path + ".correctAnswers." + ans.key(),
                            "expected a scalar");
            }
            c.correctAnswers = *it;
        }
    }
    return c;
}

InterruptionSpec parseInterruption(Shape& s, const Json& j, const std::string& path) {
    InterruptionSpec spec;
    if (!s.requireObject(j, path)) return spec;
    std::string variant = s.getString(j, "variant", path, true);
    if (variant == "deterministic") {
        spec.variant = InterruptionSpec::Variant::Deterministic;
        s.checkKnownKeys(j, path, {"variant", "firstLocation", "spacing", "components"});
        spec.firstLocation = s.getInteger(j, "firstLocation", path, 0).value_or(0);
        spec.spacing = s.getInteger(j, "spacing", path, 0).value_or(1);
    } else if (variant == "random") {
        spec.variant = InterruptionSpec::Variant::Random;
        s.checkKnownKeys(j, path, {"variant", "numInterruptions", "minGap", "components"});
        spec.numInterruptions = s.getInteger(j, "numInterruptions", path, 0).value_or(1);
        spec.minGap = s.getInteger(j, "minGap", path, 0).value_or(0);
    } else if (!variant.empty()) {
        s.error(errc::type, path + ".variant",
                "expected 'deterministic' or 'random', got '" + variant + "'");
    }
    if (auto it = j.find("components"); it != j.end() && it->is_array()) {
        for (const auto& name : *it) {
            if (name.is_string())
                spec.components.push_back(name.get<std::string>());
            else
                s.error(errc::type, path + ".components", "expected strings");
        }
    } else {
        s.error(errc::type, path + ".components", "missing component list");
    }
    return spec;
}

SkipCondition parseSkip(Shape& s, const Json& j, const std::string& path) {
    SkipCondition cond;
    if (!s.requireObject(j, path)) return cond;
    std::string variant = s.getString(j, "variant", path, true);
    if (variant == "blockCondition" || variant == "repeatedBlockCondition") {
        cond.variant = variant == "blockCondition" ? SkipCondition::Variant::Block
                                                   : SkipCondition::Variant::RepeatedBlock;
        s.checkKnownKeys(j, path, {"variant", "blockId", "check", "threshold", "target"});
        cond.blockId = s.getString(j, "blockId", path, true);
        cond.check = s.getString(j, "check", path, true);
        if (!cond.check.empty() && cond.check != "numCorrect" && cond.check != "numIncorrect")
            s.error(errc::type, path + ".check", "expected numCorrect or numIncorrect");
        cond.threshold = s.getInteger(j, "threshold", path, 1).value_or(1);
        if (j.find("threshold") == j.end())
            s.error(errc::type, path + ".threshold", "missing required integer field");
    } else if (variant == "responseCondition") {
        cond.variant = SkipCondition::Variant::Response;
        s.checkKnownKeys(j, path,
                         {"variant", "componentName", "responseId", "comparator", "value",
                          "target"});
        cond.componentName = s.getString(j, "componentName", path, true);
        cond.responseId = s.getString(j, "responseId", path, true);
        cond.comparator = s.getString(j, "comparator", path, true);
        static const char* comparators[] = {"eq", "neq", "lt", "gt"};
        if (!cond.comparator.empty() &&
            std::find(std::begin(comparators), std::end(comparators), cond.comparator) ==
                std::end(comparators))
            s.error(errc::type, path + ".comparator", "expected one of eq, neq, lt, gt");
        if (auto it = j.find("value"); it != j.end()) {
            if (!isScalar(*it))
                s.error(errc::type, path + ".value", "expected a scalar");
            else
                cond.value = *it;
        } else {
            s.error(errc::type, path + ".value", "missing required scalar field");
        }
    } else if (!variant.empty()) {
        s.error(errc::type, path + ".variant", "unknown skip condition variant '" + variant + "'");
    }
    cond.target = s.getString(j, "target", path, true);
    return cond;
}

Block parseBlock(Shape& s, const Json& j, const std::string& path);

BlockChild parseChild(Shape& s, const Json& j, const std::string& path) {
    BlockChild child;
    if (j.is_string()) {
        child.name = j.get<std::string>();
    } else if (j.is_object()) {
        child.block.push_back(parseBlock(s, j, path));
    } else {
        s.error(errc::type, path, "expected a component name or a nested block");
    }
    return child;
}

Block parseBlock(Shape& s, const Json& j, const std::string& path) {
    Block b;
    if (!s.requireObject(j, path)) return b;
    s.checkKnownKeys(j, path,
                     {"order", "strategyName", "params", "components", "numSamples",
                      "interruptions", "skip", "id"});
    std::string order = s.getString(j, "order", path, true);
    if (order == "fixed") b.order = Order::Fixed;
    else if (order == "random") b.order = Order::Random;
    else if (order == "latinSquare") b.order = Order::LatinSquare;
    else if (order == "dynamic") b.order = Order::Dynamic;
    else if (!order.empty())
        s.error(errc::type, path + ".order", "unknown order '" + order + "'");
    b.strategyName = s.getString(j, "strategyName", path, false);
    b.strategyParams = s.getObject(j, "params", path);
    if (s.strict && b.order != Order::Dynamic) {
        if (j.contains("strategyName"))
            s.error(errc::unknown_field, path + ".strategyName",
                    "only valid on dynamic blocks");
        if (j.contains("params"))
            s.error(errc::unknown_field, path + ".params", "only valid on dynamic blocks");
    }
    if (auto it = j.find("components"); it != j.end()) {
        if (!it->is_array()) {
            s.error(errc::type, path + ".components", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i)
                b.children.push_back(
                    parseChild(s, (*it)[i], path + ".components[" + std::to_string(i) + "]"));
        }
    }
    if (j.contains("numSamples")) b.numSamples = s.getInteger(j, "numSamples", path, 1);
    if (auto it = j.find("interruptions"); it != j.end()) {
        if (!it->is_array()) {
            s.error(errc::type, path + ".interruptions", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i)
                b.interruptions.push_back(parseInterruption(
                    s, (*it)[i], path + ".interruptions[" + std::to_string(i) + "]"));
        }
    }
    if (auto it = j.find("skip"); it != j.end()) {
        if (!it->is_array()) {
            s.error(errc::type, path + ".skip", "expected an array");
        } else {
            for (std::size_t i = 0; i < it->size(); ++i)
                b.skip.push_back(
                    parseSkip(s, (*it)[i], path + ".skip[" + std::to_string(i) + "]"));
        }
    }
    b.id = s.getString(j, "id", path, false);
    return b;
}

}  // namespace

ParseResult parseDocument(const std::string& text, ParseMode mode) {
    ValidationReport report;
    Json doc = Json::parse(text, nullptr, false);
    if (doc.is_discarded()) {
        report.addError(errc::syntax, "", "document is not well-formed JSON");
        return report;
    }
    Shape s{report, mode == ParseMode::Strict};
    StudyConfig cfg;
    if (!s.requireObject(doc, "")) return report;
    s.checkKnownKeys(doc, "$",
                     {"studyMetadata", "importedLibraries", "baseComponents", "components",
                      "sequence"});
    cfg.studyMetadata = s.getObject(doc, "studyMetadata", "$");
    for (auto it = cfg.studyMetadata.begin(); it != cfg.studyMetadata.end(); ++it) {
        if (!isScalar(it.value()))
            s.error(errc::type, "studyMetadata." + it.key(), "expected a scalar");
    }
    if (auto it = doc.find("importedLibraries"); it != doc.end()) {
        if (!it->is_array()) {
            s.error(errc::type, "importedLibraries", "expected an array");
        } else {
            for (const auto& lib : *it) {
                if (lib.is_string())
                    cfg.importedLibraries.push_back(lib.get<std::string>());
                else
                    s.error(errc::type, "importedLibraries", "expected strings");
            }
        }
    }
    for (const char* mapKey : {"baseComponents", "components"}) {
        auto it = doc.find(mapKey);
        if (it == doc.end()) continue;
        if (!it->is_object()) {
            s.error(errc::type, mapKey, "expected an object");
            continue;
        }
        auto& target = std::string(mapKey) == "components" ? cfg.components : cfg.baseComponents;
        for (auto comp = it->begin(); comp != it->end(); ++comp)
            target[comp.key()] =
                parseComponent(s, comp.value(), std::string(mapKey) + "." + comp.key());
    }
    if (auto it = doc.find("sequence"); it != doc.end()) {
        cfg.sequence = parseBlock(s, *it, "sequence");
    } else {
        s.error(errc::type, "sequence", "missing required block");
    }
    if (!report.ok()) return report;
    return cfg;
}

// ---------------------------------------------------------------------------
// Inheritance
// ---------------------------------------------------------------------------

ParseResult resolveInheritance(const StudyConfig& config) {
    ValidationReport report;
    for (const auto& [name, base] : config.baseComponents) {
        if (!base.baseComponent.empty())
            report.addError(errc::base_chain, "baseComponents." + name,
                            "base component '" + name + "' names base '" + base.baseComponent +
                                "'; inheritance is single-level");
    }
    StudyConfig out = config;
    for (auto& [name, comp] : out.components) {
        if (comp.baseComponent.empty()) continue;
        auto it = config.baseComponents.find(comp.baseComponent);
        if (it == config.baseComponents.end()) {
            report.addError(errc::base_missing, "components." + name,
                            "base component '" + comp.baseComponent + "' is not defined");
            continue;
        }
        const ComponentDef& base = it->second;
        ComponentDef merged = base;
        merged.baseComponent.clear();
        if (!comp.compType.empty()) merged.compType = comp.compType;
        if (!comp.payload.empty()) merged.payload = comp.payload;
        if (!comp.responses.empty()) merged.responses = comp.responses;
        if (!comp.correctAnswers.empty()) merged.correctAnswers = comp.correctAnswers;
        comp = std::move(merged);
    }
    if (!report.ok()) return report;
    return out;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

Json responseToJson(const ResponseDef& r) {
    Json j = Json::object();
    j["id"] = r.id;
    j["kind"] = r.kind;
    j["required"] = r.required;
    if (!r.parameters.empty()) j["parameters"] = r.parameters;
    return j;
}

Json componentToJson(const ComponentDef& c) {
    Json j = Json::object();
    if (!c.baseComponent.empty()) j["baseComponent"] = c.baseComponent;
    if (!c.compType.empty()) j["compType"] = c.compType;
    if (!c.payload.empty()) j["payload"] = c.payload;
    if (!c.responses.empty()) {
        Json arr = Json::array();
        for (const auto& r : c.responses) arr.push_back(responseToJson(r));
        j["responses"] = arr;
    }
    if (!c.correctAnswers.empty()) j["correctAnswers"] = c.correctAnswers;
    return j;
}

Json interruptionToJson(const InterruptionSpec& spec) {
    Json j = Json::object();
    j["components"] = spec.components;
    if (spec.variant == InterruptionSpec::Variant::Deterministic) {
        j["variant"] = "deterministic";
        j["firstLocation"] = spec.firstLocation;
        j["spacing"] = spec.spacing;
    } else {
        j["variant"] = "random";
        j["numInterruptions"] = spec.numInterruptions;
        j["minGap"] = spec.minGap;
    }
    return j;
}

Json skipToJson(const SkipCondition& cond) {
    Json j = Json::object();
    switch (cond.variant) {
        case SkipCondition::Variant::Block:
        case SkipCondition::Variant::RepeatedBlock:
            j["variant"] = cond.variant == SkipCondition::Variant::Block
                               ? "blockCondition"
                               : "repeatedBlockCondition";
            j["blockId"] = cond.blockId;
            j["check"] = cond.check;
            j["threshold"] = cond.threshold;
            break;
        case SkipCondition::Variant::Response:
            j["variant"] = "responseCondition";
            j["componentName"] = cond.componentName;
            j["responseId"] = cond.responseId;
            j["comparator"] = cond.comparator;
            j["value"] = cond.value;
            break;
    }
    j["target"] = cond.target;
    return j;
}

Json blockToJson(const Block& b) {
    Json j = Json::object();
    j["order"] = orderName(b.order);
    if (b.order == Order::Dynamic) {
        j["strategyName"] = b.strategyName;
        if (!b.strategyParams.empty()) j["params"] = b.strategyParams;
    }
    Json children = Json::array();
    for (const auto& child : b.children) {
        if (child.isBlock())
            children.push_back(blockToJson(child.block.front()));
        else
            children.push_back(child.name);
    }
    j["components"] = children;
    if (b.numSamples) j["numSamples"] = *b.numSamples;
    if (!b.interruptions.empty()) {
        Json arr = Json::array();
        for (const auto& spec : b.interruptions) arr.push_back(interruptionToJson(spec));
        j["interruptions"] = arr;
    }
    if (!b.skip.empty()) {
        Json arr = Json::array();
        for (const auto& cond : b.skip) arr.push_back(skipToJson(cond));
        j["skip"] = arr;
    }
    if (!b.id.empty()) j["id"] = b.id;
    return j;
}

}  // namespace

Json toJson(const StudyConfig& config) {
    Json j = Json::object();
    if (!config.studyMetadata.empty()) j["studyMetadata"] = config.studyMetadata;
    if (!config.importedLibraries.empty()) j["importedLibraries"] = config.importedLibraries;
    if (!config.baseComponents.empty()) {
        Json m = Json::object();
        for (const auto& [name, comp] : config.baseComponents) m[name] = componentToJson(comp);
        j["baseComponents"] = m;
    }
    Json comps = Json::object();
    for (const auto& [name, comp] : config.components) comps[name] = componentToJson(comp);
    j["components"] = comps;
    j["sequence"] = blockToJson(config.sequence);
    return j;
}

std::string canonicalizeConfig(const StudyConfig& config) {
    return canonicalDump(toJson(config));
}

ParseResult parseStudyConfig(const std::string& text, ParseMode mode) {
    ParseResult parsed = parseDocument(text, mode);
    if (std::holds_alternative<ValidationReport>(parsed)) return parsed;
    ParseResult resolved = resolveInheritance(std::get<StudyConfig>(parsed));
    if (std::holds_alternative<ValidationReport>(resolved)) return resolved;
    StudyConfig cfg = std::move(std::get<StudyConfig>(resolved));
    ValidationReport report = validateConfig(cfg);
    if (!report.ok()) return report;
    return cfg;
}

}  // namespace trialkit
