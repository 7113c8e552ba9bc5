#include "ro/checklist.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "json.hpp"
#include "ro/vocab.hpp"

namespace ro::checklist {

using core::ResearchObject;
using nlohmann::json;
using rdf::Graph;
using rdf::Literal;
using rdf::Subject;
using rdf::Triple;
namespace vocab = ro::vocab;

std::string to_string(Level level) {
    switch (level) {
        case Level::Must: return "MUST";
        case Level::Should: return "SHOULD";
        case Level::May: return "MAY";
    }
    return "?";
}

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::FullySatisfied: return "FULLY_SATISFIED";
        case Verdict::MinimallySatisfied: return "MINIMALLY_SATISFIED";
        case Verdict::Nonconformant: return "NONCONFORMANT";
    }
    return "?";
}

int Report::exit_code() const { return static_cast<int>(verdict); }

namespace {

[[noreturn]] void fail_at(const std::string& path, const std::string& what) {
    throw ChecklistError("checklist schema violation at " + path + ": " + what);
}

std::string require_string(const json& node, const std::string& path, const char* key) {
    if (!node.contains(key) || !node[key].is_string()) fail_at(path + "." + key, "expected a string");
    return node[key].get<std::string>();
}

Level parse_level(const std::string& text, const std::string& path) {
    if (text == "MUST") return Level::Must;
    if (text == "SHOULD") return Level::Should;
    if (text == "MAY") return Level::May;
    fail_at(path, "unknown level \"" + text + "\"");
}

/// Pattern slot syntax: "?x" variable, "\"text\"" plain literal, else IRI.
PatternTerm parse_pattern_term(const std::string& text, const std::string& path) {
    if (text.empty()) fail_at(path, "empty pattern term");
    if (text[0] == '?') {
        if (text.size() == 1) fail_at(path, "variable needs a name");
        return Variable{text.substr(1)};
    }
    if (text.front() == '"') {
        if (text.size() < 2 || text.back() != '"') fail_at(path, "unterminated literal");
        return Term{Literal::plain(text.substr(1, text.size() - 2))};
    }
    return Term{Iri{text}};
}

Rule parse_rule(const json& node, const std::string& path) {
    if (!node.is_object()) fail_at(path, "expected an object");
    std::string kind = require_string(node, path, "kind");
    if (kind == "ResourceOfType") {
        return ResourceOfType{Iri{require_string(node, path, "type")}};
    }
    if (kind == "PatternExists") {
        if (!node.contains("patterns") || !node["patterns"].is_array())
            fail_at(path + ".patterns", "expected an array");
        PatternExists rule;
        const json& pats = node["patterns"];
        if (pats.empty()) fail_at(path + ".patterns", "needs at least one pattern");
        if (pats.size() > 8) fail_at(path + ".patterns", "at most 8 patterns");
        for (std::size_t i = 0; i < pats.size(); ++i) {
            std::string ppath = path + ".patterns[" + std::to_string(i) + "]";
            if (!pats[i].is_array() || pats[i].size() != 3)
                fail_at(ppath, "expected [subject, predicate, object]");
            TriplePattern tp;
            PatternTerm* slots[3] = {&tp.subject, &tp.predicate, &tp.object};
            for (int k = 0; k < 3; ++k) {
                if (!pats[i][k].is_string()) fail_at(ppath, "pattern terms must be strings");
                *slots[k] = parse_pattern_term(pats[i][k].get<std::string>(), ppath);
            }
            rule.patterns.push_back(std::move(tp));
        }
        return rule;
    }
    if (kind == "ContentPresent") {
        ContentPresent rule;
        if (node.contains("ref")) rule.ref = require_string(node, path, "ref");
        else if (!node.contains("scope") || node["scope"] != "all-internal")
            fail_at(path, "ContentPresent needs \"ref\" or \"scope\": \"all-internal\"");
        return rule;
    }
    if (kind == "AnnotationOn") {
        AnnotationOn rule;
        if (node.contains("target")) rule.target = require_string(node, path, "target");
        return rule;
    }
    fail_at(path + ".kind", "unknown rule kind \"" + kind + "\"");
}

}  // namespace

Checklist parse_checklist(const std::string& doc) {
    json root;
    try {
        root = json::parse(doc);
    } catch (const json::exception& e) {
        throw ChecklistError(std::string("checklist is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) fail_at("$", "expected an object");

    Checklist cl;
    cl.id = require_string(root, "$", "id");
    cl.purpose = require_string(root, "$", "purpose");
    if (!root.contains("requirements") || !root["requirements"].is_array())
        fail_at("requirements", "expected an array");

    std::map<std::string, int> seen;
    const json& reqs = root["requirements"];
    for (std::size_t i = 0; i < reqs.size(); ++i) {
        std::string path = "requirements[" + std::to_string(i) + "]";
        if (!reqs[i].is_object()) fail_at(path, "expected an object");
        Requirement req;
        req.id = require_string(reqs[i], path, "id");
        if (++seen[req.id] > 1) fail_at(path + ".id", "duplicate requirement id \"" + req.id + "\"");
        req.level = parse_level(require_string(reqs[i], path, "level"), path + ".level");
        if (!reqs[i].contains("rule")) fail_at(path + ".rule", "missing");
        req.rule = parse_rule(reqs[i]["rule"], path + ".rule");
        req.message = require_string(reqs[i], path, "message");
        cl.requirements.push_back(std::move(req));
    }
    return cl;
}

namespace {

bool slot_matches(const PatternTerm& slot, const Term& value,
                  std::map<std::string, Term>& binding) {
    if (const auto* fixed = std::get_if<Term>(&slot)) return *fixed == value;
    const auto& var = std::get<Variable>(slot);
    auto it = binding.find(var.name);
    if (it != binding.end()) return it->second == value;
    binding[var.name] = value;
    return true;
}

bool join(const Graph& g, const std::vector<TriplePattern>& patterns, std::size_t index,
          std::map<std::string, Term>& binding) {
    if (index == patterns.size()) return true;
    const TriplePattern& tp = patterns[index];
    for (const auto& t : g.triples()) {
        std::map<std::string, Term> saved = binding;
        if (slot_matches(tp.subject, rdf::to_term(t.subject), binding) &&
            slot_matches(tp.predicate, Term{t.predicate}, binding) &&
            slot_matches(tp.object, t.object, binding)) {
            if (join(g, patterns, index + 1, binding)) return true;
        }
        binding = std::move(saved);
    }
    return false;
}

std::string term_text(const Term& t) {
    if (const auto* iri = std::get_if<Iri>(&t)) return iri->value;
    if (const auto* b = std::get_if<rdf::BlankNode>(&t)) return "_:" + b->label;
    return "\"" + std::get<Literal>(t).lexical + "\"";
}

RequirementResult evaluate_rule(const ResearchObject& ro, const Graph& g, const Requirement& req) {
    RequirementResult res{req.id, req.level, false, ""};

    if (const auto* rule = std::get_if<ResourceOfType>(&req.rule)) {
        auto hits = g.match(std::nullopt, Term{vocab::rdf_type}, Term{rule->type});
        if (!hits.empty()) {
            res.passed = true;
            res.detail = "witness: " + term_text(rdf::to_term(hits.front().subject));
        } else {
            res.detail = "no resource of type <" + rule->type.value + ">";
        }
        return res;
    }

    if (const auto* rule = std::get_if<PatternExists>(&req.rule)) {
        std::map<std::string, Term> binding;
        if (join(g, rule->patterns, 0, binding)) {
            res.passed = true;
            std::string witness = "witness:";
            for (const auto& [name, value] : binding)
                witness += " ?" + name + "=" + term_text(value);
            res.detail = binding.empty() ? "witness: pattern holds" : witness;
        } else {
            res.detail = "no binding satisfies all " + std::to_string(rule->patterns.size()) +
                         " pattern(s)";
        }
        return res;
    }

    if (const auto* rule = std::get_if<ContentPresent>(&req.rule)) {
        if (rule->ref.empty()) {
            for (const auto& r : ro.aggregated()) {
                if (ro.is_internal(r.ref) && !r.content) {
                    res.detail = "internal resource without content: <" + r.ref.value + ">";
                    return res;
                }
            }
            res.passed = true;
            res.detail = "witness: every internal resource has content";
        } else {
            const auto* r = ro.find_resource(ro.resolve_ref(rule->ref));
            if (r && r->content) {
                res.passed = true;
                res.detail = "witness: <" + r->ref.value + ">";
            } else {
                res.detail = r ? "resource has no stored content: " + rule->ref
                               : "resource not aggregated: " + rule->ref;
            }
        }
        return res;
    }

    const auto& rule = std::get<AnnotationOn>(req.rule);
    std::optional<Iri> target;
    if (rule.target) target = ro.resolve_ref(*rule.target);
    for (const auto& a : ro.annotations()) {
        bool hit = !target;
        for (const auto& t : a.targets) hit |= target && t == *target;
        if (hit) {
            res.passed = true;
            res.detail = "witness: " + a.id.value;
            return res;
        }
    }
    res.detail = target ? "no annotation targets <" + target->value + ">"
                        : "no annotations present";
    return res;
}

}  // namespace

Report evaluate(const ResearchObject& ro, const Checklist& cl) {
    Graph g = core::metadata_graph(ro);
    Report report;
    bool must_failed = false;
    bool should_failed = false;
    for (const auto& req : cl.requirements) {
        RequirementResult res = evaluate_rule(ro, g, req);
        if (!res.passed) {
            if (req.level == Level::Must) must_failed = true;
            if (req.level == Level::Should) should_failed = true;
        }
        report.results.push_back(std::move(res));
    }
    report.verdict = must_failed    ? Verdict::Nonconformant
                     : should_failed ? Verdict::MinimallySatisfied
                                     : Verdict::FullySatisfied;
    return report;
}

std::string Report::to_text() const {
    std::ostringstream out;
    out << "verdict: " << to_string(verdict) << "\n";
    for (const auto& r : results) {
        out << (r.passed ? "  pass  " : "  FAIL  ") << to_string(r.level) << "  "
            << r.requirement_id << "  " << r.detail << "\n";
    }
    return out.str();
}

std::string Report::to_json() const {
    json root;
    root["verdict"] = to_string(verdict);
    root["exit_code"] = exit_code();
    root["results"] = json::array();
    for (const auto& r : results) {
        root["results"].push_back({{"id", r.requirement_id},
                                   {"level", to_string(r.level)},
                                   {"passed", r.passed},
                                   {"detail", r.detail}});
    }
    return root.dump(2) + "\n";
}

}  // namespace ro::checklist
