#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ro/rdf.hpp"
#include "ro/research_object.hpp"

namespace ro::checklist {

using rdf::Iri;
using rdf::Term;

enum class Level { Must, Should, May };
enum class Verdict { FullySatisfied, MinimallySatisfied, Nonconformant };

std::string to_string(Level level);
std::string to_string(Verdict verdict);

/// One slot of a triple pattern: a fixed term or a ?named variable.
struct Variable {
    std::string name;  // without the leading '?'
    auto operator<=>(const Variable&) const = default;
};
using PatternTerm = std::variant<Variable, Term>;

struct TriplePattern {
    PatternTerm subject;
    PatternTerm predicate;
    PatternTerm object;
};

struct ResourceOfType {
    Iri type;
};

/// Conjunctive match: all patterns must hold under one shared binding.
struct PatternExists {
    std::vector<TriplePattern> patterns;  // at most 8
};

/// scope "all-internal" when ref is empty, else the single named resource.
struct ContentPresent {
    std::string ref;  // relative or absolute; empty = every internal resource
};

struct AnnotationOn {
    std::optional<std::string> target;  // nullopt = any annotation at all
};

using Rule = std::variant<ResourceOfType, PatternExists, ContentPresent, AnnotationOn>;

struct Requirement {
    std::string id;
    Level level = Level::Must;
    Rule rule;
    std::string message;
};

struct Checklist {
    std::string id;
    std::string purpose;
    std::vector<Requirement> requirements;
};

struct RequirementResult {
    std::string requirement_id;
    Level level = Level::Must;
    bool passed = false;
    std::string detail;  // witness when passed, unmet-rule description when not
};

struct Report {
    Verdict verdict = Verdict::FullySatisfied;
    std::vector<RequirementResult> results;

    std::string to_text() const;
    std::string to_json() const;
    /// CLI mapping: 0 fully, 1 minimally, 2 nonconformant.
    int exit_code() const;
};

struct ChecklistError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parse the JSON checklist format; errors carry the offending path
/// (e.g. "requirements[0].level").
Checklist parse_checklist(const std::string& doc);

Report evaluate(const core::ResearchObject& ro, const Checklist& cl);

}  // namespace ro::checklist
