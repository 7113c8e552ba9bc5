#pragma once

#include <compare>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ro::rdf {

struct Iri {
    std::string value;

    Iri() = default;
    explicit Iri(std::string v) : value(std::move(v)) {}

    bool is_absolute() const;

    auto operator<=>(const Iri&) const = default;
};

struct BlankNode {
    std::string label;

    BlankNode() = default;
    explicit BlankNode(std::string l) : label(std::move(l)) {}

    auto operator<=>(const BlankNode&) const = default;
};

/// A literal is either plain, language-tagged, or datatyped; the last two
/// are mutually exclusive.
struct Literal {
    std::string lexical;
    std::optional<Iri> datatype;
    std::optional<std::string> language;

    static Literal plain(std::string lex) { return {std::move(lex), std::nullopt, std::nullopt}; }
    static Literal typed(std::string lex, Iri dt) { return {std::move(lex), std::move(dt), std::nullopt}; }
    static Literal tagged(std::string lex, std::string lang) {
        return {std::move(lex), std::nullopt, std::move(lang)};
    }

    auto operator<=>(const Literal&) const = default;
};

using Subject = std::variant<Iri, BlankNode>;
using Term = std::variant<Iri, BlankNode, Literal>;

Term to_term(const Subject& s);
std::optional<Subject> to_subject(const Term& t);

bool is_iri(const Term& t);
bool is_blank(const Term& t);
bool is_blank(const Subject& s);
bool is_literal(const Term& t);

struct Triple {
    Subject subject;
    Iri predicate;
    Term object;

    auto operator<=>(const Triple&) const = default;
};

/// A set of triples plus a prefix map. The prefix map is serialization
/// sugar only; it never participates in equality or isomorphism.
class Graph {
public:
    using TripleSet = std::set<Triple>;

    bool insert(Triple t) { return triples_.insert(std::move(t)).second; }
    bool insert(Subject s, Iri p, Term o) {
        return insert(Triple{std::move(s), std::move(p), std::move(o)});
    }
    bool erase(const Triple& t) { return triples_.erase(t) > 0; }
    bool contains(const Triple& t) const { return triples_.count(t) > 0; }

    std::size_t size() const { return triples_.size(); }
    bool empty() const { return triples_.empty(); }

    const TripleSet& triples() const { return triples_; }
    TripleSet::const_iterator begin() const { return triples_.begin(); }
    TripleSet::const_iterator end() const { return triples_.end(); }

    void set_prefix(std::string name, Iri ns) { prefixes_[std::move(name)] = std::move(ns); }
    const std::map<std::string, Iri>& prefixes() const { return prefixes_; }

    /// Triples matching the bound positions; std::nullopt is a wildcard.
    /// Results come back in the set's deterministic order.
    std::vector<Triple> match(const std::optional<Term>& s, const std::optional<Term>& p,
                              const std::optional<Term>& o) const;

    /// First object of (s, p, *), if any.
    std::optional<Term> object_of(const Subject& s, const Iri& p) const;
    std::vector<Term> objects_of(const Subject& s, const Iri& p) const;
    std::vector<Subject> subjects_of(const Iri& p, const Term& o) const;

    std::set<std::string> blank_labels() const;

    bool operator==(const Graph& other) const { return triples_ == other.triples_; }

private:
    TripleSet triples_;
    std::map<std::string, Iri> prefixes_;
};

struct ParseError : std::runtime_error {
    int line;
    int column;
    ParseError(const std::string& msg, int l, int c)
        : std::runtime_error(msg + " (line " + std::to_string(l) + ", column " + std::to_string(c) + ")"),
          line(l), column(c) {}
};

struct CapacityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// RFC 3986 reference resolution (no normalization beyond dot segments).
Iri resolve_reference(std::string_view ref, const Iri& base);

Graph parse_turtle(std::string_view text, const Iri& base);

/// Deterministic: IRI subjects sorted, blank subjects in first-use order,
/// predicates and objects sorted. Output always re-parses.
std::string serialize_turtle(const Graph& g, const std::optional<Iri>& base = std::nullopt);

/// Blank-node bijection search. Throws CapacityError when either graph has
/// more than max_blank_nodes blank nodes.
bool graph_isomorphic(const Graph& a, const Graph& b, std::size_t max_blank_nodes = 64);

/// Set union; b's blank nodes are relabeled when they would collide with a's.
Graph merge(const Graph& a, const Graph& b);

}  // namespace ro::rdf
