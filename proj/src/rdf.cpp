#include "ro/rdf.hpp"

#include <algorithm>
#include <cctype>
#include <functional>

namespace ro::rdf {

bool Iri::is_absolute() const {
    // scheme = ALPHA *( ALPHA / DIGIT / "+" / "-" / "." ) ":"
    if (value.empty() || !std::isalpha(static_cast<unsigned char>(value[0]))) return false;
    for (std::size_t i = 1; i < value.size(); ++i) {
        char c = value[i];
        if (c == ':') return true;
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
            return false;
    }
    return false;
}

Term to_term(const Subject& s) {
    if (const auto* iri = std::get_if<Iri>(&s)) return *iri;
    return std::get<BlankNode>(s);
}

std::optional<Subject> to_subject(const Term& t) {
    if (const auto* iri = std::get_if<Iri>(&t)) return Subject{*iri};
    if (const auto* b = std::get_if<BlankNode>(&t)) return Subject{*b};
    return std::nullopt;
}

bool is_iri(const Term& t) { return std::holds_alternative<Iri>(t); }
bool is_blank(const Term& t) { return std::holds_alternative<BlankNode>(t); }
bool is_blank(const Subject& s) { return std::holds_alternative<BlankNode>(s); }
bool is_literal(const Term& t) { return std::holds_alternative<Literal>(t); }

std::vector<Triple> Graph::match(const std::optional<Term>& s, const std::optional<Term>& p,
                                 const std::optional<Term>& o) const {
    std::vector<Triple> out;
    for (const auto& t : triples_) {
        if (s && to_term(t.subject) != *s) continue;
        if (p && Term{t.predicate} != *p) continue;
        if (o && t.object != *o) continue;
        out.push_back(t);
    }
    return out;
}

std::optional<Term> Graph::object_of(const Subject& s, const Iri& p) const {
    for (const auto& t : triples_) {
        if (t.subject == s && t.predicate == p) return t.object;
    }
    return std::nullopt;
}

std::vector<Term> Graph::objects_of(const Subject& s, const Iri& p) const {
    std::vector<Term> out;
    for (const auto& t : triples_) {
        if (t.subject == s && t.predicate == p) out.push_back(t.object);
    }
    return out;
}

std::vector<Subject> Graph::subjects_of(const Iri& p, const Term& o) const {
    std::vector<Subject> out;
    for (const auto& t : triples_) {
        if (t.predicate == p && t.object == o) out.push_back(t.subject);
    }
    return out;
}

std::set<std::string> Graph::blank_labels() const {
    std::set<std::string> labels;
    for (const auto& t : triples_) {
        if (const auto* b = std::get_if<BlankNode>(&t.subject)) labels.insert(b->label);
        if (const auto* b = std::get_if<BlankNode>(&t.object)) labels.insert(b->label);
    }
    return labels;
}

namespace {

struct IriParts {
    std::optional<std::string> scheme;
    std::optional<std::string> authority;
    std::string path;
    std::optional<std::string> query;
    std::optional<std::string> fragment;
};

IriParts split_iri(std::string_view s) {
    IriParts p;
    auto hash = s.find('#');
    if (hash != std::string_view::npos) {
        p.fragment = std::string(s.substr(hash + 1));
        s = s.substr(0, hash);
    }
    auto qm = s.find('?');
    if (qm != std::string_view::npos) {
        p.query = std::string(s.substr(qm + 1));
        s = s.substr(0, qm);
    }
    auto colon = s.find(':');
    if (colon != std::string_view::npos) {
        auto head = s.substr(0, colon);
        bool scheme_ok = !head.empty() && std::isalpha(static_cast<unsigned char>(head[0]));
        for (std::size_t i = 1; scheme_ok && i < head.size(); ++i) {
            char c = head[i];
            if (!std::isalnum(static_cast<unsigned char>(c)) && c != '+' && c != '-' && c != '.')
                scheme_ok = false;
        }
        if (scheme_ok) {
            p.scheme = std::string(head);
            s = s.substr(colon + 1);
        }
    }
    if (s.substr(0, 2) == "//") {
        s = s.substr(2);
        auto slash = s.find('/');
        if (slash == std::string_view::npos) {
            p.authority = std::string(s);
            s = {};
        } else {
            p.authority = std::string(s.substr(0, slash));
            s = s.substr(slash);
        }
    }
    p.path = std::string(s);
    return p;
}

std::string remove_dot_segments(std::string input) {
    std::string output;
    while (!input.empty()) {
        if (input.rfind("../", 0) == 0) {
            input.erase(0, 3);
        } else if (input.rfind("./", 0) == 0) {
            input.erase(0, 2);
        } else if (input.rfind("/./", 0) == 0) {
            input.replace(0, 3, "/");
        } else if (input == "/.") {
            input = "/";
        } else if (input.rfind("/../", 0) == 0 || input == "/..") {
            input = (input == "/..") ? "/" : input.substr(3);
            auto pos = output.find_last_of('/');
            output.erase(pos == std::string::npos ? 0 : pos);
        } else if (input == "." || input == "..") {
            input.clear();
        } else {
            std::size_t start = input[0] == '/' ? 1 : 0;
            auto pos = input.find('/', start);
            if (pos == std::string::npos) pos = input.size();
            output += input.substr(0, pos);
            input.erase(0, pos);
        }
    }
    return output;
}

std::string join_parts(const IriParts& p) {
    std::string out;
    if (p.scheme) out += *p.scheme + ":";
    if (p.authority) out += "//" + *p.authority;
    out += p.path;
    if (p.query) out += "?" + *p.query;
    if (p.fragment) out += "#" + *p.fragment;
    return out;
}

std::string merge_paths(const IriParts& base, const std::string& ref_path) {
    if (base.authority && base.path.empty()) return "/" + ref_path;
    auto pos = base.path.find_last_of('/');
    if (pos == std::string::npos) return ref_path;
    return base.path.substr(0, pos + 1) + ref_path;
}

}  // namespace

Iri resolve_reference(std::string_view ref, const Iri& base) {
    IriParts r = split_iri(ref);
    if (r.scheme) {
        r.path = remove_dot_segments(r.path);
        return Iri{join_parts(r)};
    }
    if (!base.is_absolute())
        throw std::invalid_argument("cannot resolve relative reference without an absolute base");
    IriParts b = split_iri(base.value);
    IriParts t;
    t.scheme = b.scheme;
    if (r.authority) {
        t.authority = r.authority;
        t.path = remove_dot_segments(r.path);
        t.query = r.query;
    } else {
        t.authority = b.authority;
        if (r.path.empty()) {
            t.path = b.path;
            t.query = r.query ? r.query : b.query;
        } else {
            t.path = r.path[0] == '/' ? remove_dot_segments(r.path)
                                      : remove_dot_segments(merge_paths(b, r.path));
            t.query = r.query;
        }
    }
    t.fragment = r.fragment;
    return Iri{join_parts(t)};
}

Graph merge(const Graph& a, const Graph& b) {
    Graph out = a;
    for (const auto& [name, ns] : b.prefixes()) {
        if (!out.prefixes().count(name)) out.set_prefix(name, ns);
    }
    // Relabel every blank node of b away from a's labels.
    std::set<std::string> taken = a.blank_labels();
    std::map<std::string, std::string> rename;
    auto fresh = [&taken](const std::string& label) {
        if (!taken.count(label)) {
            taken.insert(label);
            return label;
        }
        int n = 0;
        std::string candidate;
        do {
            candidate = label + "_m" + std::to_string(n++);
        } while (taken.count(candidate));
        taken.insert(candidate);
        return candidate;
    };
    auto map_blank = [&](const BlankNode& bn) {
        auto it = rename.find(bn.label);
        if (it == rename.end()) it = rename.emplace(bn.label, fresh(bn.label)).first;
        return BlankNode{it->second};
    };
    for (const auto& t : b) {
        Triple copy = t;
        if (const auto* bn = std::get_if<BlankNode>(&copy.subject)) copy.subject = map_blank(*bn);
        if (const auto* bn = std::get_if<BlankNode>(&copy.object)) copy.object = map_blank(*bn);
        out.insert(std::move(copy));
    }
    return out;
}

namespace {

Triple apply_mapping(const Triple& t, const std::map<std::string, std::string>& m) {
    Triple out = t;
    if (const auto* bn = std::get_if<BlankNode>(&out.subject)) {
        auto it = m.find(bn->label);
        if (it != m.end()) out.subject = BlankNode{it->second};
    }
    if (const auto* bn = std::get_if<BlankNode>(&out.object)) {
        auto it = m.find(bn->label);
        if (it != m.end()) out.object = BlankNode{it->second};
    }
    return out;
}

bool triple_has_blank(const Triple& t) {
    return is_blank(t.subject) || is_blank(t.object);
}

}  // namespace

bool graph_isomorphic(const Graph& a, const Graph& b, std::size_t max_blank_nodes) {
    if (a.size() != b.size()) return false;
    auto blanks_a = a.blank_labels();
    auto blanks_b = b.blank_labels();
    if (blanks_a.size() != blanks_b.size()) return false;
    if (blanks_a.size() > max_blank_nodes || blanks_b.size() > max_blank_nodes)
        throw CapacityError("graph exceeds blank node limit for isomorphism check");

    // Ground triples must match exactly.
    std::set<Triple> ground_a, ground_b;
    std::vector<Triple> open_a;
    std::set<Triple> open_b;
    for (const auto& t : a) (triple_has_blank(t) ? (void)open_a.push_back(t) : (void)ground_a.insert(t));
    for (const auto& t : b) (triple_has_blank(t) ? (void)open_b.insert(t) : (void)ground_b.insert(t));
    if (ground_a != ground_b) return false;
    if (blanks_a.empty()) return true;

    std::vector<std::string> order(blanks_a.begin(), blanks_a.end());
    std::vector<std::string> candidates(blanks_b.begin(), blanks_b.end());

    std::map<std::string, std::string> mapping;
    std::set<std::string> used;

    std::function<bool(std::size_t)> assign = [&](std::size_t i) -> bool {
        if (i == order.size()) {
            for (const auto& t : open_a) {
                if (!open_b.count(apply_mapping(t, mapping))) return false;
            }
            return true;
        }
        for (const auto& cand : candidates) {
            if (used.count(cand)) continue;
            mapping[order[i]] = cand;
            used.insert(cand);
            // Prune: every fully-mapped triple mentioning this blank must exist in b.
            bool ok = true;
            for (const auto& t : open_a) {
                bool mentions = (is_blank(t.subject) && std::get<BlankNode>(t.subject).label == order[i]) ||
                                (is_blank(t.object) && std::get<BlankNode>(t.object).label == order[i]);
                if (!mentions) continue;
                bool fully_mapped = true;
                if (is_blank(t.subject) && !mapping.count(std::get<BlankNode>(t.subject).label))
                    fully_mapped = false;
                if (is_blank(t.object) && !mapping.count(std::get<BlankNode>(t.object).label))
                    fully_mapped = false;
                if (fully_mapped && !open_b.count(apply_mapping(t, mapping))) {
                    ok = false;
                    break;
                }
            }
            if (ok && assign(i + 1)) return true;
            mapping.erase(order[i]);
            used.erase(cand);
        }
        return false;
    };
    return assign(0);
}

}  // namespace ro::rdf
