#include <cctype>
#include <map>
#include <sstream>
#include <vector>

#include "ro/rdf.hpp"
#include "ro/vocab.hpp"

namespace ro::rdf {

namespace {

bool pn_local_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == '%';
}

class TurtleParser {
public:
    TurtleParser(std::string_view text, Iri base) : text_(text), base_(std::move(base)) {
        if (!base_.value.empty() && !base_.is_absolute())
            throw std::invalid_argument("parse_turtle: base IRI must be absolute");
    }

    Graph run() {
        skip_ws();
        while (!eof()) {
            if (peek() == '@') {
                directive();
            } else {
                statement();
            }
            skip_ws();
        }
        return std::move(graph_);
    }

private:
    std::string_view text_;
    Iri base_;
    Graph graph_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int anon_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

    bool eof() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }
    char peek_at(std::size_t off) const {
        return pos_ + off < text_.size() ? text_[pos_ + off] : '\0';
    }

    char advance() {
        char c = text_[pos_++];
        if (c == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return c;
    }

    void skip_ws() {
        while (!eof()) {
            char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') advance();
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else {
                break;
            }
        }
    }

    void expect(char c, const char* what) {
        if (eof() || peek() != c) fail(std::string("expected '") + c + "' (" + what + ")");
        advance();
    }

    bool try_word(std::string_view w) {
        if (text_.substr(pos_, w.size()) != w) return false;
        char after = peek_at(w.size());
        if (std::isalnum(static_cast<unsigned char>(after)) || after == '_') return false;
        for (std::size_t i = 0; i < w.size(); ++i) advance();
        return true;
    }

    void directive() {
        if (try_word("@prefix")) {
            skip_ws();
            std::string name = pname_ns();
            skip_ws();
            Iri ns = iriref();
            skip_ws();
            expect('.', "end of @prefix directive");
            graph_.set_prefix(name, ns);
        } else if (try_word("@base")) {
            skip_ws();
            base_ = iriref();
            skip_ws();
            expect('.', "end of @base directive");
        } else {
            fail("unknown directive");
        }
    }

    std::string pname_ns() {
        std::string name;
        while (!eof() && peek() != ':' &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                peek() == '.')) {
            name += advance();
        }
        expect(':', "prefix name");
        return name;
    }

    Iri iriref() {
        expect('<', "IRI");
        std::string raw;
        while (!eof() && peek() != '>') {
            char c = advance();
            if (c == '\\') {
                if (eof()) fail("unterminated escape in IRI");
                char e = advance();
                if (e == 'u' || e == 'U') {
                    raw += unicode_escape(e == 'u' ? 4 : 8);
                } else {
                    fail("invalid escape in IRI");
                }
            } else if (c == ' ' || c == '\n' || c == '\t' || c == '"' || c == '{' || c == '}') {
                fail("illegal character in IRI");
            } else {
                raw += c;
            }
        }
        expect('>', "IRI");
        Iri candidate{raw};
        if (candidate.is_absolute()) return candidate;
        if (base_.value.empty()) fail("relative IRI with no base");
        return resolve_reference(raw, base_);
    }

    std::string unicode_escape(int digits) {
        unsigned long cp = 0;
        for (int i = 0; i < digits; ++i) {
            if (eof()) fail("unterminated unicode escape");
            char c = advance();
            cp <<= 4;
            if (c >= '0' && c <= '9') cp += c - '0';
            else if (c >= 'a' && c <= 'f') cp += c - 'a' + 10;
            else if (c >= 'A' && c <= 'F') cp += c - 'A' + 10;
            else fail("invalid unicode escape digit");
        }
        // UTF-8 encode.
        std::string out;
        if (cp < 0x80) {
            out += static_cast<char>(cp);
        } else if (cp < 0x800) {
            out += static_cast<char>(0xC0 | (cp >> 6));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else if (cp < 0x10000) {
            out += static_cast<char>(0xE0 | (cp >> 12));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        } else {
            out += static_cast<char>(0xF0 | (cp >> 18));
            out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
            out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
            out += static_cast<char>(0x80 | (cp & 0x3F));
        }
        return out;
    }

    Iri prefixed_name() {
        std::string prefix;
        while (!eof() && peek() != ':' &&
               (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-' ||
                peek() == '.')) {
            prefix += advance();
        }
        expect(':', "prefixed name");
        std::string local;
        while (!eof() && pn_local_char(peek())) local += advance();
        // A trailing dot terminates the statement, not the name.
        while (!local.empty() && local.back() == '.') {
            local.pop_back();
            --pos_;
            --col_;
        }
        auto it = graph_.prefixes().find(prefix);
        if (it == graph_.prefixes().end()) fail("undefined prefix '" + prefix + ":'");
        return Iri{it->second.value + local};
    }

    BlankNode blank_label() {
        // caller consumed nothing; expects "_:"
        advance();  // '_'
        expect(':', "blank node label");
        std::string label;
        while (!eof() && pn_local_char(peek())) label += advance();
        while (!label.empty() && label.back() == '.') {
            label.pop_back();
            --pos_;
            --col_;
        }
        if (label.empty()) fail("empty blank node label");
        return BlankNode{label};
    }

    BlankNode fresh_anon() {
        // '#' cannot occur in a parsed label, so generated names never collide.
        return BlankNode{"anon#" + std::to_string(++anon_)};
    }

    BlankNode anon_or_property_list() {
        expect('[', "blank node");
        BlankNode node = fresh_anon();
        skip_ws();
        if (peek() != ']') predicate_object_list(Subject{node});
        skip_ws();
        expect(']', "blank node");
        return node;
    }

    Subject subject() {
        char c = peek();
        if (c == '<') return Subject{iriref()};
        if (c == '_' && peek_at(1) == ':') return Subject{blank_label()};
        if (c == '[') return Subject{anon_or_property_list()};
        return Subject{prefixed_name()};
    }

    Iri verb() {
        if (try_word("a")) return vocab::rdf_type;
        if (peek() == '<') return iriref();
        return prefixed_name();
    }

    Literal literal() {
        char quote = advance();  // '"' or '\''
        bool long_form = false;
        if (peek() == quote && peek_at(1) == quote) {
            advance();
            advance();
            long_form = true;
        }
        std::string lex;
        for (;;) {
            if (eof()) fail("unterminated string literal");
            char c = peek();
            if (c == quote) {
                if (!long_form) {
                    advance();
                    break;
                }
                if (peek_at(1) == quote && peek_at(2) == quote) {
                    advance();
                    advance();
                    advance();
                    break;
                }
                lex += advance();
                continue;
            }
            if (c == '\\') {
                advance();
                if (eof()) fail("unterminated escape");
                char e = advance();
                switch (e) {
                    case 't': lex += '\t'; break;
                    case 'b': lex += '\b'; break;
                    case 'n': lex += '\n'; break;
                    case 'r': lex += '\r'; break;
                    case 'f': lex += '\f'; break;
                    case '"': lex += '"'; break;
                    case '\'': lex += '\''; break;
                    case '\\': lex += '\\'; break;
                    case 'u': lex += unicode_escape(4); break;
                    case 'U': lex += unicode_escape(8); break;
                    default: fail("invalid string escape");
                }
                continue;
            }
            if (!long_form && c == '\n') fail("newline in single-line string");
            lex += advance();
        }
        if (!eof() && peek() == '@') {
            advance();
            std::string lang;
            while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '-'))
                lang += advance();
            if (lang.empty()) fail("empty language tag");
            return Literal::tagged(lex, lang);
        }
        if (!eof() && peek() == '^' && peek_at(1) == '^') {
            advance();
            advance();
            Iri dt = peek() == '<' ? iriref() : prefixed_name();
            return Literal::typed(lex, dt);
        }
        return Literal::plain(lex);
    }

    Term object() {
        if (eof()) fail("expected object");
        char c = peek();
        if (c == '<') return Term{iriref()};
        if (c == '"' || c == '\'') return Term{literal()};
        if (c == '_' && peek_at(1) == ':') return Term{blank_label()};
        if (c == '[') return Term{anon_or_property_list()};
        if (c == '.' || c == ';' || c == ',') fail("expected object");
        return Term{prefixed_name()};
    }

    void predicate_object_list(const Subject& subj) {
        for (;;) {
            skip_ws();
            Iri pred = verb();
            for (;;) {
                skip_ws();
                graph_.insert(subj, pred, object());
                skip_ws();
                if (!eof() && peek() == ',') {
                    advance();
                    continue;
                }
                break;
            }
            if (!eof() && peek() == ';') {
                advance();
                skip_ws();
                if (eof() || peek() == '.' || peek() == ']') break;  // trailing ';'
                continue;
            }
            break;
        }
    }

    void statement() {
        Subject subj = subject();
        skip_ws();
        if (!eof() && peek() == '.' && std::holds_alternative<BlankNode>(subj)) {
            // "[ ... ] ." with no further predicates is fine.
            advance();
            return;
        }
        predicate_object_list(subj);
        skip_ws();
        expect('.', "end of statement");
    }
};

}  // namespace

Graph parse_turtle(std::string_view text, const Iri& base) {
    return TurtleParser(text, base).run();
}

namespace {

class TurtleWriter {
public:
    TurtleWriter(const Graph& g, std::optional<Iri> base) : g_(g), base_(std::move(base)) {
        scan_blanks();
    }

    std::string run() {
        std::ostringstream out;
        if (base_) out << "@base <" << base_->value << "> .\n";
        for (const auto& [name, ns] : g_.prefixes())
            out << "@prefix " << name << ": <" << ns.value << "> .\n";
        if (base_ || !g_.prefixes().empty()) out << "\n";

        for (const auto& subj : subject_order()) {
            write_subject_block(out, subj);
        }
        // Blank nodes that only ever occur as objects still need their own
        // block when they have outgoing triples; object-only leaves are
        // emitted inline as [].
        return out.str();
    }

private:
    const Graph& g_;
    std::optional<Iri> base_;
    std::map<std::string, int> blank_occurrences_;
    std::set<std::string> blank_subjects_;
    std::map<std::string, std::string> blank_names_;
    int next_blank_ = 0;

    void scan_blanks() {
        for (const auto& t : g_) {
            if (const auto* b = std::get_if<BlankNode>(&t.subject)) {
                blank_occurrences_[b->label]++;
                blank_subjects_.insert(b->label);
            }
            if (const auto* b = std::get_if<BlankNode>(&t.object)) blank_occurrences_[b->label]++;
        }
    }

    bool anon_leaf(const std::string& label) const {
        return !blank_subjects_.count(label) && blank_occurrences_.at(label) == 1;
    }

    std::string blank_name(const std::string& label) {
        auto it = blank_names_.find(label);
        if (it == blank_names_.end())
            it = blank_names_.emplace(label, "b" + std::to_string(next_blank_++)).first;
        return it->second;
    }

    std::vector<Subject> subject_order() const {
        std::set<Iri> iris;
        std::vector<std::string> blanks;  // first-use order over the sorted set
        std::set<std::string> seen;
        for (const auto& t : g_) {
            if (const auto* i = std::get_if<Iri>(&t.subject)) iris.insert(*i);
            if (const auto* b = std::get_if<BlankNode>(&t.subject)) {
                if (seen.insert(b->label).second) blanks.push_back(b->label);
            }
        }
        std::vector<Subject> order;
        for (const auto& i : iris) order.emplace_back(i);
        for (const auto& l : blanks) order.emplace_back(BlankNode{l});
        return order;
    }

    std::string iri_text(const Iri& iri) const {
        if (base_) {
            if (iri.value == base_->value) return "<>";
            if (iri.value.rfind(base_->value, 0) == 0) {
                std::string rel = iri.value.substr(base_->value.size());
                if (resolve_reference(rel, *base_).value == iri.value) return "<" + rel + ">";
            }
        }
        // Longest matching prefix wins.
        const std::string* best_name = nullptr;
        const std::string* best_ns = nullptr;
        for (const auto& [name, ns] : g_.prefixes()) {
            if (ns.value.empty() || iri.value.rfind(ns.value, 0) != 0) continue;
            if (best_ns && ns.value.size() <= best_ns->size()) continue;
            std::string local = iri.value.substr(ns.value.size());
            bool ok = true;
            for (char c : local) {
                if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            best_name = &name;
            best_ns = &ns.value;
        }
        if (best_name) return *best_name + ":" + iri.value.substr(best_ns->size());
        return "<" + iri.value + ">";
    }

    std::string literal_text(const Literal& lit) const {
        std::string out = "\"";
        for (char c : lit.lexical) {
            switch (c) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\r': out += "\\r"; break;
                case '\t': out += "\\t"; break;
                default: out += c;
            }
        }
        out += "\"";
        if (lit.language) out += "@" + *lit.language;
        else if (lit.datatype) out += "^^" + iri_text(*lit.datatype);
        return out;
    }

    std::string term_text(const Term& t) {
        if (const auto* i = std::get_if<Iri>(&t)) return iri_text(*i);
        if (const auto* l = std::get_if<Literal>(&t)) return literal_text(*l);
        const auto& b = std::get<BlankNode>(t);
        if (anon_leaf(b.label)) return "[]";
        return "_:" + blank_name(b.label);
    }

    std::string subject_text(const Subject& s) {
        if (const auto* i = std::get_if<Iri>(&s)) return iri_text(*i);
        return "_:" + blank_name(std::get<BlankNode>(s).label);
    }

    void write_subject_block(std::ostringstream& out, const Subject& subj) {
        // predicate -> objects, both already sorted by the triple set order.
        std::vector<std::pair<Iri, std::vector<Term>>> groups;
        for (const auto& t : g_) {
            if (t.subject != subj) continue;
            if (groups.empty() || groups.back().first != t.predicate)
                groups.push_back({t.predicate, {}});
            groups.back().second.push_back(t.object);
        }
        if (groups.empty()) return;
        out << subject_text(subj);
        bool first_group = true;
        for (auto& [pred, objects] : groups) {
            out << (first_group ? " " : " ;\n    ");
            first_group = false;
            out << (pred == vocab::rdf_type ? "a" : iri_text(pred));
            bool first_obj = true;
            for (const auto& o : objects) {
                out << (first_obj ? " " : ", ");
                first_obj = false;
                out << term_text(o);
            }
        }
        out << " .\n";
    }
};

}  // namespace

std::string serialize_turtle(const Graph& g, const std::optional<Iri>& base) {
    return TurtleWriter(g, base).run();
}

}  // namespace ro::rdf
