#include "ro/service.hpp"

#include <atomic>
#include <cctype>
#include <fstream>
#include <map>
#include <mutex>
#include <regex>
#include <sstream>
#include <thread>
#include <vector>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"
#include "json.hpp"
#include "ro/evolution.hpp"
#include "ro/research_object.hpp"
#include "ro/storage.hpp"
#include "ro/vocab.hpp"

namespace ro::service {

namespace fs = std::filesystem;
using core::ResearchObject;
using core::Timestamp;
using nlohmann::json;
using rdf::Graph;
using rdf::Iri;
using rdf::Term;

namespace {

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '-'))
            return false;
    return true;
}

const std::map<std::string, Iri>& type_table() {
    static const std::map<std::string, Iri> table{{"dataset", vocab::ro_dataset},
                                                  {"paper", vocab::ro_paper},
                                                  {"software", vocab::ro_software}};
    return table;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

bool is_version_leaf(const std::string& s) {
    return s.size() == 4 && s[0] == 'v' && std::isdigit(s[1]) && std::isdigit(s[2]) &&
           std::isdigit(s[3]);
}

std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string term_to_string(const Term& t) {
    if (const auto* iri = std::get_if<Iri>(&t)) return iri->value;
    if (const auto* b = std::get_if<rdf::BlankNode>(&t)) return "_:" + b->label;
    const auto& lit = std::get<rdf::Literal>(t);
    return "\"" + lit.lexical + "\"";
}

/// Accept header handling: explicit text/turtle wins, then application/json,
/// then */* (or no header) falls back to Turtle; anything else is 406.
enum class Repr { Turtle, Json, None };

Repr negotiate(const httplib::Request& req) {
    if (!req.has_header("Accept")) return Repr::Turtle;
    std::string accept = req.get_header_value("Accept");
    if (accept.find("text/turtle") != std::string::npos) return Repr::Turtle;
    if (accept.find("application/json") != std::string::npos) return Repr::Json;
    if (accept.find("*/*") != std::string::npos || accept.empty()) return Repr::Turtle;
    return Repr::None;
}

}  // namespace

struct Service::Impl {
    ServiceConfig config;
    std::mutex mu;
    std::map<std::string, ResearchObject> ros;
    evo::EvolutionStore store;

    struct Event {
        long seq;
        std::string at;
        std::string ro;
        std::string kind;
        json detail;
    };
    std::vector<Event> events;
    long next_seq = 1;

    httplib::Server server;
    std::thread thread;
    int port = -1;

    explicit Impl(ServiceConfig cfg) : config(std::move(cfg)) {
        while (!config.base_url.empty() && config.base_url.back() == '/')
            config.base_url.pop_back();
        fs::create_directories(config.store_root);
        replay();
        install_routes();
    }

    Timestamp now() const { return config.clock ? config.clock() : Timestamp::now(); }
    Iri ro_id(const std::string& name) const { return Iri{config.base_url + "/ROs/" + name + "/"}; }
    fs::path dir(const std::string& name) const { return config.store_root / name; }
    fs::path journal_path() const { return config.store_root / "journal.log"; }

    // ---- journal -------------------------------------------------------

    void append_event(const std::string& name, const std::string& kind, json detail) {
        Event e{next_seq++, now().value, name, kind, std::move(detail)};
        json line{{"seq", e.seq}, {"at", e.at}, {"ro", e.ro}, {"kind", e.kind},
                  {"detail", e.detail}};
        std::ofstream out(journal_path(), std::ios::app | std::ios::binary);
        out << line.dump() << "\n";
        out.flush();
        events.push_back(std::move(e));
    }

    /// The journal is the source of truth; the payload files on disk are a
    /// blob store it points into. A manifest or version directory written
    /// after the last surviving journal line is simply never referenced, so
    /// any journal prefix replays to exactly the state it describes.
    void replay() {
        std::ifstream in(journal_path(), std::ios::binary);
        if (!in) return;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            json j = json::parse(line, nullptr, false);
            if (j.is_discarded()) break;  // torn tail line: stop at the last good prefix
            Event e{j.at("seq").get<long>(), j.at("at").get<std::string>(),
                    j.at("ro").get<std::string>(), j.at("kind").get<std::string>(),
                    j.at("detail")};
            apply_event(e);
            next_seq = e.seq + 1;
            events.push_back(std::move(e));
        }
    }

    void apply_event(const Event& e) {
        const std::string& name = e.ro;
        if (e.kind == "created") {
            ros.insert({name, ResearchObject::create(
                                  ro_id(name), Iri{e.detail.at("creator").get<std::string>()},
                                  Timestamp{e.detail.at("created").get<std::string>()})});
            return;
        }
        ResearchObject& ro = ros.at(name);
        if (e.kind == "resource-added") {
            std::string rel = e.detail.at("ref").get<std::string>();
            std::set<Iri> kinds;
            for (const auto& k : e.detail.at("kinds")) kinds.insert(Iri{k.get<std::string>()});
            std::string bytes = read_file(dir(name) / rel);
            Iri ref = ro.resolve_ref(rel);
            if (ro.find_resource(ref)) {
                ro.set_content(ref, std::move(bytes));
                ro.set_kinds(ref, std::move(kinds));
            } else {
                ro.aggregate(ref, std::move(kinds), std::move(bytes));
            }
        } else if (e.kind == "resource-removed") {
            ro.deaggregate(ro.resolve_ref(e.detail.at("ref").get<std::string>()));
        } else if (e.kind == "annotated") {
            std::string rel = e.detail.at("body").get<std::string>();
            std::string bytes = read_file(dir(name) / rel);
            std::set<Iri> targets;
            for (const auto& t : e.detail.at("targets")) targets.insert(Iri{t.get<std::string>()});
            Graph body = rdf::parse_turtle(bytes, ro.id());
            ro.annotate(std::move(targets), body, Iri{e.detail.at("creator").get<std::string>()},
                        Timestamp{e.detail.at("created").get<std::string>()});
        } else if (e.kind == "snapshotted" || e.kind == "archived") {
            storage::load_version(dir(name), e.detail.at("leaf").get<std::string>(), ro_id(name),
                                  store);
        }
    }

    // ---- representations -----------------------------------------------

    json json_projection(const ResearchObject& ro) const {
        json j;
        j["id"] = ro.id().value;
        j["creator"] = ro.creator().value;
        j["created"] = ro.created_at().value;
        j["resources"] = json::array();
        for (const auto& r : ro.aggregated()) {
            json kinds = json::array();
            for (const auto& k : r.kinds) kinds.push_back(k.value);
            j["resources"].push_back({{"ref", r.ref.value},
                                      {"kinds", kinds},
                                      {"internal", r.content.has_value()}});
        }
        j["annotations"] = json::array();
        for (const auto& a : ro.annotations()) {
            json targets = json::array();
            for (const auto& t : a.targets) targets.push_back(t.value);
            j["annotations"].push_back(
                {{"id", a.id.value}, {"targets", targets}, {"body", a.body_ref.value}});
        }
        return j;
    }

    void respond_manifest(const ResearchObject& ro, const httplib::Request& req,
                          httplib::Response& res) const {
        switch (negotiate(req)) {
            case Repr::Turtle:
                res.set_content(rdf::serialize_turtle(core::build_manifest(ro), ro.id()),
                                "text/turtle");
                break;
            case Repr::Json:
                res.set_content(json_projection(ro).dump(2) + "\n", "application/json");
                break;
            case Repr::None:
                res.status = 406;
                res.set_content("no acceptable representation\n", "text/plain");
                break;
        }
    }

    // ---- auth ----------------------------------------------------------

    bool authorized(const httplib::Request& req) const {
        if (!config.token) return true;
        return req.get_header_value("Authorization") == "Bearer " + *config.token;
    }

    bool require_auth(const httplib::Request& req, httplib::Response& res) const {
        if (authorized(req)) return true;
        res.status = 401;
        res.set_content("missing or invalid bearer token\n", "text/plain");
        return false;
    }

    // ---- routes --------------------------------------------------------

    /// Domain errors surface as 409 (the request conflicts with the RO's
    /// current state); anything else is a plain 500. Handlers must never
    /// let an exception escape into the server loop.
    template <typename F>
    httplib::Server::Handler guard(F f) {
        return [f](const httplib::Request& req, httplib::Response& res) {
            try {
                f(req, res);
            } catch (const core::RoError& e) {
                res.status = 409;
                res.set_content(std::string(e.what()) + "\n", "text/plain");
            } catch (const std::exception& e) {
                res.status = 500;
                res.set_content(std::string(e.what()) + "\n", "text/plain");
            }
        };
    }

    void install_routes() {
        server.Post("/", guard([this](const httplib::Request& req, httplib::Response& res) {
            if (!require_auth(req, res)) return;
            std::lock_guard<std::mutex> lock(mu);
            std::string name = req.get_header_value("Slug");
            if (!valid_name(name)) {
                res.status = 400;
                res.set_content("Slug header must name the RO ([a-z0-9-]+)\n", "text/plain");
                return;
            }
            std::string creator = req.get_header_value("RO-Creator");
            if (creator.empty()) {
                res.status = 400;
                res.set_content("RO-Creator header required\n", "text/plain");
                return;
            }
            if (ros.count(name)) {
                res.status = 409;
                res.set_content("research object already exists: " + name + "\n", "text/plain");
                return;
            }
            std::string created = req.get_header_value("RO-Created");
            if (created.empty()) created = now().value;
            ResearchObject ro =
                ResearchObject::create(ro_id(name), Iri{creator}, Timestamp{created});
            storage::save_research_object(ro, dir(name));
            append_event(name, "created", {{"creator", creator}, {"created", created}});
            ros.insert({name, std::move(ro)});
            res.status = 201;
            res.set_header("Location", "/ROs/" + name + "/");
        }));

        server.Put(R"(/ROs/([a-z0-9-]+)/(.+))",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       handle_put(req, res);
                   }));
        server.Delete(R"(/ROs/([a-z0-9-]+)/(.+))",
                      guard([this](const httplib::Request& req, httplib::Response& res) {
                          handle_delete(req, res);
                      }));
        server.Post(R"(/ROs/([a-z0-9-]+)/evolution)",
                    guard([this](const httplib::Request& req, httplib::Response& res) {
                        handle_evolution_copy(req, res);
                    }));
        server.Get(R"(/ROs/([a-z0-9-]+)/(.*))",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       handle_get(req, res);
                   }));
        server.Get("/notifications",
                   guard([this](const httplib::Request& req, httplib::Response& res) {
                       handle_notifications(req, res);
                   }));
        server.Get("/query", guard([this](const httplib::Request& req, httplib::Response& res) {
                       handle_query(req, res);
                   }));
    }

    static bool in_version_tree(const std::string& rel) {
        return rel.size() >= 4 && is_version_leaf(rel.substr(0, 4)) &&
               (rel.size() == 4 || rel[4] == '/');
    }

    ResearchObject* find_live(const std::string& name, httplib::Response& res) {
        auto it = ros.find(name);
        if (it == ros.end()) {
            res.status = 404;
            res.set_content("no research object: " + name + "\n", "text/plain");
            return nullptr;
        }
        return &it->second;
    }

    void handle_put(const httplib::Request& req, httplib::Response& res) {
        if (!require_auth(req, res)) return;
        std::lock_guard<std::mutex> lock(mu);
        std::string name = req.matches[1];
        std::string rel = req.matches[2];
        if (in_version_tree(rel)) {
            res.status = 405;
            res.set_content("versions are immutable\n", "text/plain");
            return;
        }
        ResearchObject* ro = find_live(name, res);
        if (!ro) return;

        // Link: <target>; rel="annotates" turns the PUT into an annotation.
        std::set<Iri> targets;
        static const std::regex link_re(R"(<([^>]*)>\s*;\s*rel="annotates")");
        auto range = req.headers.equal_range("Link");
        for (auto it = range.first; it != range.second; ++it) {
            std::smatch m;
            if (std::regex_search(it->second, m, link_re)) targets.insert(Iri{m[1].str()});
        }

        if (!targets.empty()) {
            Graph body;
            try {
                body = rdf::parse_turtle(req.body, ro->id());
            } catch (const rdf::ParseError& e) {
                res.status = 400;
                res.set_content(std::string("annotation body is not valid Turtle: ") + e.what() +
                                    "\n",
                                "text/plain");
                return;
            }
            std::string creator = req.get_header_value("RO-Creator");
            if (creator.empty()) creator = ro->creator().value;
            std::string created = req.get_header_value("RO-Created");
            if (created.empty()) created = now().value;
            core::Annotation a =
                ro->annotate(targets, body, Iri{creator}, Timestamp{created});
            storage::save_research_object(*ro, dir(name));
            json jt = json::array();
            for (const auto& t : a.targets) jt.push_back(t.value);
            append_event(name, "annotated",
                         {{"body", ro->relative_path(a.body_ref)},
                          {"targets", jt},
                          {"creator", creator},
                          {"created", created}});
            res.status = 201;
            res.set_header("Location", "/ROs/" + name + "/" + ro->relative_path(a.body_ref));
            return;
        }

        std::set<Iri> kinds;
        if (req.has_param("type")) {
            auto it = type_table().find(req.get_param_value("type"));
            if (it == type_table().end()) {
                res.status = 400;
                res.set_content("unknown type; expected dataset|paper|software\n", "text/plain");
                return;
            }
            kinds.insert(it->second);
        }
        Iri ref = ro->resolve_ref(rel);
        bool update = ro->find_resource(ref) != nullptr;
        if (update) {
            ro->set_content(ref, req.body);
            ro->set_kinds(ref, kinds);
        } else {
            ro->aggregate(ref, kinds, req.body);
        }
        storage::save_research_object(*ro, dir(name));
        json jk = json::array();
        for (const auto& k : kinds) jk.push_back(k.value);
        append_event(name, "resource-added",
                     {{"ref", rel}, {"kinds", jk}, {"update", update}});
        res.status = update ? 200 : 201;
        if (!update) res.set_header("Location", "/ROs/" + name + "/" + rel);
    }

    void handle_delete(const httplib::Request& req, httplib::Response& res) {
        if (!require_auth(req, res)) return;
        std::lock_guard<std::mutex> lock(mu);
        std::string name = req.matches[1];
        std::string rel = req.matches[2];
        if (in_version_tree(rel)) {
            res.status = 405;
            res.set_content("versions are immutable\n", "text/plain");
            return;
        }
        ResearchObject* ro = find_live(name, res);
        if (!ro) return;
        Iri ref = ro->resolve_ref(rel);
        const core::AggregatedResource* r = ro->find_resource(ref);
        if (!r) {
            res.status = 404;
            res.set_content("not aggregated: " + rel + "\n", "text/plain");
            return;
        }
        bool internal = r->content.has_value();
        ro->deaggregate(ref);
        if (internal) fs::remove(dir(name) / rel);
        storage::save_research_object(*ro, dir(name));
        append_event(name, "resource-removed", {{"ref", rel}});
        res.status = 204;
    }

    void handle_evolution_copy(const httplib::Request& req, httplib::Response& res) {
        if (!require_auth(req, res)) return;
        std::lock_guard<std::mutex> lock(mu);
        std::string name = req.matches[1];
        ResearchObject* ro = find_live(name, res);
        if (!ro) return;
        std::string target = req.get_param_value("target");
        if (target != "snapshot" && target != "archive") {
            res.status = 400;
            res.set_content("target must be snapshot or archive\n", "text/plain");
            return;
        }
        std::vector<core::Violation> violations = core::validate(*ro);
        if (!violations.empty()) {
            std::string msg = "research object is not valid:\n";
            for (const auto& v : violations)
                msg += v.code + " " + v.subject.value + ": " + v.message + "\n";
            res.status = 409;
            res.set_content(msg, "text/plain");
            return;
        }
        Timestamp at = now();
        evo::VersionRecord rec = target == "archive"
                                     ? evo::archive(*ro, store, ro->creator(), at)
                                     : evo::snapshot(*ro, store, ro->creator(), at);
        storage::save_version(store, rec.version_id, dir(name));
        std::string leaf = rec.version_id.value.substr(ro->id().value.size());
        if (!leaf.empty() && leaf.back() == '/') leaf.pop_back();
        append_event(name, target == "archive" ? "archived" : "snapshotted", {{"leaf", leaf}});
        res.status = 201;
        res.set_header("Location", "/ROs/" + name + "/" + leaf + "/");
    }

    void handle_get(const httplib::Request& req, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(mu);
        std::string name = req.matches[1];
        std::string rel = req.matches[2];
        ResearchObject* ro = find_live(name, res);
        if (!ro) return;

        if (rel.empty()) {
            respond_manifest(*ro, req, res);
            return;
        }
        if (rel == "evolution") {
            Graph g;
            for (const Iri& vid : store.versions_of(ro->id()))
                g = rdf::merge(g, evo::emit_evolution_graph(store, vid));
            res.set_content(rdf::serialize_turtle(g), "text/turtle");
            return;
        }
        if (in_version_tree(rel)) {
            std::string leaf = rel.substr(0, 4);
            Iri vid{ro->id().value + leaf + "/"};
            if (!store.has_version(vid)) {
                res.status = 404;
                res.set_content("no such version: " + leaf + "\n", "text/plain");
                return;
            }
            const ResearchObject& frozen = store.stored_ro(vid);
            std::string rest = rel.size() > 5 ? rel.substr(5) : "";
            if (rest.empty()) {
                respond_manifest(frozen, req, res);
                return;
            }
            serve_payload(frozen, rest, res);
            return;
        }
        if (rel == ".ro/manifest.ttl") {
            res.set_content(rdf::serialize_turtle(core::build_manifest(*ro), ro->id()),
                            "text/turtle");
            return;
        }
        serve_payload(*ro, rel, res);
    }

    static void serve_payload(const ResearchObject& ro, const std::string& rel,
                              httplib::Response& res) {
        const core::AggregatedResource* r = ro.find_resource(ro.resolve_ref(rel));
        if (!r || !r->content) {
            res.status = 404;
            res.set_content("no such resource: " + rel + "\n", "text/plain");
            return;
        }
        res.set_content(*r->content, "application/octet-stream");
    }

    void handle_notifications(const httplib::Request& req, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(mu);
        std::string ro_filter = req.get_param_value("ro");
        long since = 0;
        if (req.has_param("since")) since = std::stol(req.get_param_value("since"));

        std::ostringstream out;
        out << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
            << "<feed xmlns=\"http://www.w3.org/2005/Atom\">\n"
            << "  <title>research object events</title>\n"
            << "  <id>urn:ro-service:feed</id>\n"
            << "  <updated>" << (events.empty() ? now().value : events.back().at)
            << "</updated>\n";
        for (auto it = events.rbegin(); it != events.rend(); ++it) {
            if (it->seq <= since) continue;
            if (!ro_filter.empty() && it->ro != ro_filter) continue;
            out << "  <entry>\n"
                << "    <id>urn:event:" << it->seq << "</id>\n"
                << "    <title>" << xml_escape(it->kind) << " " << xml_escape(it->ro)
                << "</title>\n"
                << "    <updated>" << it->at << "</updated>\n"
                << "    <content type=\"text\">" << xml_escape(it->detail.dump())
                << "</content>\n"
                << "  </entry>\n";
        }
        out << "</feed>\n";
        res.set_content(out.str(), "application/atom+xml");
    }

    void handle_query(const httplib::Request& req, httplib::Response& res) {
        std::lock_guard<std::mutex> lock(mu);
        auto parse_slot = [&](const char* key) -> std::pair<bool, std::optional<Term>> {
            if (!req.has_param(key)) return {true, std::nullopt};
            std::string v = req.get_param_value(key);
            if (v.empty()) return {true, std::nullopt};
            if (v.front() == '"') {
                if (v.size() < 2 || v.back() != '"') return {false, std::nullopt};
                return {true, rdf::Literal::plain(v.substr(1, v.size() - 2))};
            }
            Iri iri{v};
            if (!iri.is_absolute()) return {false, std::nullopt};
            return {true, iri};
        };
        auto [ok_s, s] = parse_slot("s");
        auto [ok_p, p] = parse_slot("p");
        auto [ok_o, o] = parse_slot("o");
        if (!ok_s || !ok_p || !ok_o) {
            res.status = 400;
            res.set_content("terms must be absolute IRIs or \"quoted\" literals\n", "text/plain");
            return;
        }

        json rows = json::array();
        auto scan = [&](const std::string& source, const Graph& g) {
            for (const auto& t : g.match(s, p, o))
                rows.push_back({{"graph", source},
                                {"s", term_to_string(rdf::to_term(t.subject))},
                                {"p", t.predicate.value},
                                {"o", term_to_string(t.object)}});
        };
        for (const auto& [name, ro] : ros) {
            scan(core::manifest_iri(ro.id()).value, core::build_manifest(ro));
            for (const auto& a : ro.annotations()) {
                try {
                    scan(a.body_ref.value, ro.body_graph(a));
                } catch (const rdf::ParseError&) {
                    // unparseable bodies are skipped, matching checklist behavior
                }
            }
            for (const Iri& vid : store.versions_of(ro.id())) {
                scan(vid.value + ".ro/manifest.ttl",
                     core::build_manifest(store.stored_ro(vid)));
                scan(vid.value + "evolution", evo::emit_evolution_graph(store, vid));
            }
        }
        res.set_content(rows.dump(2) + "\n", "application/json");
    }
};

Service::Service(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {}

Service::~Service() { stop(); }

void Service::start(const std::string& host, int port) {
    if (port == 0) {
        impl_->port = impl_->server.bind_to_any_port(host.c_str());
    } else {
        impl_->server.bind_to_port(host.c_str(), port);
        impl_->port = port;
    }
    impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
    impl_->server.wait_until_ready();
}

void Service::stop() {
    if (impl_ && impl_->thread.joinable()) {
        impl_->server.stop();
        impl_->thread.join();
    }
}

int Service::port() const { return impl_->port; }

}  // namespace ro::service
