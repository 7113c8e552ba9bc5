#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"
#include "fixture_data.hpp"
#include "json.hpp"
#include "ro/cli.hpp"
#include "ro/research_object.hpp"
#include "ro/service.hpp"
#include "ro/storage.hpp"
#include "ro/vocab.hpp"
#include "test_support.hpp"

using namespace ro;
using namespace ro::testsupport;
namespace fs = std::filesystem;
using nlohmann::json;
using rdf::Iri;
using rdf::Term;

namespace {

const std::string kToken = "sekrit";

struct SvcFixture {
    fs::path root;
    std::unique_ptr<service::Service> svc;
    httplib::Headers auth{{"Authorization", "Bearer " + kToken}};

    SvcFixture() {
        std::string tmpl = (fs::temp_directory_path() / "ro-svc-XXXXXX").string();
        root = mkdtemp(tmpl.data());
        boot();
    }
    ~SvcFixture() {
        svc->stop();
        fs::remove_all(root);
    }

    void boot() {
        service::ServiceConfig cfg;
        cfg.store_root = root / "srv";
        cfg.base_url = "http://x";
        cfg.token = kToken;
        cfg.clock = [] { return kT0; };
        svc = std::make_unique<service::Service>(cfg);
        svc->start();
    }
    void restart() {
        svc->stop();
        svc.reset();
        boot();
    }

    httplib::Client client() const {
        httplib::Client c("127.0.0.1", svc->port());
        c.set_connection_timeout(5);
        return c;
    }

    void create(const std::string& name) const {
        auto c = client();
        httplib::Headers h = auth;
        h.emplace("Slug", name);
        h.emplace("RO-Creator", kAgent.value);
        h.emplace("RO-Created", kT0.value);
        auto res = c.Post("/", h, "", "text/plain");
        REQUIRE(res);
        REQUIRE(res->status == 201);
    }

    int put(const std::string& name, const std::string& rel, const std::string& bytes,
            const std::string& type = "") const {
        auto c = client();
        std::string path = "/ROs/" + name + "/" + rel;
        if (!type.empty()) path += "?type=" + type;
        auto res = c.Put(path, auth, bytes, "application/octet-stream");
        REQUIRE(res);
        return res->status;
    }

    int annotate(const std::string& name, const std::string& rel,
                 const std::vector<std::string>& targets, const std::string& ttl) const {
        auto c = client();
        httplib::Headers h = auth;
        for (const auto& t : targets) h.emplace("Link", "<" + t + ">; rel=\"annotates\"");
        h.emplace("RO-Creator", kAgent.value);
        h.emplace("RO-Created", kT0.value);
        auto res = c.Put("/ROs/" + name + "/" + rel, h, ttl, "text/turtle");
        REQUIRE(res);
        return res->status;
    }

    std::string get_turtle(const std::string& path) const {
        auto c = client();
        auto res = c.Get(path, {{"Accept", "text/turtle"}});
        REQUIRE(res);
        REQUIRE(res->status == 200);
        return res->body;
    }

    rdf::Graph manifest(const std::string& name, const std::string& leaf = "") const {
        std::string path = "/ROs/" + name + "/" + (leaf.empty() ? "" : leaf + "/");
        return rdf::parse_turtle(get_turtle(path), Iri{"http://x/ROs/" + name + "/"});
    }

    std::size_t aggregate_count(const std::string& name) const {
        return manifest(name).match(std::nullopt, Term{vocab::ore_aggregates}, std::nullopt).size();
    }

    /// A small scripted session: one RO, two resources, one annotation.
    void build_sample(const std::string& name = "sample") const {
        create(name);
        REQUIRE(put(name, "data.csv", "a,b\n1,2\n", "dataset") == 201);
        REQUIRE(put(name, "readme.txt", "hello\n") == 201);
        REQUIRE(annotate(name, "note.ttl", {"http://x/ROs/" + name + "/data.csv"},
                         "<data.csv> <http://purl.org/dc/terms/title> \"table\" .\n") == 201);
    }

    void truncate_journal(std::size_t keep_lines) const {
        fs::path p = root / "srv" / "journal.log";
        std::ifstream in(p, std::ios::binary);
        std::ostringstream kept;
        std::string line;
        for (std::size_t i = 0; i < keep_lines && std::getline(in, line); ++i)
            kept << line << "\n";
        in.close();
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        out << kept.str();
    }
};

}  // namespace

TEST_CASE("create_conflicts_and_bad_names") {
    SvcFixture f;
    f.create("alpha");
    auto c = f.client();

    httplib::Headers h = f.auth;
    h.emplace("Slug", "alpha");
    h.emplace("RO-Creator", kAgent.value);
    auto dup = c.Post("/", h, "", "text/plain");
    REQUIRE(dup);
    CHECK(dup->status == 409);

    httplib::Headers bad = f.auth;
    bad.emplace("Slug", "Bad Name!");
    bad.emplace("RO-Creator", kAgent.value);
    auto res = c.Post("/", bad, "", "text/plain");
    REQUIRE(res);
    CHECK(res->status == 400);

    httplib::Headers nocreator = f.auth;
    nocreator.emplace("Slug", "beta");
    auto res2 = c.Post("/", nocreator, "", "text/plain");
    REQUIRE(res2);
    CHECK(res2->status == 400);
}

TEST_CASE("mutations_require_bearer_token_reads_do_not") {
    SvcFixture f;
    f.build_sample();
    auto c = f.client();

    auto res = c.Post("/", {{"Slug", "nope"}, {"RO-Creator", kAgent.value}}, "", "text/plain");
    REQUIRE(res);
    CHECK(res->status == 401);

    auto put = c.Put("/ROs/sample/x.txt", httplib::Headers{{"Authorization", "Bearer wrong"}},
                     "x", "text/plain");
    REQUIRE(put);
    CHECK(put->status == 401);

    auto get = c.Get("/ROs/sample/");
    REQUIRE(get);
    CHECK(get->status == 200);
}

TEST_CASE("put_grows_manifest_and_overwrite_returns_200") {
    SvcFixture f;
    f.create("alpha");
    CHECK(f.aggregate_count("alpha") == 0);
    CHECK(f.put("alpha", "one.txt", "1") == 201);
    CHECK(f.put("alpha", "two.txt", "2", "dataset") == 201);
    CHECK(f.aggregate_count("alpha") == 2);

    CHECK(f.put("alpha", "one.txt", "1-again") == 200);
    CHECK(f.aggregate_count("alpha") == 2);

    auto c = f.client();
    auto body = c.Get("/ROs/alpha/one.txt");
    REQUIRE(body);
    CHECK(body->body == "1-again");

    CHECK(f.put("nosuch", "x.txt", "x") == 404);

    auto del = c.Delete("/ROs/alpha/two.txt", f.auth);
    REQUIRE(del);
    CHECK(del->status == 204);
    CHECK(f.aggregate_count("alpha") == 1);

    auto gone = c.Delete("/ROs/alpha/two.txt", f.auth);
    REQUIRE(gone);
    CHECK(gone->status == 404);
}

TEST_CASE("annotation_put_via_link_header") {
    SvcFixture f;
    f.build_sample();
    rdf::Graph g = f.manifest("sample");
    // 2 resources + 1 annotation body aggregated
    CHECK(g.match(std::nullopt, Term{vocab::ore_aggregates}, std::nullopt).size() == 3);
    CHECK(g.match(std::nullopt, Term{vocab::rdf_type}, Term{vocab::ao_annotation}).size() == 1);
    CHECK(g.match(std::nullopt, Term{vocab::ao_annotates_resource},
                  Term{Iri{"http://x/ROs/sample/data.csv"}})
              .size() == 1);

    CHECK(f.annotate("sample", "broken.ttl", {"http://x/ROs/sample/data.csv"},
                     "this is not turtle <<<") == 400);
}

TEST_CASE("content_negotiation_turtle_json_and_406") {
    SvcFixture f;
    f.build_sample();
    auto c = f.client();

    auto ttl = c.Get("/ROs/sample/", {{"Accept", "text/turtle"}});
    REQUIRE(ttl);
    CHECK(ttl->status == 200);
    CHECK(ttl->get_header_value("Content-Type").find("text/turtle") == 0);

    auto js = c.Get("/ROs/sample/", {{"Accept", "application/json"}});
    REQUIRE(js);
    CHECK(js->status == 200);
    json j = json::parse(js->body);
    CHECK(j["id"] == "http://x/ROs/sample/");
    CHECK(j["creator"] == kAgent.value);

    // Both representations must list the same resource refs.
    std::set<std::string> json_refs;
    for (const auto& r : j["resources"]) json_refs.insert(r["ref"].get<std::string>());
    std::set<std::string> ttl_refs;
    rdf::Graph g = rdf::parse_turtle(ttl->body, Iri{"http://x/ROs/sample/"});
    for (const auto& t :
         g.match(std::nullopt, Term{vocab::ore_aggregates}, std::nullopt))
        ttl_refs.insert(std::get<Iri>(t.object).value);
    CHECK(json_refs == ttl_refs);

    auto none = c.Get("/ROs/sample/", {{"Accept", "text/html"}});
    REQUIRE(none);
    CHECK(none->status == 406);

    auto plain = c.Get("/ROs/sample/");
    REQUIRE(plain);
    CHECK(plain->get_header_value("Content-Type").find("text/turtle") == 0);
}

TEST_CASE("evolution_copy_creates_immutable_versions") {
    SvcFixture f;
    f.build_sample();
    auto c = f.client();

    auto snap = c.Post("/ROs/sample/evolution?target=snapshot", f.auth, "", "text/plain");
    REQUIRE(snap);
    CHECK(snap->status == 201);
    CHECK(snap->get_header_value("Location") == "/ROs/sample/v001/");

    std::string frozen_before = f.get_turtle("/ROs/sample/v001/");

    // The frozen copy is reachable and mutation attempts under it are refused.
    auto put = c.Put("/ROs/sample/v001/data.csv", f.auth, "tampered", "text/plain");
    REQUIRE(put);
    CHECK(put->status == 405);
    auto del = c.Delete("/ROs/sample/v001/data.csv", f.auth);
    REQUIRE(del);
    CHECK(del->status == 405);

    // Live edits never leak into the stored version.
    CHECK(f.put("sample", "extra.txt", "late addition") == 201);
    CHECK(f.get_turtle("/ROs/sample/v001/") == frozen_before);
    auto payload = c.Get("/ROs/sample/v001/data.csv");
    REQUIRE(payload);
    CHECK(payload->body == "a,b\n1,2\n");

    auto missing = c.Get("/ROs/sample/v002/");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto bad = c.Post("/ROs/sample/evolution?target=sideways", f.auth, "", "text/plain");
    REQUIRE(bad);
    CHECK(bad->status == 400);
}

TEST_CASE("evolution_copy_rejects_invalid_ro_with_violation_codes") {
    SvcFixture f;
    f.create("alpha");
    REQUIRE(f.put("alpha", "a.txt", "a") == 201);

    // Annotating something that is not aggregated conflicts immediately.
    CHECK(f.annotate("alpha", "dangling.ttl", {"http://x/ROs/alpha/missing.txt"},
                     "<a.txt> <http://purl.org/dc/terms/title> \"x\" .\n") == 409);

    REQUIRE(f.annotate("alpha", "note.ttl", {"http://x/ROs/alpha/a.txt"},
                       "<a.txt> <http://purl.org/dc/terms/title> \"x\" .\n") == 201);
    // Overwriting the annotation body with non-Turtle bytes makes the RO
    // invalid, which blocks snapshotting.
    REQUIRE(f.put("alpha", ".ro/annotations/001.ttl", "definitely not turtle <<<") == 200);
    auto c = f.client();
    auto res = c.Post("/ROs/alpha/evolution?target=snapshot", f.auth, "", "text/plain");
    REQUIRE(res);
    CHECK(res->status == 409);
    CHECK(res->body.find("UNPARSEABLE_BODY") != std::string::npos);
}

TEST_CASE("evolution_graph_counts_revisions_along_the_chain") {
    SvcFixture f;
    f.build_sample();
    auto c = f.client();
    for (int i = 0; i < 3; ++i) {
        REQUIRE(f.put("sample", "step.txt", "iteration " + std::to_string(i)) < 300);
        auto res = c.Post("/ROs/sample/evolution?target=snapshot", f.auth, "", "text/plain");
        REQUIRE(res);
        REQUIRE(res->status == 201);
    }
    rdf::Graph g = rdf::parse_turtle(f.get_turtle("/ROs/sample/evolution"), Iri{"http://x/"});
    CHECK(g.match(std::nullopt, Term{vocab::prov_was_revision_of}, std::nullopt).size() == 2);
    CHECK(g.match(std::nullopt, Term{vocab::rdf_type}, Term{vocab::roevo_snapshot_ro}).size() ==
          3);
}

TEST_CASE("notification_feed_is_newest_first_and_filterable") {
    SvcFixture f;
    f.build_sample("alpha");
    f.create("beta");
    auto c = f.client();

    auto feed = c.Get("/notifications");
    REQUIRE(feed);
    CHECK(feed->status == 200);
    CHECK(feed->get_header_value("Content-Type").find("application/atom+xml") == 0);
    // alpha: created, resource-added x2, annotated (seq 1..4); beta: created (seq 5)
    std::size_t p5 = feed->body.find("urn:event:5");
    std::size_t p1 = feed->body.find("urn:event:1");
    REQUIRE(p5 != std::string::npos);
    REQUIRE(p1 != std::string::npos);
    CHECK(p5 < p1);

    auto since = c.Get("/notifications?since=4");
    REQUIRE(since);
    CHECK(since->body.find("urn:event:5") != std::string::npos);
    CHECK(since->body.find("urn:event:4") == std::string::npos);

    auto only_beta = c.Get("/notifications?ro=beta");
    REQUIRE(only_beta);
    CHECK(only_beta->body.find("urn:event:5") != std::string::npos);
    CHECK(only_beta->body.find("urn:event:1") == std::string::npos);
}

TEST_CASE("triple_pattern_query_across_stored_graphs") {
    SvcFixture f;
    f.build_sample("alpha");
    f.create("beta");
    auto c = f.client();

    auto one_per_ro = c.Get("/query",
                            {{"p", vocab::rdf_type.value},
                             {"o", vocab::ro_research_object.value}},
                            httplib::Headers{});
    REQUIRE(one_per_ro);
    REQUIRE(one_per_ro->status == 200);
    json rows = json::parse(one_per_ro->body);
    CHECK(rows.size() == 2);

    auto bound = c.Get("/query",
                       {{"s", "http://x/ROs/alpha/data.csv"},
                        {"p", "http://purl.org/dc/terms/title"},
                        {"o", "\"table\""}},
                       httplib::Headers{});
    REQUIRE(bound);
    json brows = json::parse(bound->body);
    REQUIRE(brows.size() == 1);
    CHECK(brows[0]["graph"] == "http://x/ROs/alpha/.ro/annotations/001.ttl");

    auto nothing = c.Get("/query", {{"o", "\"no such literal\""}}, httplib::Headers{});
    REQUIRE(nothing);
    CHECK(nothing->status == 200);
    CHECK(json::parse(nothing->body).empty());

    auto malformed = c.Get("/query", {{"o", "\"unterminated"}}, httplib::Headers{});
    REQUIRE(malformed);
    CHECK(malformed->status == 400);
    auto relative = c.Get("/query", {{"s", "not-absolute"}}, httplib::Headers{});
    REQUIRE(relative);
    CHECK(relative->status == 400);
}

TEST_CASE("restart_replays_journal_to_identical_state") {
    SvcFixture f;
    f.build_sample("alpha");
    auto c0 = f.client();
    REQUIRE(c0.Post("/ROs/alpha/evolution?target=snapshot", f.auth, "", "text/plain")->status ==
            201);
    std::string manifest_before = f.get_turtle("/ROs/alpha/");
    std::string version_before = f.get_turtle("/ROs/alpha/v001/");
    std::string evo_before = f.get_turtle("/ROs/alpha/evolution");

    f.restart();
    CHECK(f.get_turtle("/ROs/alpha/") == manifest_before);
    CHECK(f.get_turtle("/ROs/alpha/v001/") == version_before);
    CHECK(f.get_turtle("/ROs/alpha/evolution") == evo_before);
}

TEST_CASE("journal_prefix_replays_to_the_state_it_describes") {
    SvcFixture f;
    // seq 1: created, 2: data.csv, 3: readme.txt, 4: annotated
    f.build_sample("alpha");
    f.svc->stop();
    f.truncate_journal(3);
    f.boot();

    rdf::Graph g = f.manifest("alpha");
    CHECK(g.match(std::nullopt, Term{vocab::ore_aggregates}, std::nullopt).size() == 2);
    CHECK(g.match(std::nullopt, Term{vocab::rdf_type}, Term{vocab::ao_annotation}).empty());

    // A torn final line (crash mid-append) is ignored, keeping the good prefix.
    f.svc->stop();
    {
        std::ofstream out(f.root / "srv" / "journal.log", std::ios::app | std::ios::binary);
        out << "{\"seq\":99,\"at\":\"x";  // no newline, invalid JSON
    }
    f.boot();
    CHECK(f.aggregate_count("alpha") == 2);
    // The service keeps numbering after the surviving prefix.
    CHECK(f.put("alpha", "more.txt", "m") == 201);
    CHECK(f.aggregate_count("alpha") == 3);
}

TEST_CASE("cli_push_uploads_an_isomorphic_research_object") {
    SvcFixture f;

    // Build the GWAS RO locally under the service's id space, then push it.
    fs::path cli_root = f.root / "cli-store";
    fs::create_directories(cli_root);
    Iri ro_iri{"http://x/ROs/gwas-to-kegg/"};
    core::ResearchObject local = gwas_research_object(ro_iri);
    storage::save_research_object(local, cli_root / "gwas-to-kegg");

    cli::CliConfig cfg;
    cfg.store_root = cli_root;
    cfg.base_iri = Iri{"http://x/ROs/"};
    cfg.service_url = "http://127.0.0.1:" + std::to_string(f.svc->port());
    cfg.token = kToken;
    cfg.clock = [] { return kT0; };
    std::ostringstream out, err;
    REQUIRE(cli::dispatch({"push", "gwas-to-kegg"}, cfg, out, err) == 0);

    rdf::Graph remote = f.manifest("gwas-to-kegg");
    CHECK(rdf::graph_isomorphic(remote, core::build_manifest(local)));

    // Pushing again conflicts on create.
    CHECK(cli::dispatch({"push", "gwas-to-kegg"}, cfg, out, err) == 65);
}
