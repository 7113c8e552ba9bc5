// End-to-end acceptance checks, one per shipped guarantee. Each check prints
// a single PASS/FAIL line with its runtime; the binary exits nonzero if any
// check fails or overruns its time budget.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"
#include "fixture_data.hpp"
#include "json.hpp"
#include "ro/checklist.hpp"
#include "ro/cli.hpp"
#include "ro/enactment.hpp"
#include "ro/evolution.hpp"
#include "ro/research_object.hpp"
#include "ro/service.hpp"
#include "ro/storage.hpp"
#include "ro/vocab.hpp"
#include "ro/workflow.hpp"
#include "test_support.hpp"

using namespace ro;
using namespace ro::testsupport;
namespace fs = std::filesystem;
using nlohmann::json;
using rdf::Graph;
using rdf::Iri;
using rdf::Term;

namespace {

struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void check(bool ok, const std::string& what) {
    if (!ok) throw CheckFailure(what);
}

// ---- scripted CLI sessions -------------------------------------------------

struct CliSession {
    fs::path root;
    cli::CliConfig cfg;

    CliSession() {
        std::string tmpl = (fs::temp_directory_path() / "ro-acc-XXXXXX").string();
        root = mkdtemp(tmpl.data());
        cfg.store_root = root / "store";
        cfg.base_iri = Iri{"http://x/"};
        cfg.clock = [] { return kT0; };
        fs::create_directories(cfg.store_root);
        fs::create_directories(root / "work");
    }
    ~CliSession() { fs::remove_all(root); }

    int run(const std::vector<std::string>& args) {
        std::ostringstream out, err;
        return cli::dispatch(args, cfg, out, err);
    }
    fs::path work(const std::string& name) const { return root / "work" / name; }
    void write(const std::string& name, const std::string& bytes) const {
        std::ofstream f(work(name), std::ios::binary);
        f << bytes;
    }
    std::string manifest_bytes(const std::string& name) const {
        std::ifstream f(cfg.store_root / name / ".ro" / "manifest.ttl", std::ios::binary);
        std::ostringstream s;
        s << f.rdbuf();
        return s.str();
    }

    void build_gwas() {
        write("data2.csv", "rsid,chromosome,position\nrs1042522,chr17,7676154\n");
        write("workflow34.xml", read_fixture("workflow34.wfdesc.ttl"));
        write("hypothesis.txt",
              "SNPs in the region are associated with Kegg pathway membership.\n");
        write("provenance.rdf", "# trace of run-481\n");
        write("title.ttl",
              "@prefix dct: <http://purl.org/dc/terms/> .\n<.> dct:title \"GWAS to Kegg\" .\n");
        write("hypothesis.ttl",
              "@prefix roterms: <http://purl.org/wf4ever/roterms#> .\n"
              "<hypothesis.txt> a roterms:Hypothesis .\n");
        check(run({"init", "gwas-to-kegg", "--creator", kAgent.value}) == 0, "init failed");
        check(run({"add", "gwas-to-kegg", work("data2.csv").string(), "--type", "dataset"}) == 0,
              "add data2.csv failed");
        check(run({"add", "gwas-to-kegg", work("workflow34.xml").string(), "--type",
                   "software"}) == 0,
              "add workflow34.xml failed");
        check(run({"add", "gwas-to-kegg", work("hypothesis.txt").string()}) == 0,
              "add hypothesis.txt failed");
        check(run({"add", "gwas-to-kegg", work("provenance.rdf").string()}) == 0,
              "add provenance.rdf failed");
        check(run({"annotate", "gwas-to-kegg", "--target", ".", "--body",
                   work("title.ttl").string()}) == 0,
              "title annotation failed");
        check(run({"annotate", "gwas-to-kegg", "--target", "workflow34.xml", "--body",
                   work("hypothesis.ttl").string()}) == 0,
              "hypothesis annotation failed");
    }
};

// ---- the criteria ----------------------------------------------------------

void golden_gwas_manifest() {
    CliSession s;
    s.build_gwas();
    Graph produced =
        rdf::parse_turtle(s.manifest_bytes("gwas-to-kegg"), Iri{"http://x/gwas-to-kegg/"});
    Graph golden = rdf::parse_turtle(read_fixture("gwas_manifest.ttl"),
                                     Iri{"http://x/gwas-to-kegg/"});
    check(rdf::graph_isomorphic(produced, golden),
          "session manifest is not isomorphic to the golden fixture");
}

void evolution_scenario() {
    evo::EvolutionStore store;
    core::ResearchObject ro = core::ResearchObject::create(Iri{"http://x/ro-1/"}, kAgent, kT0);
    ro.aggregate(ro.resolve_ref("data2.csv"), {vocab::ro_dataset}, "chr,pos\n");
    ro.aggregate(ro.resolve_ref("workflow34.xml"), {vocab::ro_software}, "<workflow/>");
    evo::VersionRecord v1 = evo::snapshot(ro, store, kAgent, kT0);

    Graph note;
    note.insert(ro.resolve_ref("workflow34.xml"), vocab::rdf_type, vocab::ro_software);
    ro.annotate({ro.resolve_ref("workflow34.xml")}, note, kAgent, kT0);
    ro.aggregate(ro.resolve_ref("conclusion.txt"), {vocab::roterms_conclusion},
                 "pathways confirmed");
    evo::VersionRecord v2 =
        evo::archive(ro, store, kAgent, core::Timestamp{"2013-02-01T00:00:00Z"});

    check(v2.change_spec.has_value(), "archive produced no change specification");
    check(v2.change_spec->changes.size() == 2, "expected exactly 2 changes");
    for (const auto& c : v2.change_spec->changes)
        check(c.kind == evo::ChangeKind::Addition, "expected only Additions");

    Graph g = evo::emit_evolution_graph(store, v2.version_id);
    check(g.match(std::nullopt, Term{vocab::prov_was_revision_of}, std::nullopt).size() == 1,
          "expected exactly one prov:wasRevisionOf");
    check(g.match(std::nullopt, Term{vocab::rdf_type},
                  Term{vocab::roevo_change_specification})
                  .size() == 1,
          "expected exactly one ChangeSpecification");
    check(g.match(std::nullopt, Term{vocab::roevo_has_change}, std::nullopt).size() == 2,
          "expected exactly 2 roevo:hasChange triples");
    check(g.contains({v2.version_id, vocab::prov_was_revision_of, v1.version_id}),
          "revision edge does not point at the first snapshot");
}

void diff_patch_inverse() {
    std::mt19937 rng(20130101);
    for (int i = 0; i < 200; ++i) {
        core::ResearchObject a = random_research_object(rng);
        core::ResearchObject b = a;
        random_edits(rng, b, 6);
        core::ResearchObject patched = evo::apply_changes(a, evo::diff(a, b), resolver_for(b));
        check(core::structurally_equal(patched, b),
              "patched RO differs from target in trial " + std::to_string(i));
    }
}

void turtle_round_trip() {
    std::mt19937 rng(424242);
    const Iri base{"http://x/base/"};
    std::uniform_int_distribution<int> ntriples(0, 50);
    std::uniform_int_distribution<int> nblanks(0, 8);
    std::uniform_int_distribution<int> pick(0, 11);
    std::uniform_int_distribution<int> kind(0, 9);
    for (int trial = 0; trial < 200; ++trial) {
        Graph g;
        int blanks = nblanks(rng);
        int triples = ntriples(rng);
        auto iri = [&] { return Iri{"http://x/n" + std::to_string(pick(rng))}; };
        auto blank = [&] { return rdf::BlankNode{"b" + std::to_string(rng() % blanks)}; };
        for (int i = 0; i < triples; ++i) {
            rdf::Subject s =
                (blanks > 0 && kind(rng) < 3) ? rdf::Subject{blank()} : rdf::Subject{iri()};
            Term o;
            int k = kind(rng);
            if (blanks > 0 && k < 3) o = blank();
            else if (k < 6) o = iri();
            else if (k < 8) o = rdf::Literal::plain("lit " + std::to_string(rng() % 50));
            else if (k == 8) o = rdf::Literal::tagged("hallo", "de");
            else o = rdf::Literal::typed(std::to_string(rng() % 100), vocab::xsd_date_time);
            g.insert(s, iri(), o);
        }
        Graph back = rdf::parse_turtle(rdf::serialize_turtle(g, base), base);
        check(rdf::graph_isomorphic(back, g),
              "round-trip not isomorphic in trial " + std::to_string(trial));
    }
}

void wfdesc_fixture() {
    Graph g = rdf::parse_turtle(read_fixture("workflow34.wfdesc.ttl"), Iri{kWfBase});
    wfdesc::Workflow wf = wfdesc::parse_workflow(g);
    check(wfdesc::validate_workflow(wf).empty(), "fixture workflow fails validation");

    std::vector<wfdesc::Process> order = wfdesc::topological_order(wf);
    check(order.size() == 3, "expected 3 processes in topological order");
    check(order[0].label == "input_chr_pos" && order[1].label == "G_P" &&
              order[2].label == "Flatten_List_3",
          "unexpected topological order");

    std::set<std::string> unbound;
    for (const auto& p : wfdesc::unbound_inputs(wf)) unbound.insert(p.name);
    check(unbound == std::set<std::string>{"chrom_start", "chrom_end"},
          "unbound inputs are not exactly {chrom_start, chrom_end}");
}

void wfprov_enactment() {
    wfdesc::Workflow wf = mining_workflow();
    auto [run, trace] =
        wfprov::enact(wf, mining_bindings(), mining_registry(), kEngine, kRunId, kT0);
    check(run.process_runs.size() == 3, "expected 3 process runs");

    // Brute-force upstream reachability over the emitted PROV edges.
    Iri out = run.outputs.at("output_table");
    std::map<Iri, std::vector<Iri>> up;
    for (const auto& t : trace) {
        if (t.predicate == vocab::prov_was_generated_by || t.predicate == vocab::prov_used)
            up[std::get<Iri>(t.subject)].push_back(std::get<Iri>(t.object));
    }
    std::set<Iri> oracle{out};
    std::vector<Iri> queue{out};
    while (!queue.empty()) {
        Iri cur = queue.back();
        queue.pop_back();
        for (const auto& next : up[cur])
            if (oracle.insert(next).second) queue.push_back(next);
    }
    check(wfprov::lineage(run, out) == oracle, "lineage differs from the reachability oracle");

    check(wfprov::conformance(run, wf).empty(), "fresh run is not conformant");

    wfprov::WorkflowRun tampered = run;
    tampered.process_runs[1].used.erase("chr_pos_list");
    check(!wfprov::conformance(tampered, wf).empty(),
          "removing a usage edge produced no violation");
}

void checklist_verdicts() {
    CliSession s;
    s.build_gwas();
    checklist::Checklist cl =
        checklist::parse_checklist(read_fixture("workflow-ro-checklist.json"));

    core::ResearchObject ro = storage::load_research_object(s.cfg.store_root / "gwas-to-kegg",
                                                            Iri{"http://x/gwas-to-kegg/"});
    checklist::Report before = checklist::evaluate(ro, cl);
    check(before.verdict == checklist::Verdict::FullySatisfied,
          "intact GWAS RO is not FULLY_SATISFIED");

    check(s.run({"remove", "gwas-to-kegg", "hypothesis.txt"}) == 0, "remove failed");
    ro = storage::load_research_object(s.cfg.store_root / "gwas-to-kegg",
                                       Iri{"http://x/gwas-to-kegg/"});
    checklist::Report after = checklist::evaluate(ro, cl);
    check(after.verdict == checklist::Verdict::Nonconformant,
          "RO without hypothesis is not NONCONFORMANT");
    bool must_failed = false;
    for (const auto& r : after.results)
        if (r.requirement_id == "hypothesis-present" && r.level == checklist::Level::Must &&
            !r.passed)
            must_failed = true;
    check(must_failed, "the hypothesis-present MUST requirement did not fail");
}

void service_session() {
    std::string tmpl = (fs::temp_directory_path() / "ro-acc-svc-XXXXXX").string();
    fs::path root = mkdtemp(tmpl.data());
    service::ServiceConfig cfg;
    cfg.store_root = root / "srv";
    cfg.base_url = "http://x";
    cfg.token = "sekrit";
    cfg.clock = [] { return kT0; };
    auto svc = std::make_unique<service::Service>(cfg);
    svc->start();

    httplib::Client c("127.0.0.1", svc->port());
    httplib::Headers auth{{"Authorization", "Bearer sekrit"}};

    httplib::Headers create = auth;
    create.emplace("Slug", "gwas");
    create.emplace("RO-Creator", kAgent.value);
    create.emplace("RO-Created", kT0.value);
    auto made = c.Post("/", create, "", "text/plain");
    check(made && made->status == 201, "create did not return 201");

    const std::vector<std::pair<std::string, std::string>> files{
        {"data2.csv?type=dataset", "rsid,chr\n"},
        {"workflow34.xml?type=software", "<workflow/>"},
        {"hypothesis.txt", "SNPs matter\n"},
        {"provenance.rdf", "# trace\n"}};
    for (const auto& [path, bytes] : files) {
        auto res = c.Put("/ROs/gwas/" + path, auth, bytes, "application/octet-stream");
        check(res && res->status == 201, "PUT " + path + " did not return 201");
    }

    auto snap = c.Post("/ROs/gwas/evolution?target=snapshot", auth, "", "text/plain");
    check(snap && snap->status == 201, "snapshot did not return 201");
    auto arch = c.Post("/ROs/gwas/evolution?target=archive", auth, "", "text/plain");
    check(arch && arch->status == 201, "archive did not return 201");

    auto tamper = c.Put("/ROs/gwas/v001/data2.csv", auth, "x", "text/plain");
    check(tamper && tamper->status == 405, "version edit was not refused with 405");

    auto ttl = c.Get("/ROs/gwas/", {{"Accept", "text/turtle"}});
    auto js = c.Get("/ROs/gwas/", {{"Accept", "application/json"}});
    check(ttl && ttl->status == 200 && js && js->status == 200, "negotiation failed");
    json j = json::parse(js->body);
    std::set<std::string> json_refs;
    for (const auto& r : j["resources"]) json_refs.insert(r["ref"].get<std::string>());
    std::set<std::string> ttl_refs;
    Graph manifest = rdf::parse_turtle(ttl->body, Iri{"http://x/ROs/gwas/"});
    for (const auto& t : manifest.match(std::nullopt, Term{vocab::ore_aggregates}, std::nullopt))
        ttl_refs.insert(std::get<Iri>(t.object).value);
    check(json_refs == ttl_refs, "Turtle and JSON views disagree on aggregated refs");

    // The feed must replay the journal's event sequence, newest first.
    std::vector<std::string> journal_kinds;
    {
        std::ifstream in(root / "srv" / "journal.log", std::ios::binary);
        std::string line;
        while (std::getline(in, line))
            if (!line.empty()) journal_kinds.push_back(json::parse(line).at("kind"));
    }
    check(journal_kinds == std::vector<std::string>{"created", "resource-added",
                                                    "resource-added", "resource-added",
                                                    "resource-added", "snapshotted",
                                                    "archived"},
          "journal does not record the scripted sequence");
    auto feed = c.Get("/notifications");
    check(feed && feed->status == 200, "feed not served");
    std::size_t prev = std::string::npos;
    for (std::size_t seq = journal_kinds.size(); seq >= 1; --seq) {
        std::size_t pos = feed->body.find("urn:event:" + std::to_string(seq) + "<");
        check(pos != std::string::npos, "feed is missing event " + std::to_string(seq));
        check(prev == std::string::npos || pos > prev, "feed entries are not newest first");
        prev = pos;
    }

    auto rows = c.Get("/query",
                      {{"p", vocab::rdf_type.value}, {"o", vocab::ro_research_object.value}},
                      httplib::Headers{});
    check(rows && rows->status == 200, "query not served");
    // live manifest + two frozen version manifests describe one RO each
    check(json::parse(rows->body).size() == 3,
          "type query row count does not match stored state");
    auto agg = c.Get("/query", {{"p", vocab::ore_aggregates.value}}, httplib::Headers{});
    check(agg && json::parse(agg->body).size() == 12,
          "aggregation query row count does not match stored state (4 resources x 3 manifests)");

    svc->stop();
    svc.reset();
    fs::remove_all(root);
}

void version_immutability() {
    std::string tmpl = (fs::temp_directory_path() / "ro-acc-imm-XXXXXX").string();
    fs::path root = mkdtemp(tmpl.data());
    std::mt19937 rng(55555);
    for (int trial = 0; trial < 50; ++trial) {
        fs::path dir = root / ("t" + std::to_string(trial));
        core::ResearchObject ro = random_research_object(rng);
        storage::save_research_object(ro, dir);

        evo::EvolutionStore store;
        evo::VersionRecord rec = evo::snapshot(ro, store, kAgent, kT0);
        storage::save_version(store, rec.version_id, dir);
        fs::path frozen_manifest = dir / "v001" / ".ro" / "manifest.ttl";
        std::ifstream f1(frozen_manifest, std::ios::binary);
        std::stringstream before;
        before << f1.rdbuf();
        f1.close();

        random_edits(rng, ro, 5);
        storage::save_research_object(ro, dir);

        std::ifstream f2(frozen_manifest, std::ios::binary);
        std::stringstream after;
        after << f2.rdbuf();
        check(before.str() == after.str(),
              "stored version manifest changed in trial " + std::to_string(trial));
    }
    fs::remove_all(root);
}

struct Criterion {
    const char* name;
    double budget_ms;
    std::function<void()> body;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"golden GWAS manifest from scripted CLI session", 1000, golden_gwas_manifest},
        {"evolution scenario: snapshot, edits, archive", 1000, evolution_scenario},
        {"diff/patch inverse over 200 random RO pairs", 10000, diff_patch_inverse},
        {"Turtle round-trip over 200 random graphs", 10000, turtle_round_trip},
        {"workflow fixture: validation, order, unbound inputs", 1000, wfdesc_fixture},
        {"enactment: trace, lineage oracle, conformance", 1000, wfprov_enactment},
        {"checklist verdict flips when the hypothesis is removed", 1000, checklist_verdicts},
        {"scripted HTTP session against an ephemeral service", 5000, service_session},
        {"50 mutate-after-snapshot sequences leave versions intact", 5000,
         version_immutability},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const Criterion& c = criteria[i];
        auto t0 = std::chrono::steady_clock::now();
        std::string error;
        try {
            c.body();
        } catch (const std::exception& e) {
            error = e.what();
        }
        double ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
        bool ok = error.empty() && ms <= c.budget_ms;
        if (!ok) ++failures;
        std::printf("[%s] %zu. %-55s %7.1f ms (limit %.0f ms)\n", ok ? "PASS" : "FAIL", i + 1,
                    c.name, ms, c.budget_ms);
        if (!error.empty()) std::printf("       %s\n", error.c_str());
        else if (ms > c.budget_ms) std::printf("       exceeded time budget\n");
    }
    return failures == 0 ? 0 : 1;
}
