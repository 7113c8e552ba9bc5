#include "ro/cli.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#define CPPHTTPLIB_NO_EXCEPTIONS
#include "httplib.h"
#include "ro/checklist.hpp"
#include "ro/evolution.hpp"
#include "ro/research_object.hpp"
#include "ro/storage.hpp"
#include "ro/vocab.hpp"
#include "ro/zipfile.hpp"

namespace ro::cli {

namespace fs = std::filesystem;
using core::ResearchObject;
using core::Timestamp;
using nlohmann::json;
using rdf::Iri;
namespace vocab = ro::vocab;

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UserError : std::runtime_error {  // maps to exit 65
    using std::runtime_error::runtime_error;
};

/// Fail-fast advisory lock: one mutating invocation per RO directory.
class RoLock {
public:
    explicit RoLock(const fs::path& dir) : path_(dir / ".ro" / "lock") {
        fs::create_directories(path_.parent_path());
        fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
        if (fd_ < 0) throw IoError("research object is locked by another invocation: " + path_.string());
    }
    ~RoLock() {
        if (fd_ >= 0) {
            ::close(fd_);
            std::error_code ec;
            fs::remove(path_, ec);
        }
    }
    RoLock(const RoLock&) = delete;
    RoLock& operator=(const RoLock&) = delete;

private:
    fs::path path_;
    int fd_ = -1;
};

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (char c : name)
        if (!(std::islower(static_cast<unsigned char>(c)) ||
              std::isdigit(static_cast<unsigned char>(c)) || c == '-'))
            return false;
    return true;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw IoError("cannot read " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + p.string());
    out << bytes;
}

const std::map<std::string, Iri>& type_table() {
    static const std::map<std::string, Iri> table{{"dataset", vocab::ro_dataset},
                                                  {"paper", vocab::ro_paper},
                                                  {"software", vocab::ro_software}};
    return table;
}

std::optional<std::string> type_name(const std::set<Iri>& kinds) {
    for (const auto& [name, iri] : type_table())
        if (kinds.count(iri)) return name;
    return std::nullopt;
}

struct Session {
    const CliConfig& config;
    std::ostream& out;
    std::ostream& err;

    Iri base() const {
        if (const char* env = std::getenv("RO_BASE_IRI")) return Iri{env};
        return config.base_iri;
    }
    Iri ro_id(const std::string& name) const { return Iri{base().value + name + "/"}; }
    fs::path dir(const std::string& name) const { return config.store_root / name; }
    Timestamp now() const { return config.clock ? config.clock() : Timestamp::now(); }

    ResearchObject load(const std::string& name) const {
        if (!storage::exists(dir(name)))
            throw UserError("no research object named \"" + name + "\" in the store");
        return storage::load_research_object(dir(name), ro_id(name));
    }

    /// Mutations only land when the result still validates.
    void save_clean(const ResearchObject& ro, const std::string& name) const {
        auto violations = core::validate(ro);
        if (!violations.empty()) {
            std::string msg = "change rejected, research object would be invalid:";
            for (const auto& v : violations) msg += " " + v.code + "(" + v.subject.value + ")";
            throw UserError(msg);
        }
        storage::save_research_object(ro, dir(name));
    }

    evo::EvolutionStore versions(const std::string& name) const {
        evo::EvolutionStore store;
        storage::load_versions(dir(name), ro_id(name), store);
        return store;
    }
};

int run_init(const Session& s, const std::string& name, const std::string& creator) {
    if (!valid_name(name)) throw UserError("name must match [a-z0-9-]+: " + name);
    if (storage::exists(s.dir(name))) throw UserError("research object already exists: " + name);
    ResearchObject ro = ResearchObject::create(s.ro_id(name), Iri{creator}, s.now());
    storage::save_research_object(ro, s.dir(name));
    s.out << "created " << ro.id().value << "\n";
    return 0;
}

int run_add(const Session& s, const std::string& name, const std::vector<std::string>& paths,
            const std::string& type) {
    RoLock lock(s.dir(name));
    ResearchObject ro = s.load(name);
    std::set<Iri> kinds;
    if (!type.empty()) kinds.insert(type_table().at(type));
    for (const auto& path : paths) {
        fs::path p(path);
        std::string content = read_file(p);
        ro.aggregate(ro.resolve_ref(p.filename().string()), kinds, std::move(content));
    }
    s.save_clean(ro, name);
    s.out << "added " << paths.size() << " resource(s)\n";
    return 0;
}

int run_annotate(const Session& s, const std::string& name, const std::vector<std::string>& targets,
                 const std::string& body_file) {
    RoLock lock(s.dir(name));
    ResearchObject ro = s.load(name);
    rdf::Graph body = rdf::parse_turtle(read_file(body_file), ro.id());
    std::set<Iri> target_iris;
    for (const auto& t : targets) target_iris.insert(ro.resolve_ref(t));
    core::Annotation a = ro.annotate(std::move(target_iris), body, ro.creator(), s.now());
    s.save_clean(ro, name);
    s.out << "annotated: " << a.id.value << "\n";
    return 0;
}

int run_remove(const Session& s, const std::string& name, const std::string& ref) {
    RoLock lock(s.dir(name));
    ResearchObject ro = s.load(name);
    Iri target = ro.resolve_ref(ref);
    std::set<Iri> before;
    for (const auto& r : ro.aggregated())
        if (r.content) before.insert(r.ref);
    ro.deaggregate(target);
    s.save_clean(ro, name);
    // Clean up payload files of everything the removal cascaded over.
    for (const auto& gone : before) {
        if (!ro.find_resource(gone)) {
            std::error_code ec;
            fs::remove(s.dir(name) / ro.relative_path(gone), ec);
        }
    }
    s.out << "removed " << target.value << "\n";
    return 0;
}

int run_status(const Session& s, const std::string& name, bool as_json) {
    ResearchObject ro = s.load(name);
    auto violations = core::validate(ro);
    auto store = s.versions(name);
    std::size_t n_versions = store.versions_of(ro.id()).size();
    if (as_json) {
        json j;
        j["id"] = ro.id().value;
        j["resources"] = ro.aggregated().size();
        j["annotations"] = ro.annotations().size();
        j["versions"] = n_versions;
        j["violations"] = json::array();
        for (const auto& v : violations)
            j["violations"].push_back({{"code", v.code}, {"subject", v.subject.value},
                                       {"message", v.message}});
        s.out << j.dump(2) << "\n";
    } else {
        s.out << ro.id().value << "\n"
              << "  resources:   " << ro.aggregated().size() << "\n"
              << "  annotations: " << ro.annotations().size() << "\n"
              << "  versions:    " << n_versions << "\n";
        for (const auto& v : violations)
            s.out << "  violation: " << v.code << " " << v.subject.value << "\n";
    }
    return violations.empty() ? 0 : 65;
}

int run_list(const Session& s, const std::string& name) {
    ResearchObject ro = s.load(name);
    for (const auto& r : ro.aggregated()) {
        s.out << r.ref.value;
        if (auto t = type_name(r.kinds)) s.out << " [" << *t << "]";
        if (!r.content) s.out << " (external)";
        s.out << "\n";
    }
    for (const auto& a : ro.annotations()) {
        s.out << a.id.value << " annotates";
        for (const auto& t : a.targets) s.out << " " << t.value;
        s.out << "\n";
    }
    return 0;
}

int run_evaluate(const Session& s, const std::string& name, const std::string& checklist_file,
                 bool as_json) {
    ResearchObject ro = s.load(name);
    checklist::Checklist cl = checklist::parse_checklist(read_file(checklist_file));
    checklist::Report report = checklist::evaluate(ro, cl);
    s.out << (as_json ? report.to_json() : report.to_text());
    return report.exit_code();
}

int run_version(const Session& s, const std::string& name, bool archive) {
    RoLock lock(s.dir(name));
    ResearchObject ro = s.load(name);
    evo::EvolutionStore store = s.versions(name);
    evo::VersionRecord rec = archive ? evo::archive(ro, store, ro.creator(), s.now())
                                     : evo::snapshot(ro, store, ro.creator(), s.now());
    storage::save_version(store, rec.version_id, s.dir(name));
    s.out << (archive ? "archived " : "snapshotted ") << rec.version_id.value << "\n";
    return 0;
}

std::string change_kind_name(evo::ChangeKind kind) {
    switch (kind) {
        case evo::ChangeKind::Addition: return "addition";
        case evo::ChangeKind::Modification: return "modification";
        case evo::ChangeKind::Removal: return "removal";
    }
    return "?";
}

int run_diff(const Session& s, const std::string& name, const std::string& va,
             const std::string& vb, bool as_json) {
    evo::EvolutionStore store = s.versions(name);
    Iri id_a{s.ro_id(name).value + va + "/"};
    Iri id_b{s.ro_id(name).value + vb + "/"};
    for (const Iri* v : {&id_a, &id_b})
        if (!store.has_version(*v)) throw UserError("unknown version: " + v->value);
    evo::ChangeSpecification spec = evo::diff(store.stored_ro(id_a), store.stored_ro(id_b));
    if (as_json) {
        json j = json::array();
        for (const auto& c : spec.changes)
            j.push_back({{"kind", change_kind_name(c.kind)}, {"ref", c.ref.value}});
        s.out << j.dump(2) << "\n";
    } else {
        for (const auto& c : spec.changes)
            s.out << change_kind_name(c.kind) << " " << c.ref.value << "\n";
        s.out << spec.changes.size() << " change(s)\n";
    }
    return 0;
}

int run_history(const Session& s, const std::string& name) {
    evo::EvolutionStore store = s.versions(name);
    for (const auto& rec : evo::history(store, s.ro_id(name))) {
        s.out << rec.version_id.value << " "
              << (rec.kind == evo::VersionKind::Archived ? "archived" : "snapshot") << " "
              << rec.at.value;
        if (rec.change_spec) s.out << " (" << rec.change_spec->changes.size() << " changes)";
        s.out << "\n";
    }
    return 0;
}

int run_bundle(const Session& s, const std::string& name, const std::string& out_file) {
    ResearchObject ro = s.load(name);
    write_file(out_file, zip::write_zip(storage::bundle_entries(ro)));
    s.out << "bundled " << name << " -> " << out_file << "\n";
    return 0;
}

int run_push(const Session& s, const std::string& name) {
    if (!s.config.service_url) throw UserError("no service_url configured for push");
    ResearchObject ro = s.load(name);

    httplib::Client client(s.config.service_url->c_str());
    httplib::Headers auth;
    if (s.config.token) auth.emplace("Authorization", "Bearer " + *s.config.token);

    std::set<Iri> body_refs;
    for (const auto& a : ro.annotations()) body_refs.insert(a.body_ref);

    {
        httplib::Headers h = auth;
        h.emplace("Slug", name);
        h.emplace("RO-Creator", ro.creator().value);
        h.emplace("RO-Created", ro.created_at().value);
        auto res = client.Post("/", h, "", "text/plain");
        if (!res) throw IoError("cannot reach service at " + *s.config.service_url);
        if (res->status == 409) throw UserError("remote research object already exists: " + name);
        if (res->status != 201)
            throw UserError("create failed with status " + std::to_string(res->status));
    }

    for (const auto& r : ro.aggregated()) {
        if (body_refs.count(r.ref)) continue;  // pushed with its annotation
        if (!r.content) {
            s.err << "warning: external reference not pushed: " << r.ref.value << "\n";
            continue;
        }
        std::string path = "/ROs/" + name + "/" + ro.relative_path(r.ref);
        if (auto t = type_name(r.kinds)) path += "?type=" + *t;
        auto res = client.Put(path.c_str(), auth, *r.content, "application/octet-stream");
        if (!res || (res->status != 201 && res->status != 200))
            throw UserError("upload failed for " + r.ref.value);
    }

    for (const auto& a : ro.annotations()) {
        const core::AggregatedResource* body = ro.find_resource(a.body_ref);
        if (!body || !body->content) continue;
        httplib::Headers h = auth;
        for (const auto& t : a.targets)
            h.emplace("Link", "<" + t.value + ">; rel=\"annotates\"");
        h.emplace("RO-Creator", a.created_by.value);
        h.emplace("RO-Created", a.created_at.value);
        std::string path = "/ROs/" + name + "/" + ro.relative_path(a.body_ref);
        auto res = client.Put(path.c_str(), h, *body->content, "text/turtle");
        if (!res || (res->status != 201 && res->status != 200))
            throw UserError("annotation upload failed for " + a.id.value);
    }

    s.out << "pushed " << name << " to " << *s.config.service_url << "\n";
    return 0;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, const CliConfig& config, std::ostream& out,
             std::ostream& err) {
    Session s{config, out, err};
    int code = 0;

    CLI::App app{"research object manager"};
    app.name("ro");
    app.require_subcommand(1);

    std::string name, creator, type, ref, body_file, checklist_file, out_file, va, vb;
    std::vector<std::string> paths, targets;
    bool as_json = false;

    auto* init = app.add_subcommand("init", "create an empty research object");
    init->add_option("name", name)->required();
    init->add_option("--creator", creator)->required();
    init->callback([&] { code = run_init(s, name, creator); });

    auto* add = app.add_subcommand("add", "aggregate local files");
    add->add_option("name", name)->required();
    add->add_option("paths", paths)->required();
    add->add_option("--type", type)->check(CLI::IsMember({"dataset", "paper", "software"}));
    add->callback([&] { code = run_add(s, name, paths, type); });

    auto* annotate = app.add_subcommand("annotate", "attach an annotation body");
    annotate->add_option("name", name)->required();
    annotate->add_option("--target", targets)->required();
    annotate->add_option("--body", body_file)->required();
    annotate->callback([&] { code = run_annotate(s, name, targets, body_file); });

    auto* remove = app.add_subcommand("remove", "deaggregate a resource");
    remove->add_option("name", name)->required();
    remove->add_option("ref", ref)->required();
    remove->callback([&] { code = run_remove(s, name, ref); });

    auto* status = app.add_subcommand("status", "summary and validation state");
    status->add_option("name", name)->required();
    status->add_flag("--json", as_json);
    status->callback([&] { code = run_status(s, name, as_json); });

    auto* list = app.add_subcommand("list", "list resources and annotations");
    list->add_option("name", name)->required();
    list->callback([&] { code = run_list(s, name); });

    auto* evaluate = app.add_subcommand("evaluate", "run a checklist");
    evaluate->add_option("name", name)->required();
    evaluate->add_option("--checklist", checklist_file)->required();
    evaluate->add_flag("--json", as_json);
    evaluate->callback([&] { code = run_evaluate(s, name, checklist_file, as_json); });

    auto* snapshot = app.add_subcommand("snapshot", "freeze the current state");
    snapshot->add_option("name", name)->required();
    snapshot->callback([&] { code = run_version(s, name, false); });

    auto* archive = app.add_subcommand("archive", "freeze as a final version");
    archive->add_option("name", name)->required();
    archive->callback([&] { code = run_version(s, name, true); });

    auto* diff = app.add_subcommand("diff", "changes between two versions");
    diff->add_option("name", name)->required();
    diff->add_option("from", va)->required();
    diff->add_option("to", vb)->required();
    diff->add_flag("--json", as_json);
    diff->callback([&] { code = run_diff(s, name, va, vb, as_json); });

    auto* history = app.add_subcommand("history", "version chain");
    history->add_option("name", name)->required();
    history->callback([&] { code = run_history(s, name); });

    auto* bundle = app.add_subcommand("bundle", "zip the research object");
    bundle->add_option("name", name)->required();
    bundle->add_option("-o,--output", out_file)->required();
    bundle->callback([&] { code = run_bundle(s, name, out_file); });

    auto* push = app.add_subcommand("push", "upload to the configured service");
    push->add_option("name", name)->required();
    push->callback([&] { code = run_push(s, name); });

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        return 64;
    } catch (const IoError& e) {
        err << "error: " << e.what() << "\n";
        return 66;
    } catch (const storage::StorageError& e) {
        err << "error: " << e.what() << "\n";
        return 66;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return 66;
    } catch (const std::exception& e) {  // domain errors: RoError, ParseError, ...
        err << "error: " << e.what() << "\n";
        return 65;
    }
    return code;
}

}  // namespace ro::cli
