#include "ro/storage.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace ro::storage {

namespace fs = std::filesystem;
using core::PayloadResolver;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw StorageError("cannot read " + p.string());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void write_file(const fs::path& p, const std::string& bytes) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + p.string());
    out << bytes;
    if (!out) throw StorageError("short write to " + p.string());
}

void write_file_atomic(const fs::path& p, const std::string& bytes) {
    fs::path tmp = p;
    tmp += ".tmp";
    write_file(tmp, bytes);
    fs::rename(tmp, p);
}

PayloadResolver disk_resolver(const fs::path& dir, const Iri& id) {
    return [dir, id](const Iri& ref) -> std::optional<std::string> {
        if (ref.value.rfind(id.value, 0) != 0) return std::nullopt;
        fs::path p = dir / ref.value.substr(id.value.size());
        if (!fs::is_regular_file(p)) return std::nullopt;
        return read_file(p);
    };
}

bool is_version_dir_name(const std::string& name) {
    return name.size() == 4 && name[0] == 'v' && std::isdigit(name[1]) &&
           std::isdigit(name[2]) && std::isdigit(name[3]);
}

}  // namespace

void save_research_object(const ResearchObject& ro, const fs::path& dir) {
    fs::create_directories(dir / ".ro");
    for (const auto& r : ro.aggregated()) {
        if (r.content) write_file(dir / ro.relative_path(r.ref), *r.content);
    }
    write_file_atomic(dir / ".ro" / "manifest.ttl",
                      rdf::serialize_turtle(core::build_manifest(ro), ro.id()));
}

ResearchObject load_research_object(const fs::path& dir, const Iri& id) {
    fs::path manifest_path = dir / ".ro" / "manifest.ttl";
    if (!fs::is_regular_file(manifest_path))
        throw StorageError("no research object at " + dir.string());
    rdf::Graph manifest = rdf::parse_turtle(read_file(manifest_path), id);
    return core::load_research_object(manifest, disk_resolver(dir, id));
}

bool exists(const fs::path& dir) { return fs::is_regular_file(dir / ".ro" / "manifest.ttl"); }

void save_version(const evo::EvolutionStore& store, const Iri& version_id,
                  const fs::path& live_dir) {
    const evo::VersionRecord& rec = store.record(version_id);
    if (version_id.value.rfind(rec.of_live.value, 0) != 0)
        throw StorageError("version id not under its live id: " + version_id.value);
    std::string leaf = version_id.value.substr(rec.of_live.value.size());
    if (!leaf.empty() && leaf.back() == '/') leaf.pop_back();
    fs::path dir = live_dir / leaf;

    save_research_object(store.stored_ro(version_id), dir);
    write_file_atomic(dir / ".ro" / "evolution.ttl",
                      rdf::serialize_turtle(evo::emit_evolution_graph(store, version_id)));

    json rec_json;
    rec_json["kind"] = rec.kind == evo::VersionKind::Archived ? "Archived" : "Snapshot";
    rec_json["of_live"] = rec.of_live.value;
    if (rec.derived_from) rec_json["derived_from"] = rec.derived_from->value;
    rec_json["at"] = rec.at.value;
    rec_json["by"] = rec.by.value;
    write_file_atomic(dir / ".ro" / "version.json", rec_json.dump(2) + "\n");
}

void load_version(const fs::path& live_dir, const std::string& leaf, const Iri& live_id,
                  evo::EvolutionStore& store) {
    Iri version_id{live_id.value + leaf + "/"};
    fs::path dir = live_dir / leaf;
    // Frozen copies keep the live identifier; the version id lives in the
    // record only.
    ResearchObject frozen = load_research_object(dir, live_id);

    json rec_json = json::parse(read_file(dir / ".ro" / "version.json"));
    evo::VersionRecord rec;
    rec.version_id = version_id;
    rec.kind = rec_json.at("kind") == "Archived" ? evo::VersionKind::Archived
                                                 : evo::VersionKind::Snapshot;
    rec.of_live = Iri{rec_json.at("of_live").get<std::string>()};
    if (rec_json.contains("derived_from"))
        rec.derived_from = Iri{rec_json["derived_from"].get<std::string>()};
    rec.at = core::Timestamp{rec_json.at("at").get<std::string>()};
    rec.by = Iri{rec_json.at("by").get<std::string>()};
    if (rec.derived_from) {
        evo::ChangeSpecification cs = evo::diff(store.stored_ro(*rec.derived_from), frozen);
        cs.id = Iri{version_id.value + "changes/"};
        rec.change_spec = std::move(cs);
    }
    evo::restore_version(store, std::move(frozen), std::move(rec));
}

void load_versions(const fs::path& live_dir, const Iri& live_id, evo::EvolutionStore& store) {
    std::vector<std::string> names;
    if (fs::is_directory(live_dir)) {
        for (const auto& entry : fs::directory_iterator(live_dir)) {
            if (entry.is_directory() && is_version_dir_name(entry.path().filename().string()))
                names.push_back(entry.path().filename().string());
        }
    }
    std::sort(names.begin(), names.end());
    for (const auto& name : names) load_version(live_dir, name, live_id, store);
}

std::vector<std::pair<std::string, std::string>> bundle_entries(const ResearchObject& ro) {
    std::vector<std::pair<std::string, std::string>> entries;
    entries.emplace_back(".ro/manifest.ttl",
                         rdf::serialize_turtle(core::build_manifest(ro), ro.id()));
    std::vector<const core::AggregatedResource*> internal;
    for (const auto& r : ro.aggregated())
        if (r.content) internal.push_back(&r);
    std::sort(internal.begin(), internal.end(),
              [](const auto* a, const auto* b) { return a->ref < b->ref; });
    for (const auto* r : internal) entries.emplace_back(ro.relative_path(r->ref), *r->content);
    return entries;
}

ResearchObject from_bundle_entries(const std::vector<std::pair<std::string, std::string>>& entries,
                                   const Iri& id) {
    std::map<std::string, std::string> files(entries.begin(), entries.end());
    auto manifest_it = files.find(".ro/manifest.ttl");
    if (manifest_it == files.end())
        throw StorageError("bundle has no .ro/manifest.ttl entry");
    rdf::Graph manifest = rdf::parse_turtle(manifest_it->second, id);
    return core::load_research_object(manifest, [&](const Iri& ref) -> std::optional<std::string> {
        if (ref.value.rfind(id.value, 0) != 0) return std::nullopt;
        auto it = files.find(ref.value.substr(id.value.size()));
        if (it == files.end()) return std::nullopt;
        return it->second;
    });
}

}  // namespace ro::storage
