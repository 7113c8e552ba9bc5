#include "ro/evolution.hpp"

#include <algorithm>

#include "ro/digest.hpp"
#include "ro/vocab.hpp"

namespace ro::evo {

using core::AggregatedResource;
using core::Annotation;
using core::RoError;
using rdf::Literal;
namespace vocab = ro::vocab;

namespace {

std::string pad3(int n) {
    std::string s = std::to_string(n);
    while (s.size() < 3) s.insert(s.begin(), '0');
    return s;
}

std::string resource_digest(const AggregatedResource& r) {
    std::string material = r.content.value_or("");
    material += '\n';
    for (const auto& k : r.kinds) material += k.value + ";";
    return digest::sha256_hex(material);
}

std::string annotation_digest(const ResearchObject& ro, const Annotation& a) {
    std::string material;
    for (const auto& t : a.targets) material += t.value + ";";
    material += "\n" + a.created_by.value + "\n" + a.created_at.value + "\n";
    const AggregatedResource* body = ro.find_resource(a.body_ref);
    if (body && body->content) {
        // Canonical form so equivalent bodies hash equal.
        try {
            material += rdf::serialize_turtle(rdf::parse_turtle(*body->content, ro.id()));
        } catch (const rdf::ParseError&) {
            material += *body->content;
        }
    }
    return digest::sha256_hex(material);
}

std::set<Iri> body_refs_of(const ResearchObject& ro) {
    std::set<Iri> out;
    for (const auto& a : ro.annotations()) out.insert(a.body_ref);
    return out;
}

bool annotations_equal(const ResearchObject& ra, const Annotation& a, const ResearchObject& rb,
                       const Annotation& b) {
    if (a.targets != b.targets || a.created_by != b.created_by || a.created_at != b.created_at ||
        a.body_ref != b.body_ref)
        return false;
    try {
        return rdf::graph_isomorphic(ra.body_graph(a), rb.body_graph(b));
    } catch (const RoError&) {
        return false;
    } catch (const rdf::ParseError&) {
        const auto* ba = ra.find_resource(a.body_ref);
        const auto* bb = rb.find_resource(b.body_ref);
        return ba && bb && ba->content == bb->content;
    }
}

VersionRecord store_version(const ResearchObject& live, EvolutionStore& store, const Iri& agent,
                            const Timestamp& at, VersionKind kind);

}  // namespace

const ResearchObject& EvolutionStore::stored_ro(const Iri& version_id) const {
    auto it = entries_.find(version_id);
    if (it == entries_.end()) throw RoError("unknown version: " + version_id.value);
    return it->second.frozen;
}

const VersionRecord& EvolutionStore::record(const Iri& version_id) const {
    auto it = entries_.find(version_id);
    if (it == entries_.end()) throw RoError("unknown version: " + version_id.value);
    return it->second.rec;
}

const std::vector<Iri>& EvolutionStore::versions_of(const Iri& live_id) const {
    static const std::vector<Iri> none;
    auto it = by_live_.find(live_id);
    return it == by_live_.end() ? none : it->second;
}

ChangeSpecification diff(const ResearchObject& old_ro, const ResearchObject& new_ro) {
    ChangeSpecification spec;

    // Annotations first, compared by id; their body resources are covered
    // here and excluded from the resource pass.
    std::set<Iri> old_bodies = body_refs_of(old_ro);
    std::set<Iri> new_bodies = body_refs_of(new_ro);

    std::set<Iri> annotation_ids;
    for (const auto& a : old_ro.annotations()) annotation_ids.insert(a.id);
    for (const auto& a : new_ro.annotations()) annotation_ids.insert(a.id);
    for (const auto& id : annotation_ids) {
        const Annotation* oa = old_ro.find_annotation(id);
        const Annotation* na = new_ro.find_annotation(id);
        Change c;
        c.ref = id;
        c.is_annotation = true;
        if (oa && !na) {
            c.kind = ChangeKind::Removal;
            c.before_digest = annotation_digest(old_ro, *oa);
        } else if (!oa && na) {
            c.kind = ChangeKind::Addition;
            c.after_digest = annotation_digest(new_ro, *na);
            c.after_annotation = *na;
        } else if (!annotations_equal(old_ro, *oa, new_ro, *na)) {
            c.kind = ChangeKind::Modification;
            c.before_digest = annotation_digest(old_ro, *oa);
            c.after_digest = annotation_digest(new_ro, *na);
            c.after_annotation = *na;
        } else {
            continue;
        }
        spec.changes.push_back(std::move(c));
    }

    std::set<Iri> refs;
    for (const auto& r : old_ro.aggregated())
        if (!old_bodies.count(r.ref)) refs.insert(r.ref);
    for (const auto& r : new_ro.aggregated())
        if (!new_bodies.count(r.ref)) refs.insert(r.ref);
    for (const auto& ref : refs) {
        const AggregatedResource* o = old_ro.find_resource(ref);
        const AggregatedResource* n = new_ro.find_resource(ref);
        if (o && old_bodies.count(ref)) o = nullptr;
        if (n && new_bodies.count(ref)) n = nullptr;
        Change c;
        c.ref = ref;
        if (o && !n) {
            c.kind = ChangeKind::Removal;
            c.before_digest = resource_digest(*o);
        } else if (!o && n) {
            c.kind = ChangeKind::Addition;
            c.after_digest = resource_digest(*n);
            c.after_kinds = n->kinds;
        } else if (o && n) {
            std::string od = resource_digest(*o);
            std::string nd = resource_digest(*n);
            if (od == nd) continue;
            c.kind = ChangeKind::Modification;
            c.before_digest = od;
            c.after_digest = nd;
            c.after_kinds = n->kinds;
        } else {
            continue;
        }
        spec.changes.push_back(std::move(c));
    }
    return spec;
}

ResearchObject apply_changes(const ResearchObject& base, const ChangeSpecification& spec,
                             const core::PayloadResolver& payload) {
    ResearchObject out = base;

    auto check_before = [&](const Change& c, const std::string& actual) {
        if (!c.before_digest || *c.before_digest != actual)
            throw RoError("digest mismatch applying change to " + c.ref.value);
    };

    // Phase order keeps annotation targets valid throughout.
    for (const auto& c : spec.changes) {
        if (c.is_annotation && c.kind != ChangeKind::Addition) {
            const Annotation* a = out.find_annotation(c.ref);
            if (!a) throw RoError("change removes unknown annotation: " + c.ref.value);
            check_before(c, annotation_digest(out, *a));
            out.remove_annotation(c.ref);
        }
    }
    for (const auto& c : spec.changes) {
        if (c.is_annotation) continue;
        if (c.kind == ChangeKind::Removal) {
            const AggregatedResource* r = out.find_resource(c.ref);
            if (!r) throw RoError("change removes unknown resource: " + c.ref.value);
            check_before(c, resource_digest(*r));
            out.deaggregate(c.ref);
        }
    }
    for (const auto& c : spec.changes) {
        if (c.is_annotation || c.kind != ChangeKind::Addition) continue;
        std::optional<std::string> content;
        if (out.is_internal(c.ref)) content = payload(c.ref);
        out.aggregate(c.ref, c.after_kinds.value_or(std::set<Iri>{}), std::move(content));
    }
    for (const auto& c : spec.changes) {
        if (c.is_annotation || c.kind != ChangeKind::Modification) continue;
        const AggregatedResource* r = out.find_resource(c.ref);
        if (!r) throw RoError("change modifies unknown resource: " + c.ref.value);
        check_before(c, resource_digest(*r));
        if (out.is_internal(c.ref)) {
            auto bytes = payload(c.ref);
            if (!bytes) throw RoError("no payload for modified resource: " + c.ref.value);
            out.set_content(c.ref, *bytes);
        }
        if (c.after_kinds) out.set_kinds(c.ref, *c.after_kinds);
    }
    for (const auto& c : spec.changes) {
        if (!c.is_annotation || c.kind == ChangeKind::Removal) continue;
        if (!c.after_annotation) throw RoError("annotation change lacks record: " + c.ref.value);
        auto bytes = payload(c.after_annotation->body_ref);
        if (!bytes) throw RoError("no payload for annotation body: " + c.after_annotation->body_ref.value);
        out.restore_annotation(*c.after_annotation, *bytes);
    }
    return out;
}

namespace {

VersionRecord store_version(const ResearchObject& live, EvolutionStore& store, const Iri& agent,
                            const Timestamp& at, VersionKind kind) {
    auto violations = core::validate(live);
    if (!violations.empty()) {
        std::string msg = "cannot version an invalid research object:";
        for (const auto& v : violations) msg += " " + v.code;
        throw RoError(msg);
    }
    const auto& chain = store.versions_of(live.id());
    VersionRecord rec;
    rec.kind = kind;
    rec.of_live = live.id();
    rec.version_id = Iri{live.id().value + "v" + pad3(static_cast<int>(chain.size()) + 1) + "/"};
    rec.at = at;
    rec.by = agent;
    if (!chain.empty()) {
        rec.derived_from = chain.back();
        ChangeSpecification cs = diff(store.stored_ro(chain.back()), live);
        cs.id = Iri{rec.version_id.value + "changes/"};
        rec.change_spec = std::move(cs);
    }
    return rec;
}

}  // namespace

VersionRecord snapshot(const ResearchObject& live, EvolutionStore& store, const Iri& agent,
                       const Timestamp& at) {
    VersionRecord rec = store_version(live, store, agent, at, VersionKind::Snapshot);
    store.entries_.emplace(rec.version_id, EvolutionStore::Entry{live, rec});
    store.by_live_[live.id()].push_back(rec.version_id);
    return rec;
}

VersionRecord archive(const ResearchObject& live, EvolutionStore& store, const Iri& agent,
                      const Timestamp& at) {
    VersionRecord rec = store_version(live, store, agent, at, VersionKind::Archived);
    store.entries_.emplace(rec.version_id, EvolutionStore::Entry{live, rec});
    store.by_live_[live.id()].push_back(rec.version_id);
    return rec;
}

void restore_version(EvolutionStore& store, ResearchObject frozen, VersionRecord rec) {
    if (store.has_version(rec.version_id))
        throw RoError("version already present: " + rec.version_id.value);
    const auto& chain = store.versions_of(rec.of_live);
    if (rec.derived_from && (chain.empty() || chain.back() != *rec.derived_from))
        throw RoError("versions must be restored in chain order: " + rec.version_id.value);
    Iri version_id = rec.version_id;
    Iri of_live = rec.of_live;
    store.entries_.emplace(version_id, EvolutionStore::Entry{std::move(frozen), std::move(rec)});
    store.by_live_[of_live].push_back(version_id);
}

std::vector<VersionRecord> history(const EvolutionStore& store, const Iri& live_id) {
    std::vector<VersionRecord> out;
    for (const auto& v : store.versions_of(live_id)) out.push_back(store.record(v));
    return out;
}

Graph emit_evolution_graph(const EvolutionStore& store, const Iri& version_id) {
    const VersionRecord& rec = store.record(version_id);
    Graph g;
    g.set_prefix("roevo", Iri{vocab::ROEVO_NS});
    g.set_prefix("prov", Iri{vocab::PROV_NS});
    g.set_prefix("xsd", Iri{vocab::XSD_NS});

    const Iri& v = rec.version_id;
    g.insert(v, vocab::rdf_type,
             rec.kind == VersionKind::Archived ? vocab::roevo_archived_ro : vocab::roevo_snapshot_ro);
    g.insert(v, vocab::rdf_type, vocab::roevo_versionable_resource);
    g.insert(v, vocab::rdf_type, vocab::prov_entity);

    if (rec.derived_from) {
        g.insert(v, vocab::prov_was_revision_of, *rec.derived_from);
        const ChangeSpecification& cs = *rec.change_spec;
        g.insert(v, vocab::prov_was_generated_by, cs.id);
        g.insert(cs.id, vocab::rdf_type, vocab::roevo_change_specification);
        g.insert(cs.id, vocab::rdf_type, vocab::prov_activity);
        g.insert(cs.id, vocab::prov_used, *rec.derived_from);
        g.insert(cs.id, vocab::prov_was_associated_with, rec.by);
        Literal at = Literal::typed(rec.at.value, vocab::xsd_date_time);
        g.insert(cs.id, vocab::prov_started_at_time, at);
        g.insert(cs.id, vocab::prov_ended_at_time, at);
        int i = 0;
        for (const auto& c : cs.changes) {
            Iri cid{cs.id.value + std::to_string(++i)};
            g.insert(cs.id, vocab::roevo_has_change, cid);
            const Iri& kind_iri = c.kind == ChangeKind::Addition ? vocab::roevo_addition
                                  : c.kind == ChangeKind::Removal ? vocab::roevo_removal
                                                                  : vocab::roevo_modification;
            g.insert(cid, vocab::rdf_type, kind_iri);
            g.insert(cid, vocab::roevo_related_resource, c.ref);
        }
    }
    return g;
}

}  // namespace ro::evo
