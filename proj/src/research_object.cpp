#include "ro/research_object.hpp"

#include <algorithm>

#include "ro/vocab.hpp"

namespace ro::core {

using rdf::BlankNode;
using rdf::Literal;
using rdf::Subject;
using rdf::Term;
namespace vocab = ro::vocab;

namespace {

std::string pad3(int n) {
    std::string s = std::to_string(n);
    while (s.size() < 3) s.insert(s.begin(), '0');
    return s;
}

Literal date_time(const Timestamp& t) { return Literal::typed(t.value, vocab::xsd_date_time); }

}  // namespace

ResearchObject ResearchObject::create(Iri id, Iri creator, Timestamp created_at) {
    if (!id.is_absolute() || id.value.empty() || id.value.back() != '/')
        throw RoError("research object id must be absolute and end with '/': " + id.value);
    ResearchObject ro;
    ro.id_ = std::move(id);
    ro.creator_ = std::move(creator);
    ro.created_ = std::move(created_at);
    return ro;
}

Iri ResearchObject::resolve_ref(const std::string& ref) const {
    Iri candidate{ref};
    if (candidate.is_absolute()) return candidate;
    return rdf::resolve_reference(ref, id_);
}

bool ResearchObject::is_internal(const Iri& ref) const {
    return ref.value.rfind(id_.value, 0) == 0;
}

std::string ResearchObject::relative_path(const Iri& ref) const {
    if (!is_internal(ref)) throw RoError("not an internal reference: " + ref.value);
    return ref.value.substr(id_.value.size());
}

const AggregatedResource* ResearchObject::find_resource(const Iri& ref) const {
    for (const auto& r : aggregated_)
        if (r.ref == ref) return &r;
    return nullptr;
}

const Annotation* ResearchObject::find_annotation(const Iri& id) const {
    for (const auto& a : annotations_)
        if (a.id == id) return &a;
    return nullptr;
}

void ResearchObject::aggregate(Iri ref, std::set<Iri> kinds, std::optional<std::string> content) {
    if (find_resource(ref)) throw RoError("already aggregated: " + ref.value);
    if (!is_internal(ref) && content) throw RoError("external reference cannot carry content: " + ref.value);
    kinds.insert(vocab::ro_resource);
    aggregated_.push_back({std::move(ref), std::move(kinds), std::move(content)});
}

void ResearchObject::deaggregate(const Iri& ref) {
    if (!find_resource(ref)) throw RoError("not aggregated: " + ref.value);
    // Worklist: dropping an annotation drops its body resource, which may
    // itself be another annotation's target.
    std::vector<Iri> queue{ref};
    while (!queue.empty()) {
        Iri cur = queue.back();
        queue.pop_back();
        auto it = std::find_if(aggregated_.begin(), aggregated_.end(),
                               [&](const AggregatedResource& r) { return r.ref == cur; });
        if (it == aggregated_.end()) continue;
        aggregated_.erase(it);
        for (auto a = annotations_.begin(); a != annotations_.end();) {
            a->targets.erase(cur);
            if (a->targets.empty() || a->body_ref == cur) {
                if (a->body_ref != cur) queue.push_back(a->body_ref);
                a = annotations_.erase(a);
            } else {
                ++a;
            }
        }
    }
}

Iri ResearchObject::next_annotation_id() const {
    return Iri{id_.value + ".ro/annotations/" + pad3(annotation_counter_ + 1)};
}

Annotation ResearchObject::annotate(std::set<Iri> targets, const Graph& body, Iri creator,
                                    Timestamp at) {
    if (targets.empty()) throw RoError("annotation requires at least one target");
    for (const auto& t : targets) {
        if (t != id_ && !find_resource(t)) throw RoError("annotation target not in RO: " + t.value);
    }
    ++annotation_counter_;
    std::string n = pad3(annotation_counter_);
    Annotation a;
    a.id = Iri{id_.value + ".ro/annotations/" + n};
    a.body_ref = Iri{id_.value + ".ro/annotations/" + n + ".ttl"};
    a.targets = std::move(targets);
    a.created_by = std::move(creator);
    a.created_at = std::move(at);
    aggregate(a.body_ref, {vocab::ro_annotation}, rdf::serialize_turtle(body, id_));
    annotations_.push_back(a);
    return a;
}

void ResearchObject::set_content(const Iri& ref, std::string content) {
    for (auto& r : aggregated_) {
        if (r.ref == ref) {
            if (!is_internal(ref)) throw RoError("external reference cannot carry content: " + ref.value);
            r.content = std::move(content);
            return;
        }
    }
    throw RoError("not aggregated: " + ref.value);
}

void ResearchObject::set_kinds(const Iri& ref, std::set<Iri> kinds) {
    for (auto& r : aggregated_) {
        if (r.ref == ref) {
            kinds.insert(vocab::ro_resource);
            r.kinds = std::move(kinds);
            return;
        }
    }
    throw RoError("not aggregated: " + ref.value);
}

void ResearchObject::restore_annotation(Annotation a, std::string body_bytes) {
    if (a.targets.empty()) throw RoError("annotation requires at least one target");
    if (find_annotation(a.id)) throw RoError("annotation id already present: " + a.id.value);
    if (!find_resource(a.body_ref))
        aggregate(a.body_ref, {vocab::ro_annotation}, std::move(body_bytes));
    // Keep the mint counter ahead of any restored id.
    const std::string& v = a.id.value;
    auto pos = v.find_last_of('/');
    if (pos != std::string::npos) {
        int n = std::atoi(v.substr(pos + 1).c_str());
        annotation_counter_ = std::max(annotation_counter_, n);
    }
    annotations_.push_back(std::move(a));
}

void ResearchObject::remove_annotation(const Iri& annotation_id) {
    auto it = std::find_if(annotations_.begin(), annotations_.end(),
                           [&](const Annotation& a) { return a.id == annotation_id; });
    if (it == annotations_.end()) throw RoError("no such annotation: " + annotation_id.value);
    Iri body = it->body_ref;
    annotations_.erase(it);
    auto b = std::find_if(aggregated_.begin(), aggregated_.end(),
                          [&](const AggregatedResource& r) { return r.ref == body; });
    if (b != aggregated_.end()) aggregated_.erase(b);
}

Graph ResearchObject::body_graph(const Annotation& a) const {
    const AggregatedResource* body = find_resource(a.body_ref);
    if (!body || !body->content) throw RoError("annotation body unavailable: " + a.body_ref.value);
    return rdf::parse_turtle(*body->content, id_);
}

Iri manifest_iri(const Iri& ro_id) { return Iri{ro_id.value + ".ro/manifest.ttl"}; }

Graph build_manifest(const ResearchObject& ro) {
    Graph g;
    g.set_prefix("ro", Iri{vocab::RO_NS});
    g.set_prefix("ore", Iri{vocab::ORE_NS});
    g.set_prefix("ao", Iri{vocab::AO_NS});
    g.set_prefix("dct", Iri{vocab::DCT_NS});
    g.set_prefix("xsd", Iri{vocab::XSD_NS});

    const Iri& id = ro.id();
    Iri m = manifest_iri(id);
    g.insert(id, vocab::rdf_type, vocab::ro_research_object);
    g.insert(id, vocab::rdf_type, vocab::ore_aggregation);
    g.insert(m, vocab::rdf_type, vocab::ro_manifest);
    g.insert(m, vocab::rdf_type, vocab::ore_resource_map);
    g.insert(m, vocab::ore_describes, id);
    g.insert(id, vocab::ore_is_described_by, m);
    g.insert(id, vocab::dct_created, date_time(ro.created_at()));
    g.insert(id, vocab::dct_creator, ro.creator());

    for (const auto& r : ro.aggregated()) {
        g.insert(id, vocab::ore_aggregates, r.ref);
        for (const auto& k : r.kinds) g.insert(r.ref, vocab::rdf_type, k);
    }
    for (const auto& a : ro.annotations()) {
        g.insert(a.id, vocab::rdf_type, vocab::ro_annotation);
        g.insert(a.id, vocab::rdf_type, vocab::ao_annotation);
        for (const auto& t : a.targets) g.insert(a.id, vocab::ao_annotates_resource, t);
        g.insert(a.id, vocab::ao_body, a.body_ref);
        g.insert(a.id, vocab::dct_creator, a.created_by);
        g.insert(a.id, vocab::dct_created, date_time(a.created_at));
    }
    return g;
}

ResearchObject load_research_object(const Graph& manifest, const PayloadResolver& payload) {
    auto ro_subjects =
        manifest.match(std::nullopt, Term{vocab::rdf_type}, Term{vocab::ro_research_object});
    if (ro_subjects.empty()) throw RoError("manifest contains no ro:ResearchObject subject");
    if (ro_subjects.size() > 1)
        throw RoError("manifest contains multiple ro:ResearchObject subjects");
    const auto* id_ptr = std::get_if<Iri>(&ro_subjects[0].subject);
    if (!id_ptr) throw RoError("research object subject must be an IRI");
    Iri id = *id_ptr;

    auto created_term = manifest.object_of(Subject{id}, vocab::dct_created);
    auto creator_term = manifest.object_of(Subject{id}, vocab::dct_creator);
    if (!created_term || !rdf::is_literal(*created_term))
        throw RoError("manifest missing dct:created literal");
    if (!creator_term || !rdf::is_iri(*creator_term))
        throw RoError("manifest missing dct:creator IRI");

    ResearchObject ro = ResearchObject::create(
        id, std::get<Iri>(*creator_term), Timestamp{std::get<Literal>(*created_term).lexical});

    for (const auto& t : manifest.match(Term{id}, Term{vocab::ore_aggregates}, std::nullopt)) {
        const auto* ref = std::get_if<Iri>(&t.object);
        if (!ref) throw RoError("ore:aggregates object must be an IRI");
        std::set<Iri> kinds;
        bool has_resource_kind = false;
        for (const auto& kt : manifest.match(Term{*ref}, Term{vocab::rdf_type}, std::nullopt)) {
            const auto* k = std::get_if<Iri>(&kt.object);
            if (!k) continue;
            kinds.insert(*k);
            if (*k == vocab::ro_resource) has_resource_kind = true;
        }
        if (!has_resource_kind)
            throw RoError("aggregated resource missing ro:Resource type: " + ref->value);
        std::optional<std::string> content;
        if (ro.is_internal(*ref)) content = payload(*ref);
        ro.aggregate(*ref, std::move(kinds), std::move(content));
    }

    for (const auto& t :
         manifest.match(std::nullopt, Term{vocab::ao_body}, std::nullopt)) {
        const auto* aid = std::get_if<Iri>(&t.subject);
        const auto* body = std::get_if<Iri>(&t.object);
        if (!aid || !body) throw RoError("annotation id and body must be IRIs");
        Annotation a;
        a.id = *aid;
        a.body_ref = *body;
        for (const auto& tt :
             manifest.match(Term{*aid}, Term{vocab::ao_annotates_resource}, std::nullopt)) {
            const auto* target = std::get_if<Iri>(&tt.object);
            if (!target) throw RoError("annotation target must be an IRI");
            if (*target != id && !ro.find_resource(*target))
                throw RoError("annotation " + aid->value + " targets non-aggregated resource " +
                              target->value);
            a.targets.insert(*target);
        }
        if (a.targets.empty()) throw RoError("annotation has no targets: " + aid->value);
        auto by = manifest.object_of(Subject{*aid}, vocab::dct_creator);
        auto at = manifest.object_of(Subject{*aid}, vocab::dct_created);
        if (by && rdf::is_iri(*by)) a.created_by = std::get<Iri>(*by);
        if (at && rdf::is_literal(*at)) a.created_at = Timestamp{std::get<Literal>(*at).lexical};
        if (!ro.find_resource(a.body_ref))
            throw RoError("annotation " + a.id.value + " body not aggregated: " + a.body_ref.value);
        std::string body_bytes;  // body resource is already aggregated above
        ro.restore_annotation(std::move(a), std::move(body_bytes));
    }
    return ro;
}

std::vector<Violation> validate(const ResearchObject& ro) {
    std::vector<Violation> out;
    const Iri& id = ro.id();
    if (!id.is_absolute() || id.value.empty() || id.value.back() != '/')
        out.push_back({"BAD_ID", id, "id must be absolute and end with '/'"});

    std::set<Iri> seen;
    for (const auto& r : ro.aggregated()) {
        if (!seen.insert(r.ref).second)
            out.push_back({"DUPLICATE_REF", r.ref, "resource aggregated more than once"});
        if (!ro.is_internal(r.ref) && r.content)
            out.push_back({"EXTERNAL_WITH_CONTENT", r.ref, "external reference carries content"});
        if (ro.is_internal(r.ref) && !r.content)
            out.push_back({"MISSING_CONTENT", r.ref, "internal resource has no content"});
    }
    for (const auto& a : ro.annotations()) {
        for (const auto& t : a.targets) {
            if (t != id && !ro.find_resource(t))
                out.push_back({"DANGLING_TARGET", a.id,
                               "annotation targets non-aggregated resource " + t.value});
        }
        const AggregatedResource* body = ro.find_resource(a.body_ref);
        if (!body || !body->content) {
            out.push_back({"UNPARSEABLE_BODY", a.id, "annotation body unavailable: " + a.body_ref.value});
        } else {
            try {
                rdf::parse_turtle(*body->content, id);
            } catch (const rdf::ParseError& e) {
                out.push_back({"UNPARSEABLE_BODY", a.id, e.what()});
            }
        }
    }
    return out;
}

bool structurally_equal(const ResearchObject& a, const ResearchObject& b) {
    if (a.id() != b.id() || a.creator() != b.creator() || a.created_at() != b.created_at())
        return false;
    if (a.aggregated().size() != b.aggregated().size()) return false;
    if (a.annotations().size() != b.annotations().size()) return false;

    std::set<Iri> body_refs;
    for (const auto& ann : a.annotations()) body_refs.insert(ann.body_ref);

    for (const auto& ra : a.aggregated()) {
        const AggregatedResource* rb = b.find_resource(ra.ref);
        if (!rb || ra.kinds != rb->kinds) return false;
        if (ra.content.has_value() != rb->content.has_value()) return false;
        if (!ra.content) continue;
        if (body_refs.count(ra.ref)) {
            // Annotation bodies compare up to graph isomorphism.
            try {
                if (!rdf::graph_isomorphic(rdf::parse_turtle(*ra.content, a.id()),
                                           rdf::parse_turtle(*rb->content, b.id())))
                    return false;
            } catch (const rdf::ParseError&) {
                if (*ra.content != *rb->content) return false;
            }
        } else if (*ra.content != *rb->content) {
            return false;
        }
    }
    for (const auto& aa : a.annotations()) {
        const Annotation* ab = b.find_annotation(aa.id);
        if (!ab || aa.targets != ab->targets || aa.body_ref != ab->body_ref ||
            aa.created_by != ab->created_by || aa.created_at != ab->created_at)
            return false;
    }
    return true;
}

Graph metadata_graph(const ResearchObject& ro) {
    Graph g = build_manifest(ro);
    for (const auto& a : ro.annotations()) {
        try {
            g = rdf::merge(g, ro.body_graph(a));
        } catch (const RoError&) {
        } catch (const rdf::ParseError&) {
        }
    }
    return g;
}

}  // namespace ro::core
