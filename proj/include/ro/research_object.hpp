#pragma once

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ro/rdf.hpp"
#include "ro/timestamp.hpp"
#include "ro/violation.hpp"

namespace ro::core {

using rdf::Graph;
using rdf::Iri;

struct RoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A resource listed by the aggregation. Internal resources (refs under the
/// RO id) may carry a byte payload; external references never do.
struct AggregatedResource {
    Iri ref;
    std::set<Iri> kinds;
    std::optional<std::string> content;
};

struct Annotation {
    Iri id;
    std::set<Iri> targets;
    Iri body_ref;
    Iri created_by;
    Timestamp created_at;
};

using PayloadResolver = std::function<std::optional<std::string>(const Iri&)>;

class ResearchObject {
public:
    static ResearchObject create(Iri id, Iri creator, Timestamp created_at);

    const Iri& id() const { return id_; }
    const Iri& creator() const { return creator_; }
    const Timestamp& created_at() const { return created_; }
    const std::vector<AggregatedResource>& aggregated() const { return aggregated_; }
    const std::vector<Annotation>& annotations() const { return annotations_; }

    /// Resolve a possibly-relative reference against the RO id.
    Iri resolve_ref(const std::string& ref) const;

    bool is_internal(const Iri& ref) const;
    /// Path of an internal ref relative to the RO root.
    std::string relative_path(const Iri& ref) const;

    const AggregatedResource* find_resource(const Iri& ref) const;
    const Annotation* find_annotation(const Iri& id) const;

    void aggregate(Iri ref, std::set<Iri> kinds, std::optional<std::string> content);
    void deaggregate(const Iri& ref);
    Annotation annotate(std::set<Iri> targets, const Graph& body, Iri creator, Timestamp at);

    /// Replace the payload of an existing internal resource.
    void set_content(const Iri& ref, std::string content);
    void set_kinds(const Iri& ref, std::set<Iri> kinds);

    /// Re-attach a fully specified annotation (used by loaders and patching);
    /// aggregates the body resource with the given serialized bytes.
    void restore_annotation(Annotation a, std::string body_bytes);
    void remove_annotation(const Iri& annotation_id);

    /// The annotation's body parsed against the RO id.
    Graph body_graph(const Annotation& a) const;

    Iri next_annotation_id() const;

private:
    Iri id_;
    Iri creator_;
    Timestamp created_;
    std::vector<AggregatedResource> aggregated_;
    std::vector<Annotation> annotations_;
    int annotation_counter_ = 0;

    friend ResearchObject load_research_object(const Graph&, const PayloadResolver&);
};

Graph build_manifest(const ResearchObject& ro);
Iri manifest_iri(const Iri& ro_id);

ResearchObject load_research_object(const Graph& manifest, const PayloadResolver& payload);

std::vector<Violation> validate(const ResearchObject& ro);

/// Field-by-field equality; annotation bodies compared by graph isomorphism.
bool structurally_equal(const ResearchObject& a, const ResearchObject& b);

/// Manifest merged with every parseable annotation body (the checklist's
/// evaluation graph).
Graph metadata_graph(const ResearchObject& ro);

}  // namespace ro::core
