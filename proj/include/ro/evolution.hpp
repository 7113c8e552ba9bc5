#pragma once

#include <map>
#include <optional>
#include <vector>

#include "ro/research_object.hpp"

namespace ro::evo {

using core::ResearchObject;
using core::Timestamp;
using rdf::Graph;
using rdf::Iri;

enum class VersionKind { Live, Snapshot, Archived };
enum class ChangeKind { Addition, Modification, Removal };

/// One unit change. The before/after digests identify the touched state
/// (content bytes plus kinds for resources, record plus body for
/// annotations); the after_* payloads let a patch rebuild the target side.
struct Change {
    ChangeKind kind;
    Iri ref;
    std::optional<std::string> before_digest;
    std::optional<std::string> after_digest;
    bool is_annotation = false;
    std::optional<std::set<Iri>> after_kinds;
    std::optional<core::Annotation> after_annotation;
};

struct ChangeSpecification {
    Iri id;
    std::vector<Change> changes;
};

struct VersionRecord {
    Iri version_id;
    VersionKind kind = VersionKind::Snapshot;
    Iri of_live;
    std::optional<Iri> derived_from;
    Timestamp at;
    Iri by;
    std::optional<ChangeSpecification> change_spec;
};

/// Frozen copies of snapshotted/archived ROs keyed by version id.
/// Stored copies are only handed out by const reference.
class EvolutionStore {
public:
    const ResearchObject& stored_ro(const Iri& version_id) const;
    const VersionRecord& record(const Iri& version_id) const;
    bool has_version(const Iri& version_id) const { return entries_.count(version_id) > 0; }
    const std::vector<Iri>& versions_of(const Iri& live_id) const;
    std::size_t size() const { return entries_.size(); }

private:
    struct Entry {
        ResearchObject frozen;
        VersionRecord rec;
    };
    std::map<Iri, Entry> entries_;
    std::map<Iri, std::vector<Iri>> by_live_;

    friend VersionRecord snapshot(const ResearchObject&, EvolutionStore&, const Iri&,
                                  const Timestamp&);
    friend VersionRecord archive(const ResearchObject&, EvolutionStore&, const Iri&,
                                 const Timestamp&);
    friend void restore_version(EvolutionStore&, ResearchObject, VersionRecord);
};

VersionRecord snapshot(const ResearchObject& live, EvolutionStore& store, const Iri& agent,
                       const Timestamp& at);
VersionRecord archive(const ResearchObject& live, EvolutionStore& store, const Iri& agent,
                      const Timestamp& at);

/// Re-insert a previously persisted version (used by disk loaders). The
/// caller supplies the full record; versions of one live RO must be
/// restored in chain order.
void restore_version(EvolutionStore& store, ResearchObject frozen, VersionRecord rec);

ChangeSpecification diff(const ResearchObject& old_ro, const ResearchObject& new_ro);

ResearchObject apply_changes(const ResearchObject& base, const ChangeSpecification& spec,
                             const core::PayloadResolver& payload);

std::vector<VersionRecord> history(const EvolutionStore& store, const Iri& live_id);

Graph emit_evolution_graph(const EvolutionStore& store, const Iri& version_id);

}  // namespace ro::evo
