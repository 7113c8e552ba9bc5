#pragma once

#include <filesystem>
#include <string>

#include "ro/evolution.hpp"
#include "ro/research_object.hpp"

namespace ro::storage {

using core::ResearchObject;
using rdf::Iri;

struct StorageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// On-disk layout, one directory per research object:
///   <dir>/<relative ref>            payload of each internal resource
///   <dir>/.ro/manifest.ttl          serialized manifest (written atomically)
///   <dir>/vNNN/...                  one frozen copy per version, same layout,
///                                   plus .ro/version.json and .ro/evolution.ttl

/// Write payloads and manifest. The manifest is written via a temp file and
/// rename, so a crash never leaves a partial manifest behind.
void save_research_object(const ResearchObject& ro, const std::filesystem::path& dir);

/// Load the RO stored at dir; `id` is the RO identifier the manifest was
/// serialized against.
ResearchObject load_research_object(const std::filesystem::path& dir, const Iri& id);

bool exists(const std::filesystem::path& dir);

/// Persist one version of the store under live_dir (vNNN subdirectory).
void save_version(const evo::EvolutionStore& store, const Iri& version_id,
                  const std::filesystem::path& live_dir);

/// Restore the single version stored at live_dir/<leaf> (e.g. "v001"),
/// recomputing its change specification against the chain already in store.
void load_version(const std::filesystem::path& live_dir, const std::string& leaf,
                  const Iri& live_id, evo::EvolutionStore& store);

/// Restore every vNNN directory under live_dir into the store, recomputing
/// change specifications along the chain.
void load_versions(const std::filesystem::path& live_dir, const Iri& live_id,
                   evo::EvolutionStore& store);

/// The bundle entry list for an RO: `.ro/manifest.ttl` plus every internal
/// payload at its relative path, deterministic order.
std::vector<std::pair<std::string, std::string>> bundle_entries(const ResearchObject& ro);

/// Rebuild an RO from bundle entries (inverse of bundle_entries).
ResearchObject from_bundle_entries(const std::vector<std::pair<std::string, std::string>>& entries,
                                   const Iri& id);

}  // namespace ro::storage
