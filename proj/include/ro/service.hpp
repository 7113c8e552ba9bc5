#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ro/timestamp.hpp"

namespace ro::service {

struct ServiceConfig {
    std::filesystem::path store_root;
    /// Absolute URL the service is reachable at, used to mint RO ids as
    /// <base_url>/ROs/<name>/ .
    std::string base_url;
    /// Bearer token required for mutations when set; reads stay open.
    std::optional<std::string> token;
    /// Injectable clock; defaults to the wall clock when unset.
    std::function<core::Timestamp()> clock;
};

/// RODL-lite HTTP service. State is rebuilt at construction by replaying
/// <store_root>/journal.log against the on-disk payload blobs, so a crash
/// after any journal prefix recovers exactly that prefix's state.
///
/// Routes:
///   POST /                         create RO (Slug, RO-Creator, RO-Created)
///   GET  /ROs/<name>/              manifest, Turtle or JSON per Accept
///   GET  /ROs/<name>/vNNN/         version manifest (immutable)
///   GET  /ROs/<name>/<path>        payload bytes (also under vNNN/)
///   PUT  /ROs/<name>/<path>        add/overwrite resource (?type=...), or
///                                  attach an annotation when a
///                                  Link: <target>; rel="annotates" header
///                                  is present
///   DELETE /ROs/<name>/<path>      deaggregate
///   POST /ROs/<name>/evolution?target=snapshot|archive
///   GET  /ROs/<name>/evolution     union of the versions' evolution graphs
///   GET  /notifications[?ro=&since=]   Atom feed, newest first
///   GET  /query?s=&p=&o=           triple pattern over every stored graph
class Service {
public:
    explicit Service(ServiceConfig config);
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// Bind and serve on a background thread; port 0 picks a free port.
    void start(const std::string& host = "127.0.0.1", int port = 0);
    void stop();
    int port() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ro::service
