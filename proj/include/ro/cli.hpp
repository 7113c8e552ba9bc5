#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ro/rdf.hpp"
#include "ro/timestamp.hpp"

namespace ro::cli {

struct CliConfig {
    std::filesystem::path store_root;
    rdf::Iri base_iri;  // absolute prefix for minted RO ids, ends with '/'
    std::optional<std::string> service_url;
    std::optional<std::string> token;
    /// Injectable clock; defaults to the wall clock when unset.
    std::function<core::Timestamp()> clock;
};

/// Exit codes: 0 success (and FULLY_SATISFIED for evaluate), 1/2 evaluate
/// verdicts, 64 usage/unknown subcommand, 65 validation failure, 66 I/O
/// failure.
int dispatch(const std::vector<std::string>& args, const CliConfig& config, std::ostream& out,
             std::ostream& err);

}  // namespace ro::cli
