#pragma once

#include <string>

#include "ro/rdf.hpp"

namespace ro::core {

// Stable machine codes:
//   DUPLICATE_REF, DANGLING_TARGET, MISSING_CONTENT, BAD_ID,
//   UNPARSEABLE_BODY, EXTERNAL_WITH_CONTENT          (research objects)
//   CYCLE, UNRESOLVED_ENDPOINT, MULTIPLE_SOURCES, SELF_LINK,
//   DUPLICATE_PROCESS, DUPLICATE_PARAMETER           (workflows)
//   FOREIGN_PROCESS, UNWITNESSED_LINK, ORDER_VIOLATION, BAD_USAGE (runs)
struct Violation {
    std::string code;
    rdf::Iri subject;
    std::string message;
};

}  // namespace ro::core
