#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "ro/cli.hpp"

// Configuration comes from the environment:
//   RO_STORE_ROOT   directory holding one subdirectory per research object
//                   (default: current directory)
//   RO_BASE_IRI     absolute IRI prefix for minted RO ids
//   RO_SERVICE_URL  push target (e.g. http://127.0.0.1:8080)
//   RO_TOKEN        bearer token for the service
//   RO_FIXED_TIME   fixed timestamp (YYYY-MM-DDTHH:MM:SSZ) for reproducible
//                   manifests; wall clock when unset

int main(int argc, char** argv) {
    ro::cli::CliConfig config;
    const char* root = std::getenv("RO_STORE_ROOT");
    config.store_root = root ? root : ".";
    const char* base = std::getenv("RO_BASE_IRI");
    config.base_iri = ro::rdf::Iri{base ? base : "http://example.org/ROs/"};
    if (const char* url = std::getenv("RO_SERVICE_URL")) config.service_url = url;
    if (const char* token = std::getenv("RO_TOKEN")) config.token = token;
    if (const char* fixed = std::getenv("RO_FIXED_TIME")) {
        ro::core::Timestamp at{fixed};
        config.clock = [at] { return at; };
    }

    std::vector<std::string> args(argv + 1, argv + argc);
    return ro::cli::dispatch(args, config, std::cout, std::cerr);
}
