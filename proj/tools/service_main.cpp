#include <chrono>
#include <cstdlib>
#include <iostream>
#include <string>
#include <thread>

#include "ro/service.hpp"

// Configuration comes from the environment:
//   RO_SERVICE_ROOT  directory for the journal and payload blobs (default ".")
//   RO_SERVICE_URL   public base URL used to mint RO ids
//                    (default http://127.0.0.1:<port>)
//   RO_TOKEN         bearer token required for mutations; open when unset
//   RO_PORT          listen port (default 8080)
//   RO_FIXED_TIME    fixed timestamp for reproducible output; wall clock
//                    when unset

int main() {
    ro::service::ServiceConfig config;
    const char* root = std::getenv("RO_SERVICE_ROOT");
    config.store_root = root ? root : ".";
    int port = 8080;
    if (const char* p = std::getenv("RO_PORT")) port = std::atoi(p);
    const char* url = std::getenv("RO_SERVICE_URL");
    config.base_url = url ? url : "http://127.0.0.1:" + std::to_string(port);
    if (const char* token = std::getenv("RO_TOKEN")) config.token = token;
    if (const char* fixed = std::getenv("RO_FIXED_TIME")) {
        ro::core::Timestamp at{fixed};
        config.clock = [at] { return at; };
    }

    ro::service::Service service(config);
    service.start("0.0.0.0", port);
    std::cout << "serving research objects on port " << service.port() << std::endl;
    // Run until killed; the background listen thread does the work.
    for (;;) std::this_thread::sleep_for(std::chrono::hours(1));
}
