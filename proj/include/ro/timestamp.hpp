#pragma once

#include <chrono>
#include <compare>
#include <stdexcept>
#include <string>

namespace ro::core {

/// An xsd:dateTime in UTC at second precision ("2013-01-01T00:00:00Z").
struct Timestamp {
    std::string value;

    Timestamp() = default;
    explicit Timestamp(std::string v) : value(std::move(v)) {
        if (!well_formed(value)) throw std::invalid_argument("bad timestamp: " + value);
    }

    static bool well_formed(const std::string& v) {
        if (v.size() != 20 || v[4] != '-' || v[7] != '-' || v[10] != 'T' || v[13] != ':' ||
            v[16] != ':' || v[19] != 'Z')
            return false;
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u, 11u, 12u, 14u, 15u, 17u, 18u})
            if (v[i] < '0' || v[i] > '9') return false;
        return true;
    }

    static Timestamp now() {
        auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char buf[32];
        std::tm tm{};
        gmtime_r(&t, &tm);
        std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
        return Timestamp{buf};
    }

    auto operator<=>(const Timestamp&) const = default;
};

}  // namespace ro::core
