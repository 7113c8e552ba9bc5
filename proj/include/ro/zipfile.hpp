#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ro::zip {

struct ZipError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Serialize entries (name -> bytes) as a store-only (uncompressed) zip
/// archive. Entry order is preserved; timestamps are fixed, so equal input
/// always yields identical bytes.
std::string write_zip(const std::vector<std::pair<std::string, std::string>>& entries);

/// Read a store-only zip produced by write_zip (or any archive whose
/// entries use compression method 0).
std::vector<std::pair<std::string, std::string>> read_zip(const std::string& bytes);

}  // namespace ro::zip
