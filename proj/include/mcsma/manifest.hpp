#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"

namespace mcsma {

// Provenance block embedded in every emitted report: identical
// manifests guarantee identical reports.
struct RunManifest {
    std::string command;
    std::string tool_version;
    std::string input_path;
    std::string input_digest;  // fnv1a-64 of the file bytes, hex
    std::uint64_t seed = 0;
    std::string timestamp;  // UTC ISO-8601; honors SOURCE_DATE_EPOCH
    nlohmann::json config;  // resolved flag values

    nlohmann::json to_json() const;
};

std::uint64_t fnv1a64(const std::string& bytes);

RunManifest make_manifest(const std::string& command, const std::string& input_path,
                          std::uint64_t seed, nlohmann::json config);

}  // namespace mcsma
