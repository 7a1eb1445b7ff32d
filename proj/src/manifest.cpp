#include "mcsma/manifest.hpp"

#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#include "mcsma/errors.hpp"

namespace mcsma {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xCBF29CE484222325ull;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001B3ull;
    }
    return h;
}

namespace {

std::string iso_utc(std::time_t t) {
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace

RunManifest make_manifest(const std::string& command, const std::string& input_path,
                          std::uint64_t seed, nlohmann::json config) {
    RunManifest m;
    m.command = command;
    m.tool_version = "mcsma 0.1.0";
    m.input_path = input_path;
    if (!input_path.empty()) {
        std::ifstream in(input_path, std::ios::binary);
        if (!in) throw InputError("cannot open input file: " + input_path);
        std::ostringstream buf;
        buf << in.rdbuf();
        char hex[17];
        std::snprintf(hex, sizeof(hex), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(buf.str())));
        m.input_digest = hex;
    }
    m.seed = seed;
    if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
        m.timestamp = iso_utc(static_cast<std::time_t>(std::strtoll(epoch, nullptr, 10)));
    } else {
        m.timestamp = iso_utc(std::time(nullptr));
    }
    m.config = std::move(config);
    return m;
}

nlohmann::json RunManifest::to_json() const {
    return {{"command", command},     {"tool_version", tool_version},
            {"input_path", input_path}, {"input_digest", input_digest},
            {"seed", seed},           {"timestamp", timestamp},
            {"config", config}};
}

}  // namespace mcsma
