#include "jamguard/artifact.hpp"

#include <cstdio>

#include "jamguard/error.hpp"

namespace jamguard {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string config_hash(const nlohmann::json& config) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(config.dump())));
    return buf;
}

nlohmann::json ArtifactStamp::to_json() const {
    return {{"config_hash", config_hash}, {"seed", seed}, {"tool_version", tool_version}};
}

ArtifactStamp ArtifactStamp::from_json(const nlohmann::json& j) {
    try {
        return {j.at("config_hash").get<std::string>(), j.at("seed").get<std::uint64_t>(),
                j.at("tool_version").get<std::string>()};
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError(std::string("artifact stamp: ") + e.what());
    }
}

}  // namespace jamguard
