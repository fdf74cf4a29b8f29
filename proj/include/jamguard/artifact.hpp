#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace jamguard {

inline constexpr std::string_view kToolVersion = "1.0.0";

/// FNV-1a 64-bit over raw bytes.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hash of the canonical (key-sorted, compact) JSON serialization, as 16 hex digits.
std::string config_hash(const nlohmann::json& config);

/// Provenance block written into every output artifact.
struct ArtifactStamp {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::string tool_version{kToolVersion};

    nlohmann::json to_json() const;
    static ArtifactStamp from_json(const nlohmann::json& j);
    bool operator==(const ArtifactStamp&) const = default;
};

}  // namespace jamguard
