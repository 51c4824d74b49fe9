#pragma once

#include <cstdint>
#include <string>

namespace cpa {

inline constexpr const char* kToolVersion = "0.1.0";

/// Shortest %.17g rendering; round-trips doubles exactly and is stable
/// across runs, which the byte-identical output contract relies on.
std::string fmt17(double x);

/// Minimal JSON string escaping (quotes, backslash, control characters).
std::string json_escape(const std::string& s);

/// FNV-1a 64-bit of a byte string, as "fnv1a:<hex>"; fingerprints effective
/// configs inside run manifests.
std::string fnv1a_hex(const std::string& bytes);

}  // namespace cpa
