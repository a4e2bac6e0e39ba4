#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace treeshift {

/// Malformed or inconsistent input data (tree specs, function literals).
struct SpecError : std::runtime_error {
  explicit SpecError(const std::string& what) : std::runtime_error(what) {}
};

/// A precondition of an operation does not hold. The message names the
/// violated hypothesis so callers can surface it verbatim.
struct ContractError : std::runtime_error {
  explicit ContractError(const std::string& what) : std::runtime_error(what) {}
};

/// Query would realize the tree past the configured depth cap.
struct DepthCapError : ContractError {
  explicit DepthCapError(const std::string& what) : ContractError(what) {}
};

inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string fnv1a64_hex(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::uint64_t h = fnv1a64(bytes);
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

inline constexpr int kDefaultMaxDepth = 64;

/// Absolute per-vertex tolerance for identities checked in floating mode.
inline constexpr double kFloatTolerance = 1e-12;

}  // namespace treeshift
