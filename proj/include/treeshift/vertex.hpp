#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "treeshift/common.hpp"

namespace treeshift {

/// A vertex is identified by its path of child indices from the root; the
/// root is the empty path and the level equals the path length. Ordering is
/// breadth-first, then lexicographic, which fixes a deterministic enumeration.
class VertexId {
 public:
  VertexId() = default;
  explicit VertexId(std::vector<std::uint32_t> path) : path_(std::move(path)) {}

  static VertexId root() { return VertexId(); }

  const std::vector<std::uint32_t>& path() const { return path_; }
  int level() const { return static_cast<int>(path_.size()); }
  bool is_root() const { return path_.empty(); }

  VertexId parent() const {
    if (is_root()) throw ContractError("the root has no parent");
    std::vector<std::uint32_t> p(path_.begin(), path_.end() - 1);
    return VertexId(std::move(p));
  }

  /// Ancestor at the given level (level <= this->level()).
  VertexId ancestor_at(int level) const {
    if (level < 0 || level > this->level())
      throw ContractError("ancestor level out of range");
    std::vector<std::uint32_t> p(path_.begin(), path_.begin() + level);
    return VertexId(std::move(p));
  }

  VertexId child(std::uint32_t index) const {
    std::vector<std::uint32_t> p = path_;
    p.push_back(index);
    return VertexId(std::move(p));
  }

  std::uint32_t index_in_parent() const {
    if (is_root()) throw ContractError("the root has no parent");
    return path_.back();
  }

  /// True when this vertex lies on the path from the root to v (inclusive),
  /// i.e. v belongs to the sector rooted here.
  bool is_ancestor_or_self_of(const VertexId& v) const {
    if (path_.size() > v.path_.size()) return false;
    for (std::size_t i = 0; i < path_.size(); ++i)
      if (path_[i] != v.path_[i]) return false;
    return true;
  }

  friend bool operator==(const VertexId& a, const VertexId& b) {
    return a.path_ == b.path_;
  }
  friend std::strong_ordering operator<=>(const VertexId& a, const VertexId& b) {
    if (a.path_.size() != b.path_.size())
      return a.path_.size() <=> b.path_.size();
    return a.path_ <=> b.path_;
  }

  /// Dot-separated child indices; "" for the root.
  std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < path_.size(); ++i) {
      if (i) out += '.';
      out += std::to_string(path_[i]);
    }
    return out;
  }

  static VertexId parse(const std::string& text) {
    if (text.empty()) return root();
    std::vector<std::uint32_t> path;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      std::size_t dot = text.find('.', pos);
      std::string seg = text.substr(pos, dot == std::string::npos ? dot : dot - pos);
      if (seg.empty()) throw SpecError("bad vertex path: '" + text + "'");
      for (char c : seg)
        if (c < '0' || c > '9') throw SpecError("bad vertex path: '" + text + "'");
      unsigned long value = std::stoul(seg);
      if (value > 0xfffffffful) throw SpecError("child index too large: " + seg);
      path.push_back(static_cast<std::uint32_t>(value));
      if (dot == std::string::npos) break;
      pos = dot + 1;
    }
    return VertexId(std::move(path));
  }

 private:
  std::vector<std::uint32_t> path_;
};

}  // namespace treeshift
