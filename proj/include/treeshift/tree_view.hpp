#pragma once

#include <atomic>
#include <cstdlib>
#include <deque>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "treeshift/numeric.hpp"
#include "treeshift/tree_spec.hpp"

namespace treeshift {

inline int depth_cap_from_env() {
  if (const char* s = std::getenv("TREESHIFT_MAX_DEPTH")) {
    int v = std::atoi(s);
    if (v > 0) return v;
  }
  return kDefaultMaxDepth;
}

/// Combinatorial constants of a tree that is homogeneous by sectors at level
/// N, controlling the norm of the backward shift from above and below. On
/// trees that are not homogeneous by sectors, Lambda and Omega are infinite.
struct BoundConstants {
  std::optional<int> hbs_level;
  Integer gamma_root = 0;
  Integer gamma = 0;               // sup of gamma(v) over all vertices
  Integer gamma_prime = 0;         // sup of gamma(v) over v != root
  Integer gamma_double_prime = 0;  // max of gamma(v) over level 1
  bool lambda_finite = false;
  Integer lambda = 0;
  bool omega_finite = false;
  Integer omega = 0;

  Integer upper_main() const {
    if (!lambda_finite) throw ContractError("Lambda is infinite");
    return std::max(Integer(2 * gamma_root), lambda);
  }
  Integer upper_coarse() const {
    if (!omega_finite) throw ContractError("Omega is infinite");
    return std::max(Integer(2 * gamma_root), Integer(3 * gamma - 2 + omega));
  }
};

/// Queryable realization of a TreeSpec. Expansion is lazy and conservative:
/// every query is a pure function of the spec, so answers about a vertex
/// never change as deeper levels are realized. Internally synchronized;
/// safe for concurrent readers.
class TreeView {
 public:
  explicit TreeView(TreeSpec spec, int max_depth = depth_cap_from_env())
      : spec_(std::move(spec)), max_depth_(max_depth) {
    spec_.validate();
  }

  TreeView(const TreeView&) = delete;
  TreeView& operator=(const TreeView&) = delete;

  const TreeSpec& spec() const { return spec_; }
  int max_depth() const { return max_depth_; }
  int realized_depth() const { return realized_depth_.load(); }

  void check_depth(int level) const {
    if (level > max_depth_)
      throw DepthCapError("query needs depth " + std::to_string(level) +
                          " but the realization cap is " + std::to_string(max_depth_) +
                          " (TREESHIFT_MAX_DEPTH)");
  }

  bool contains(const VertexId& v) const {
    check_depth(v.level());
    Frame f = root_frame();
    for (int k = 0; k < v.level(); ++k) {
      std::uint32_t index = v.path()[static_cast<std::size_t>(k)];
      if (index >= frame_degree(f)) return false;
      f = descend(f, v.ancestor_at(k + 1));
    }
    touch(v.level());
    return true;
  }

  void require_vertex(const VertexId& v) const {
    if (!contains(v)) throw ContractError("vertex '" + v.str() + "' is not in the tree");
  }

  /// gamma(v): number of children.
  std::uint32_t degree(const VertexId& v) const { return frame_degree(frame_of(v)); }

  bool is_leaf(const VertexId& v) const { return degree(v) == 0; }

  bool is_explicit(const VertexId& v) const { return spec_.prefix.count(v) != 0; }

  std::vector<VertexId> children(const VertexId& v) const {
    std::uint32_t d = degree(v);
    check_depth(v.level() + 1);
    std::vector<VertexId> out;
    out.reserve(d);
    for (std::uint32_t i = 0; i < d; ++i) out.push_back(v.child(i));
    touch(v.level() + 1);
    return out;
  }

  /// One representative per isomorphism class of children: all children of a
  /// tail-governed vertex carry identical sectors and identical context, so
  /// only the first is enumerated. Children of explicit vertices may differ
  /// and are all enumerated.
  std::vector<VertexId> children_representatives(const VertexId& v) const {
    if (is_explicit(v)) return children(v);
    std::uint32_t d = degree(v);
    if (d == 0) return {};
    check_depth(v.level() + 1);
    touch(v.level() + 1);
    return {v.child(0)};
  }

  /// par^n(v); absent when |v| < n, which decides membership in T^n.
  std::optional<VertexId> parent_n(const VertexId& v, int n) const {
    if (n < 1) throw ContractError("parent_n requires n >= 1");
    require_vertex(v);
    if (v.level() < n) return std::nullopt;
    return v.ancestor_at(v.level() - n);
  }

  /// gamma(v, n): number of n-children. gamma(v, 0) = 1.
  Integer gamma_n(const VertexId& v, int n) const {
    if (n < 0) return 0;
    if (n == 0) return 1;
    check_depth(v.level() + n);
    touch(v.level() + n);
    return gamma_n_impl(v, frame_of(v), n);
  }

  // --- sector predicates, decidable from the spec ---

  /// True iff every vertex of the sector S_v has exactly one child.
  bool is_free_end(const VertexId& v) const {
    Frame f = frame_of(v);
    if (!f.is_explicit) return f.rule->min_degree() == 1 && f.rule->max_degree() == 1;
    if (f.count != 1) return false;
    return is_free_end(v.child(0));
  }

  /// True iff S_v contains a leaf, i.e. v is a leaf or an ancestor of one.
  bool sector_contains_leaf(const VertexId& v) const {
    Frame f = frame_of(v);
    if (!f.is_explicit) return f.rule->min_degree() == 0;
    if (f.count == 0) return true;
    for (std::uint32_t i = 0; i < f.count; ++i)
      if (sector_contains_leaf(v.child(i))) return true;
    return false;
  }

  bool is_leafless() const {
    for (const auto& [v, count] : spec_.prefix) {
      (void)v;
      if (count == 0) return false;
    }
    for (const auto& [v, rule] : spec_.tails) {
      (void)v;
      if (rule.min_degree() == 0) return false;
    }
    return true;
  }

  bool has_free_end() const { return find_free_end().has_value(); }

  /// First (canonical order) frontier vertex rooting an all-degree-one sector.
  std::optional<VertexId> find_free_end() const {
    std::optional<VertexId> best;
    for (const auto& [v, rule] : spec_.tails) {
      if (rule.min_degree() == 1 && rule.max_degree() == 1)
        if (!best || v < *best) best = v;
    }
    return best;
  }

  /// All leaves and ancestors of leaves with level <= depth (the set A).
  std::vector<VertexId> leaf_ancestor_set(int depth) const {
    std::vector<VertexId> out;
    for_each_vertex(depth, [&](const VertexId& v) {
      if (sector_contains_leaf(v)) out.push_back(v);
    });
    return out;
  }

  // --- homogeneity by sectors ---

  /// Smallest N such that gamma is constant on every sector rooted at level
  /// N; equivalently the deepest level at which gamma(v) != gamma(par v).
  /// Absent iff some tail rule changes degree forever (non-constant
  /// level-periodic rule), which is exactly failure of homogeneity by
  /// sectors and of boundedness of the backward shift.
  std::optional<int> hbs_level() const {
    std::call_once(hbs_once_, [this] {
      for (const auto& [v, rule] : spec_.tails) {
        (void)v;
        if (!rule.constant()) {
          hbs_ = std::nullopt;
          return;
        }
      }
      int n = 0;
      for (const auto& [v, count] : spec_.prefix) {
        if (v.is_root()) continue;
        if (count != spec_.prefix.at(v.parent())) n = std::max(n, v.level());
      }
      for (const auto& [v, rule] : spec_.tails) {
        if (v.is_root()) continue;
        if (rule.degree_at(0) != spec_.prefix.at(v.parent())) n = std::max(n, v.level());
      }
      hbs_ = n;
    });
    return hbs_;
  }

  bool is_homogeneous() const { return hbs_level() == std::optional<int>(0); }

  /// Minimum branching over sectors at the HBS level, ignoring dead (degree
  /// zero) sectors. This is the mu of the beta-decay estimate; it is >= 2
  /// exactly when the tree has no free ends.
  Integer min_positive_sector_degree() const {
    auto n = hbs_level();
    if (!n) throw ContractError("tree is not homogeneous by sectors");
    std::optional<Integer> mu;
    for_each_representative(*n, [&](const VertexId& v) {
      if (v.level() != *n) return;
      std::uint32_t d = degree(v);
      if (d >= 1 && (!mu || Integer(d) < *mu)) mu = Integer(d);
    });
    if (!mu) throw ContractError("tree has no live sector");  // unreachable for valid specs
    return *mu;
  }

  BoundConstants bound_constants() const {
    BoundConstants bc;
    bc.hbs_level = hbs_level();
    bc.gamma_root = degree(VertexId::root());

    Integer gp = 0;
    for (const auto& [v, count] : spec_.prefix)
      if (!v.is_root()) gp = std::max(gp, Integer(count));
    for (const auto& [v, rule] : spec_.tails) {
      (void)v;
      for (std::uint32_t d : rule.degrees) gp = std::max(gp, Integer(d));
    }
    bc.gamma_prime = gp;
    bc.gamma = std::max(bc.gamma_root, gp);

    Integer gpp = 0;
    for (const auto& c : children_representatives(VertexId::root()))
      gpp = std::max(gpp, Integer(degree(c)));
    bc.gamma_double_prime = gpp;

    if (bc.hbs_level) {
      int n = *bc.hbs_level;
      check_depth(n + 1);
      Integer omega = 0, lambda = 0;
      for_each_representative(n + 1, [&](const VertexId& v) {
        if (v.is_root()) return;
        Integer gv = degree(v);
        Integer gparent = degree(v.parent());
        Integer jump = Integer(abs(gv - gparent)) * v.level();
        if (v.level() <= n) omega = std::max(omega, jump);
        Integer expr = gv + gparent - 1 + Integer(abs(gv - 1)) + jump;
        lambda = std::max(lambda, expr);
      });
      bc.omega_finite = true;
      bc.omega = omega;
      bc.lambda_finite = true;
      bc.lambda = lambda;
    }
    return bc;
  }

  // --- enumeration ---

  template <typename F>
  void for_each_vertex(int depth, F&& fn) const {
    walk(depth, false, fn);
  }

  /// Pruned breadth-first walk: identical tail-generated siblings collapse
  /// to one representative. Degree data along representatives covers every
  /// degree pattern the tree realizes at each level.
  template <typename F>
  void for_each_representative(int depth, F&& fn) const {
    walk(depth, true, fn);
  }

 private:
  struct Frame {
    bool is_explicit;
    std::uint32_t count;     // valid when explicit
    const TailRule* rule;    // valid when tail-governed
    int offset;              // depth below the governing frontier vertex
  };

  Frame root_frame() const {
    auto p = spec_.prefix.find(VertexId::root());
    if (p != spec_.prefix.end()) return {true, p->second, nullptr, 0};
    return {false, 0, &spec_.tails.at(VertexId::root()), 0};
  }

  Frame descend(const Frame& f, const VertexId& child) const {
    if (!f.is_explicit) return {false, 0, f.rule, f.offset + 1};
    auto p = spec_.prefix.find(child);
    if (p != spec_.prefix.end()) return {true, p->second, nullptr, 0};
    auto t = spec_.tails.find(child);
    if (t == spec_.tails.end())
      throw SpecError("child '" + child.str() + "' is neither explicit nor a frontier");
    return {false, 0, &t->second, 0};
  }

  std::uint32_t frame_degree(const Frame& f) const {
    return f.is_explicit ? f.count : f.rule->degree_at(f.offset);
  }

  Frame frame_of(const VertexId& v) const {
    check_depth(v.level());
    Frame f = root_frame();
    for (int k = 0; k < v.level(); ++k) {
      std::uint32_t index = v.path()[static_cast<std::size_t>(k)];
      if (index >= frame_degree(f))
        throw ContractError("vertex '" + v.str() + "' is not in the tree");
      f = descend(f, v.ancestor_at(k + 1));
    }
    touch(v.level());
    return f;
  }

  Integer gamma_n_impl(const VertexId& v, const Frame& f, int n) const {
    if (n == 0) return 1;
    std::uint32_t d = frame_degree(f);
    if (d == 0) return 0;
    if (!f.is_explicit) {
      auto key = std::make_tuple(static_cast<const void*>(f.rule), f.offset, n);
      {
        std::scoped_lock lock(memo_mutex_);
        auto it = tail_gamma_memo_.find(key);
        if (it != tail_gamma_memo_.end()) return it->second;
      }
      Integer result = Integer(d) * gamma_n_impl(v.child(0), descend(f, v.child(0)), n - 1);
      std::scoped_lock lock(memo_mutex_);
      tail_gamma_memo_[key] = result;
      return result;
    }
    Integer total = 0;
    for (std::uint32_t i = 0; i < d; ++i) {
      VertexId c = v.child(i);
      total += gamma_n_impl(c, descend(f, c), n - 1);
    }
    return total;
  }

  template <typename F>
  void walk(int depth, bool pruned, F&& fn) const {
    check_depth(depth);
    touch(depth);
    std::deque<std::pair<VertexId, Frame>> queue;
    queue.emplace_back(VertexId::root(), root_frame());
    while (!queue.empty()) {
      auto [v, f] = queue.front();
      queue.pop_front();
      fn(v);
      if (v.level() >= depth) continue;
      std::uint32_t d = frame_degree(f);
      std::uint32_t take = (pruned && !f.is_explicit && d > 0) ? 1 : d;
      for (std::uint32_t i = 0; i < take; ++i) {
        VertexId c = v.child(i);
        queue.emplace_back(c, descend(f, c));
      }
    }
  }

  void touch(int level) const {
    int seen = realized_depth_.load();
    while (level > seen && !realized_depth_.compare_exchange_weak(seen, level)) {
    }
  }

  TreeSpec spec_;
  int max_depth_;
  mutable std::atomic<int> realized_depth_{0};
  mutable std::once_flag hbs_once_;
  mutable std::optional<int> hbs_;
  mutable std::mutex memo_mutex_;
  mutable std::map<std::tuple<const void*, int, int>, Integer> tail_gamma_memo_;
};

}  // namespace treeshift
