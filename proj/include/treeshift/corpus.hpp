#pragma once

#include <random>

#include "treeshift/tree_function.hpp"

namespace treeshift {

/// Deterministic seeded generator. Draws go through explicit modular
/// arithmetic on the standardized mt19937_64 stream, so corpora are stable
/// across platforms and standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  std::uint32_t next(std::uint32_t lo, std::uint32_t hi) {
    return lo + static_cast<std::uint32_t>(engine_() % (hi - lo + 1));
  }
  bool chance(std::uint32_t percent) { return next(0, 99) < percent; }

 private:
  std::mt19937_64 engine_;
};

enum class CorpusKind { hbs, leafless_hbs, no_free_end, free_end, non_hbs };

inline const char* corpus_kind_name(CorpusKind k) {
  switch (k) {
    case CorpusKind::hbs: return "hbs";
    case CorpusKind::leafless_hbs: return "leafless_hbs";
    case CorpusKind::no_free_end: return "no_free_end";
    case CorpusKind::free_end: return "free_end";
    case CorpusKind::non_hbs: return "non_hbs";
  }
  return "?";
}

namespace detail {

struct CorpusProfile {
  std::uint32_t min_count;   // explicit child counts
  std::uint32_t min_tail;    // homogeneous tail degrees
  std::uint32_t max_degree;
  bool periodic_tails;
};

inline void grow_prefix(SeededRng& rng, TreeSpec& spec, const VertexId& v, int depth_left,
                        const CorpusProfile& p) {
  bool make_frontier = depth_left == 0 || (v.level() > 0 && rng.chance(45));
  if (make_frontier) {
    if (p.periodic_tails && rng.chance(60)) {
      std::uint32_t a = rng.next(std::max(p.min_tail, 1u), p.max_degree);
      std::uint32_t b = rng.next(std::max(p.min_tail, 1u), p.max_degree);
      if (a == b) b = a == p.max_degree ? a - 1 : a + 1;
      spec.tails.emplace(v, TailRule::level_periodic({a, b}));
    } else {
      spec.tails.emplace(v, TailRule::homogeneous(rng.next(p.min_tail, p.max_degree)));
    }
    return;
  }
  std::uint32_t count =
      v.is_root() ? rng.next(std::max(p.min_count, 1u), p.max_degree)
                  : rng.next(p.min_count, p.max_degree);
  spec.prefix.emplace(v, count);
  for (std::uint32_t i = 0; i < count; ++i)
    grow_prefix(rng, spec, v.child(i), depth_left - 1, p);
}

}  // namespace detail

/// One seeded spec of the requested kind. Prefix depth and degrees stay
/// within the given bounds; the result always validates.
inline TreeSpec random_spec(SeededRng& rng, CorpusKind kind, int max_prefix_depth = 3,
                            std::uint32_t max_degree = 4) {
  detail::CorpusProfile profile{};
  profile.max_degree = max_degree;
  switch (kind) {
    case CorpusKind::hbs:
      profile = {0, 0, max_degree, false};
      break;
    case CorpusKind::leafless_hbs:
      profile = {1, 1, max_degree, false};
      break;
    case CorpusKind::no_free_end:
      // Leafless with live branching at least two: the setting of the
      // criterion's beta-decay estimate.
      profile = {1, 2, max_degree, false};
      break;
    case CorpusKind::free_end:
      profile = {1, 2, max_degree, false};
      break;
    case CorpusKind::non_hbs:
      profile = {1, 1, max_degree, true};
      break;
  }

  TreeSpec spec;
  detail::grow_prefix(rng, spec, VertexId::root(), rng.next(1, std::uint32_t(max_prefix_depth)),
                      profile);

  if (spec.tails.empty()) {
    // Every branch ended in an explicit leaf; reopen one as a sector.
    for (auto it = spec.prefix.begin(); it != spec.prefix.end(); ++it) {
      if (it->second == 0 && !it->first.is_root()) {
        VertexId v = it->first;
        spec.prefix.erase(it);
        spec.tails.emplace(v, TailRule::homogeneous(rng.next(std::max(profile.min_tail, 2u),
                                                             profile.max_degree)));
        break;
      }
    }
  }

  if (kind == CorpusKind::free_end) {
    // Re-root one frontier sector as an all-degree-one end.
    auto it = spec.tails.begin();
    std::uint32_t pick = rng.next(0, static_cast<std::uint32_t>(spec.tails.size() - 1));
    std::advance(it, pick);
    it->second = TailRule::homogeneous(1);
  }
  if (kind == CorpusKind::non_hbs) {
    bool periodic = false;
    for (const auto& [v, rule] : spec.tails) {
      (void)v;
      if (!rule.constant()) periodic = true;
    }
    if (!periodic) {
      auto it = spec.tails.begin();
      it->second = TailRule::level_periodic({std::max(1u, max_degree - 1), max_degree});
    }
  }
  // Guarantee an infinite branch.
  bool infinite = false;
  for (const auto& [v, rule] : spec.tails) {
    (void)v;
    if (rule.min_degree() >= 1) infinite = true;
  }
  if (!infinite) spec.tails.begin()->second = TailRule::homogeneous(2);

  spec.validate();
  return spec;
}

/// Deterministic mixed corpus: kinds cycle, shapes come from the seed.
inline std::vector<std::pair<CorpusKind, TreeSpec>> generate_corpus(std::uint64_t seed,
                                                                    int count) {
  if (count < 0 || count > 1000) throw ContractError("corpus size must be at most 1000");
  static constexpr CorpusKind kinds[] = {CorpusKind::hbs, CorpusKind::no_free_end,
                                         CorpusKind::free_end, CorpusKind::non_hbs,
                                         CorpusKind::leafless_hbs};
  SeededRng rng(seed);
  std::vector<std::pair<CorpusKind, TreeSpec>> out;
  for (int i = 0; i < count; ++i) {
    CorpusKind kind = kinds[static_cast<std::size_t>(i) % std::size(kinds)];
    out.emplace_back(kind, random_spec(rng, kind));
  }
  return out;
}

/// Seeded finitely supported function with up to `points` vertices of level
/// <= depth. Values are nonzero rationals with small numerators, or small
/// integers when exact integer arithmetic is wanted.
inline TreeFunction random_finite_support(SeededRng& rng, const TreeView& tree, int points,
                                          int depth, bool integer_values = false) {
  TreeFunction::Support values;
  for (int i = 0; i < points; ++i) {
    VertexId v = VertexId::root();
    int target = static_cast<int>(rng.next(0, static_cast<std::uint32_t>(depth)));
    for (int step = 0; step < target; ++step) {
      std::uint32_t d = tree.degree(v);
      if (d == 0) break;
      v = v.child(rng.next(0, d - 1));
    }
    Rational value;
    if (integer_values) {
      value = Rational(static_cast<int>(rng.next(1, 9)));
    } else {
      value = Rational(static_cast<int>(rng.next(1, 9)),
                       static_cast<int>(rng.next(1, 9)));
    }
    if (rng.chance(50)) value = -value;
    values[v] = Scalar(value);  // later draws overwrite earlier ones
  }
  return TreeFunction::finite(std::move(values));
}

}  // namespace treeshift
