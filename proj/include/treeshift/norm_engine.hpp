#pragma once

#include "treeshift/shift_ops.hpp"

namespace treeshift {

/// The linear functional f' |-> (B^n f)'(v) written as an exact integer
/// coefficient row: (B^n f)'(v) = sum over u of c(u) f'(u). The row follows
/// from telescoping f along root paths: c(u) counts the vertices of
/// Chi^n(v) below-or-at u minus those of Chi^n(par v) below-or-at u, so its
/// support is the n-level neighborhoods of v and par v plus the ancestor
/// path. The l1 norm of the row is the exact norm of the functional, and
/// the supremum of the rows is the exact operator norm.
struct CoeffRow {
  VertexId target;
  int power = 1;
  std::map<VertexId, Integer> coeffs;  // empty when elided
  bool coeffs_elided = false;
  Integer support_size = 0;
  Integer l1 = 0;
};

namespace detail {

inline constexpr long kRowMaterializeCap = 250000;

/// c(u) = gamma(u, n-k) - gamma(u, n-k-1) summed with multiplicities over
/// the classes of the sector below `u` (depth k below the row's target).
inline void row_target_side(const TreeView& t, const VertexId& u, const Integer& mult,
                            int k, int n, bool root_row, Integer& l1, Integer& count) {
  Integer c = t.gamma_n(u, n - k);
  if (!root_row && n - k - 1 >= 0) c -= t.gamma_n(u, n - k - 1);
  if (c != 0) {
    l1 += mult * abs(c);
    count += mult;
  }
  if (k == n) return;
  if (t.is_explicit(u)) {
    for (const auto& w : t.children(u))
      row_target_side(t, w, mult, k + 1, n, root_row, l1, count);
  } else if (t.degree(u) > 0) {
    row_target_side(t, u.child(0), mult * t.degree(u), k + 1, n, root_row, l1, count);
  }
}

/// c(u) = -gamma(u, n-j) over a sibling subtree, j = depth below par v.
inline void row_sibling_side(const TreeView& t, const VertexId& u, const Integer& mult,
                             int j, int n, Integer& l1, Integer& count) {
  Integer c = t.gamma_n(u, n - j);
  if (c != 0) {
    l1 += mult * c;
    count += mult;
  }
  if (j == n) return;
  if (t.is_explicit(u)) {
    for (const auto& w : t.children(u)) row_sibling_side(t, w, mult, j + 1, n, l1, count);
  } else if (t.degree(u) > 0) {
    row_sibling_side(t, u.child(0), mult * t.degree(u), j + 1, n, l1, count);
  }
}

struct RowSummary {
  Integer l1 = 0;
  Integer support = 0;
};

inline RowSummary row_summary(const TreeView& tree, const VertexId& v, int n) {
  tree.check_depth(v.level() + n);
  RowSummary s;
  if (v.is_root()) {
    row_target_side(tree, v, 1, 0, n, true, s.l1, s.support);
    return s;
  }
  row_target_side(tree, v, 1, 0, n, false, s.l1, s.support);
  VertexId parent = v.parent();
  if (tree.is_explicit(parent)) {
    for (const auto& w : tree.children(parent)) {
      if (w == v) continue;
      row_sibling_side(tree, w, 1, 1, n, s.l1, s.support);
    }
  } else {
    Integer siblings = Integer(tree.degree(parent)) - 1;
    if (siblings > 0) row_sibling_side(tree, v, siblings, 1, n, s.l1, s.support);
  }
  Integer path_coeff = tree.gamma_n(v, n) - tree.gamma_n(parent, n);
  if (path_coeff != 0) {
    s.l1 += abs(path_coeff) * v.level();
    s.support += v.level();
  }
  return s;
}

inline void materialize_target_side(const TreeView& t, const VertexId& u, int k, int n,
                                    bool root_row, std::map<VertexId, Integer>& out) {
  Integer c = t.gamma_n(u, n - k);
  if (!root_row && n - k - 1 >= 0) c -= t.gamma_n(u, n - k - 1);
  if (c != 0) out[u] = c;
  if (k == n) return;
  for (const auto& w : t.children(u)) materialize_target_side(t, w, k + 1, n, root_row, out);
}

inline void materialize_sibling_side(const TreeView& t, const VertexId& u, int j, int n,
                                     std::map<VertexId, Integer>& out) {
  Integer c = t.gamma_n(u, n - j);
  if (c != 0) out[u] = -c;
  if (j == n) return;
  for (const auto& w : t.children(u)) materialize_sibling_side(t, w, j + 1, n, out);
}

}  // namespace detail

inline Integer coeff_row_l1(const TreeView& tree, const VertexId& v, int n) {
  return detail::row_summary(tree, v, n).l1;
}

inline CoeffRow coeff_row(const TreeView& tree, const VertexId& v, int n) {
  if (n < 1) throw ContractError("coefficient rows are defined for powers >= 1");
  tree.require_vertex(v);
  tree.check_depth(v.level() + n);
  CoeffRow row;
  row.target = v;
  row.power = n;
  detail::RowSummary summary = detail::row_summary(tree, v, n);
  row.l1 = summary.l1;
  row.support_size = summary.support;
  if (summary.support > detail::kRowMaterializeCap) {
    row.coeffs_elided = true;
    return row;
  }
  if (v.is_root()) {
    detail::materialize_target_side(tree, v, 0, n, true, row.coeffs);
  } else {
    detail::materialize_target_side(tree, v, 0, n, false, row.coeffs);
    VertexId parent = v.parent();
    for (const auto& w : tree.children(parent)) {
      if (w == v) continue;
      detail::materialize_sibling_side(tree, w, 1, n, row.coeffs);
    }
    Integer path_coeff = tree.gamma_n(v, n) - tree.gamma_n(parent, n);
    if (path_coeff != 0)
      for (int level = 0; level < v.level(); ++level)
        row.coeffs[v.ancestor_at(level)] = path_coeff;
  }
  return row;
}

/// A norm-one function whose sign pattern attains the row's l1 norm:
/// f' = sign(c) on the row's support, realized by path summation. Witness
/// that the supremum of row l1 norms is attained, not only an upper bound.
inline TreeFunction attaining_function(const CoeffRow& row) {
  if (row.coeffs_elided) throw ContractError("row coefficients were elided");
  TreeFunction::Support signs;
  for (const auto& [u, c] : row.coeffs)
    signs.emplace(u, Scalar(Rational(c > 0 ? 1 : -1)));
  return TreeFunction::antiderivative_of(std::move(signs));
}

enum class NormStatus { exact, diverges, truncated };

struct DivergenceSample {
  int level = 0;
  Integer max_row_l1 = 0;
  VertexId row_witness;
  Rational level_witness;     // (Bg)'(v) for g(v) = |v| at the level's argmax
  Rational harmonic_witness;  // same for g(v) = H_|v|
};

struct LowerBoundWitness {
  std::string tag;
  TreeFunction g;
  Rational achieved;  // lip_norm(B g), exact; a certified lower bound for |B|
};

struct NormComputation {
  ShiftOperator op;
  NormStatus status = NormStatus::exact;
  std::optional<Rational> exact_value;
  int scan_level = 0;
  std::optional<CoeffRow> witness_row;
  std::vector<LowerBoundWitness> lower_bound_witnesses;
  std::vector<Rational> upper_bounds;
  // one stabilized representative row per sector tail: (frontier, row l1)
  std::vector<std::pair<VertexId, Integer>> sector_rows;
  std::vector<DivergenceSample> divergence;
  bool divergence_certified = false;
};

namespace detail {

struct ExactScan {
  Integer best = -1;
  VertexId at;
  int scan_level = 0;
};

/// Maximum row l1 over representatives up to `scan_level`. Rows of pruned
/// siblings coincide with their representative's: below a frontier vertex
/// all siblings carry isomorphic sectors in identical context.
inline ExactScan exact_scan(const TreeView& tree, int n, int scan_level) {
  ExactScan out;
  out.scan_level = scan_level;
  tree.for_each_representative(scan_level, [&](const VertexId& v) {
    Integer l1 = coeff_row_l1(tree, v, n);
    if (l1 > out.best) {
      out.best = l1;
      out.at = v;
    }
  });
  return out;
}

inline std::vector<DivergenceSample> divergence_samples(const TreeView& tree, int n,
                                                        int levels) {
  std::vector<DivergenceSample> samples(static_cast<std::size_t>(levels));
  for (int m = 1; m <= levels; ++m) samples[static_cast<std::size_t>(m - 1)].level = m;
  TreeFunction b_level = TreeFunction::backward_level();
  TreeFunction b_harmonic = TreeFunction::backward_harmonic();
  tree.for_each_representative(levels, [&](const VertexId& v) {
    if (v.is_root()) return;
    DivergenceSample& s = samples[static_cast<std::size_t>(v.level() - 1)];
    Integer l1 = coeff_row_l1(tree, v, n);
    if (l1 > s.max_row_l1) {
      s.max_row_l1 = l1;
      s.row_witness = v;
    }
    Rational lw = b_level.derivative_at(tree, v).rational();
    if (rabs(lw) > rabs(s.level_witness)) s.level_witness = lw;
    Rational hw = b_harmonic.derivative_at(tree, v).rational();
    if (rabs(hw) > rabs(s.harmonic_witness)) s.harmonic_witness = hw;
  });
  return samples;
}

inline bool certify_divergence(const std::vector<DivergenceSample>& samples) {
  if (samples.size() < 4) return false;
  std::size_t half = samples.size() / 2;
  Integer first_half = 0, second_half = 0;
  int records = 0;
  Integer running = -1;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Integer& v = samples[i].max_row_l1;
    if (v > running) {
      running = v;
      ++records;
    }
    (i < half ? first_half : second_half) = std::max(i < half ? first_half : second_half, v);
  }
  return second_half > first_half && records >= 3;
}

}  // namespace detail

/// Witness functions from the lower-estimate constructions: g1 at the root,
/// g2 at a vertex realizing Gamma', g3 at a level-one vertex realizing
/// Gamma''. Each value lip_norm(B g) is a certified lower bound for |B|.
inline std::vector<LowerBoundWitness> lower_bound_witnesses(const TreeView& tree) {
  auto hbs = tree.hbs_level();
  if (!hbs)
    throw ContractError("B unbounded: tree not homogeneous by sectors");
  BoundConstants bc = tree.bound_constants();
  std::vector<LowerBoundWitness> out;

  auto achieved = [&](const TreeFunction& g) {
    TreeFunction bg = apply_backward(tree, g.materialized(tree), 1);
    NormReport r = lip_norm(tree, bg);
    return r.value.finite().rational();
  };

  TreeFunction g1 = TreeFunction::g1();
  out.push_back({"g1", g1, achieved(g1)});

  std::optional<VertexId> u_prime;
  int scan = std::max(*hbs, 1);
  tree.for_each_representative(scan, [&](const VertexId& v) {
    if (v.is_root() || u_prime) return;
    if (Integer(tree.degree(v)) == bc.gamma_prime) u_prime = v;
  });
  if (u_prime) {
    TreeFunction g2 = TreeFunction::g2(*u_prime);
    out.push_back({"g2(" + u_prime->str() + ")", g2, achieved(g2)});
  }

  std::optional<VertexId> u_second;
  for (const auto& c : tree.children_representatives(VertexId::root())) {
    if (Integer(tree.degree(c)) == bc.gamma_double_prime) {
      u_second = c;
      break;
    }
  }
  if (u_second) {
    TreeFunction g3 = TreeFunction::g3(*u_second);
    out.push_back({"g3(" + u_second->str() + ")", g3, achieved(g3)});
  }
  return out;
}

/// Exact |B^n| for trees that are homogeneous by sectors; a divergence
/// certificate otherwise. The scan horizon N+n+1 covers every distinct row:
/// rows freeze from level N+1 on because all degrees in sight are the
/// sector's constant; the extra level is re-verified, not assumed.
inline NormComputation operator_norm(const TreeView& tree, int n) {
  if (n < 1) throw ContractError("operator norm is computed for powers >= 1");
  NormComputation out;
  out.op = {ShiftOperator::Kind::backward, n};

  auto hbs = tree.hbs_level();
  if (!hbs) {
    out.status = NormStatus::diverges;
    int levels = std::min(50, tree.max_depth() - n);
    out.divergence = detail::divergence_samples(tree, n, levels);
    out.divergence_certified = detail::certify_divergence(out.divergence);
    out.scan_level = levels;
    return out;
  }

  int scan_level = *hbs + n + 1;
  if (scan_level + 1 + n > tree.max_depth()) {
    out.status = NormStatus::truncated;
    out.scan_level = std::max(0, tree.max_depth() - n);
    detail::ExactScan scan = detail::exact_scan(tree, n, out.scan_level);
    out.exact_value = Rational(scan.best);
    return out;
  }

  detail::ExactScan scan = detail::exact_scan(tree, n, scan_level);

  // Stabilization check: rows one level deeper must agree within sectors.
  tree.for_each_representative(scan_level, [&](const VertexId& v) {
    if (v.level() != scan_level || tree.degree(v) == 0) return;
    Integer here = coeff_row_l1(tree, v, n);
    Integer below = coeff_row_l1(tree, v.child(0), n);
    if (here != below)
      throw std::logic_error("row l1 norms failed to stabilize below the scan horizon");
  });

  out.status = NormStatus::exact;
  out.exact_value = Rational(scan.best);
  out.scan_level = scan_level;
  out.witness_row = coeff_row(tree, scan.at, n);

  if (n == 1) out.lower_bound_witnesses = lower_bound_witnesses(tree);
  if (!out.witness_row->coeffs_elided) {
    out.lower_bound_witnesses.push_back(
        {"sign-matched row at " + scan.at.str(), attaining_function(*out.witness_row),
         Rational(scan.best)});
  }

  // Stabilized representative row for every generated sector.
  for (const auto& [frontier, rule] : tree.spec().tails) {
    (void)rule;
    VertexId rep = frontier;
    while (rep.level() < scan_level && tree.degree(rep) > 0) rep = rep.child(0);
    out.sector_rows.emplace_back(frontier, coeff_row_l1(tree, rep, n));
  }

  BoundConstants bc = tree.bound_constants();
  out.upper_bounds.push_back(Rational(ipow(bc.upper_main(), static_cast<unsigned>(n))));
  out.upper_bounds.push_back(Rational(ipow(bc.upper_coarse(), static_cast<unsigned>(n))));
  return out;
}

/// Per-level divergence data for trees where B is unbounded: the growing
/// row l1 norms and the two explicit witness values.
inline std::vector<DivergenceSample> divergence_certificate(const TreeView& tree,
                                                            int levels,
                                                            bool* certified = nullptr) {
  if (tree.hbs_level())
    throw ContractError(
        "divergence certificate requires unbounded B, but the tree is homogeneous by "
        "sectors");
  int clamped = std::min(levels, tree.max_depth() - 1);
  auto samples = detail::divergence_samples(tree, 1, clamped);
  if (certified) *certified = detail::certify_divergence(samples);
  return samples;
}

struct SpectralRadiusRow {
  int n = 0;
  Rational norm;
  double root = 0.0;
  double ratio = 0.0;
  VertexId witness;
};

/// Exact |B^n| for n = 1..n_max with the root and ratio columns that
/// converge to the spectral radius.
inline std::vector<SpectralRadiusRow> spectral_radius_estimate(const TreeView& tree,
                                                               int n_max) {
  auto hbs = tree.hbs_level();
  if (!hbs) throw ContractError("B unbounded: tree not homogeneous by sectors");
  if (n_max < 1 || n_max > 12)
    throw ContractError("spectral radius estimate supports 1 <= n_max <= 12");
  tree.check_depth(*hbs + n_max + 3);

  std::vector<Integer> values;
  std::vector<VertexId> witnesses;
  for (int n = 1; n <= n_max + 1; ++n) {
    detail::ExactScan scan = detail::exact_scan(tree, n, *hbs + n + 1);
    values.push_back(scan.best);
    witnesses.push_back(scan.at);
  }
  std::vector<SpectralRadiusRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    SpectralRadiusRow row;
    row.n = n;
    row.norm = Rational(values[static_cast<std::size_t>(n - 1)]);
    row.root = std::pow(static_cast<double>(row.norm), 1.0 / n);
    row.ratio = static_cast<double>(Rational(values[static_cast<std::size_t>(n)],
                                             values[static_cast<std::size_t>(n - 1)]));
    row.witness = witnesses[static_cast<std::size_t>(n - 1)];
    rows.push_back(row);
  }
  return rows;
}

}  // namespace treeshift
