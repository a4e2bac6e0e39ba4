#pragma once

#include "treeshift/norm_engine.hpp"

namespace treeshift {

/// beta(v, n) = 1 / gamma(par^n v, n) when v has an n-parent, else 0.
/// The count is never zero there: v itself is an n-child of its n-parent.
inline Rational beta(const TreeView& tree, const VertexId& v, int n) {
  if (n < 1) throw ContractError("beta is defined for n >= 1");
  tree.require_vertex(v);
  if (v.level() < n) return Rational(0);
  return Rational(Integer(1), tree.gamma_n(v.ancestor_at(v.level() - n), n));
}

/// (R_n f)(v) = beta(v, n) f(par^n v): the right inverse of B^n on finite
/// supports, spreading each value uniformly over the n-fold children.
inline TreeFunction apply_Rn(const TreeView& tree, const TreeFunction& f, int n) {
  if (n < 1) throw ContractError("R_n is defined for n >= 1");
  TreeFunction::Support out;
  for (const auto& [u, s] : f.support()) {
    tree.require_vertex(u);
    Integer count = tree.gamma_n(u, n);
    if (count == 0) continue;
    Scalar value = s * Scalar(Rational(Integer(1), count));
    for (const auto& w : n_children(tree, u, n)) out.emplace(w, value);
  }
  return TreeFunction::finite(std::move(out));
}

namespace detail {

/// |R_n f| without materializing R_n f: (R_n f)'(v) depends on v only
/// through u = par^n v, and equals f(u)/gamma(u,n) - f(par u)/gamma(par u,n)
/// for every v in Chi^n(u). Nonzero derivatives need u in the support or a
/// child of the support.
inline Magnitude rn_norm(const TreeView& tree, const TreeFunction& f, int n) {
  std::map<VertexId, bool> candidates;
  for (const auto& [u, s] : f.support()) {
    (void)s;
    candidates[u] = true;
    for (const auto& c : tree.children(u)) candidates[c] = true;
  }
  Magnitude best{Rational(0)};
  for (const auto& [u, unused] : candidates) {
    (void)unused;
    Integer count = tree.gamma_n(u, n);
    if (count == 0) continue;
    Scalar value = f.eval(tree, u) * Scalar(Rational(Integer(1), count));
    if (!u.is_root()) {
      VertexId parent = u.parent();
      value = value - f.eval(tree, parent) *
                          Scalar(Rational(Integer(1), tree.gamma_n(parent, n)));
    }
    best = max(best, value.abs());
  }
  return best;
}

inline bool magnitude_le(const Magnitude& a, const Magnitude& b) {
  if (a.exact() && b.exact()) return a.rational() <= b.rational();
  return a.approx() <= b.approx() + kFloatTolerance;
}

}  // namespace detail

struct CriterionRow {
  int n = 0;
  Magnitude bn_norm;          // |B^n f|
  Magnitude rn_norm;          // |R_n f|
  Magnitude identity_defect;  // |B^n R_n f - f|, algebraically zero off leaves
};

enum class CriterionVerdict { satisfied_on_window, obstruction };

struct CriterionRun {
  std::string f_tag;
  int n_max = 0;
  std::vector<CriterionRow> rows;
  CriterionVerdict verdict = CriterionVerdict::obstruction;
  std::string failing_column;  // which convergence requirement broke
  int hbs_level = 0;
  Integer mu = 0;  // minimum live branching at the HBS level
  bool free_end = false;
  Magnitude f_max_abs;
};

/// Runs the three convergence sequences of the hypercyclicity criterion for
/// B on the window n = 1..n_max. On trees without free ends the |R_n f|
/// column must obey the envelope 2 max|f| mu^{-(n-M)}; a free end defeats
/// the criterion and the run reports it.
inline CriterionRun criterion_run(const TreeView& tree, const TreeFunction& f, int n_max) {
  auto hbs = tree.hbs_level();
  if (!hbs) throw ContractError("B unbounded: tree not homogeneous by sectors");
  if (n_max < 1) throw ContractError("criterion run requires n_max >= 1");
  tree.check_depth(f.support().empty() ? n_max : f.support_depth() + n_max);

  CriterionRun run;
  run.f_tag = f.describe();
  run.n_max = n_max;
  run.hbs_level = *hbs;
  run.free_end = tree.has_free_end();
  run.mu = tree.min_positive_sector_degree();
  run.f_max_abs = f.max_abs();

  int support_depth = f.support().empty() ? 0 : f.support_depth();
  bool bn_ok = n_max > support_depth;
  bool defect_ok = true;
  bool envelope_ok = true;

  for (int n = 1; n <= n_max; ++n) {
    CriterionRow row;
    row.n = n;
    row.bn_norm = lip_norm(tree, apply_backward(tree, f, n)).value.finite();
    row.rn_norm = detail::rn_norm(tree, f, n);

    // B^n R_n f reproduces f wherever gamma(v, n) >= 1; the defect collects
    // the values stranded on vertices with no n-fold children.
    TreeFunction::Support stranded;
    for (const auto& [v, s] : f.support())
      if (tree.gamma_n(v, n) == 0) stranded.emplace(v, s);
    row.identity_defect =
        lip_norm(tree, TreeFunction::finite(std::move(stranded))).value.finite();

    if (n > support_depth && !row.bn_norm.is_zero()) bn_ok = false;
    if (!row.identity_defect.is_zero(kFloatTolerance)) defect_ok = false;
    if (!run.free_end && n > 2 * run.hbs_level) {
      Magnitude envelope = Magnitude(Rational(2)) * run.f_max_abs *
                           Magnitude(Rational(Integer(1),
                                              ipow(run.mu, static_cast<unsigned>(
                                                               n - run.hbs_level))));
      if (!detail::magnitude_le(row.rn_norm, envelope)) envelope_ok = false;
    }
    run.rows.push_back(std::move(row));
  }

  if (run.free_end) {
    run.verdict = CriterionVerdict::obstruction;
    run.failing_column = "free end present: |R_n f| does not decay on the end";
  } else if (!defect_ok) {
    run.verdict = CriterionVerdict::obstruction;
    run.failing_column = "identity_defect";
  } else if (!bn_ok) {
    run.verdict = CriterionVerdict::obstruction;
    run.failing_column = "BnF_norm";
  } else if (!envelope_ok) {
    run.verdict = CriterionVerdict::obstruction;
    run.failing_column = "RnF_norm";
  } else {
    run.verdict = CriterionVerdict::satisfied_on_window;
  }
  return run;
}

/// Witness that the orbit of f stays outside the 1/2-ball around the
/// indicator of a free-end vertex at time N.
struct ObstructionResult {
  VertexId v_star;
  int N = 0;
  VertexId w_N;  // the unique element of Chi^N(v*)
  Magnitude bound;
  bool certified = false;  // bound > 1/2
};

inline ObstructionResult free_end_obstruction(const TreeView& tree, const VertexId& v_star,
                                              const TreeFunction& f, int N) {
  if (N < 1) throw ContractError("obstruction requires N >= 1");
  if (!tree.is_free_end(v_star))
    throw ContractError("obstruction requires a free end at v*");
  if (v_star.is_root() || tree.degree(v_star.parent()) != 1)
    throw ContractError("obstruction requires gamma(v*) = gamma(par v*) = 1");
  NormReport norm = lip_norm(tree, f);
  Magnitude half{Rational(1, 2)};
  if (norm.value.infinite() || !(norm.value.finite() < half))
    throw ContractError("obstruction requires |f| < 1/2");
  tree.check_depth(v_star.level() + N);

  ObstructionResult result;
  result.v_star = v_star;
  result.N = N;
  VertexId w = v_star;
  for (int k = 0; k < N; ++k) w = w.child(0);
  tree.require_vertex(w);
  result.w_N = w;
  Scalar defect = f.eval(tree, w) - f.eval(tree, w.parent()) - Scalar(1);
  result.bound = defect.abs();
  result.certified = result.bound.exact() ? result.bound.rational() > Rational(1, 2)
                                          : result.bound.approx() > 0.5;
  return result;
}

/// |S^N f - chi_root| >= |(S^N f)(root) - 1| = 1: the forward orbit never
/// re-enters the 1/2-ball around the indicator of the root.
inline Magnitude forward_not_hypercyclic_probe(const TreeView& tree, const TreeFunction& f,
                                               int N) {
  if (N < 1) throw ContractError("probe requires N >= 1");
  Scalar at_root = forward_eval_at(tree, f, N, VertexId::root());
  return (at_root - Scalar(1)).abs();
}

}  // namespace treeshift
