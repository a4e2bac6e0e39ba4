#pragma once

#include <optional>

#include "treeshift/tree_function.hpp"

namespace treeshift {

enum class Exactness { exact, lower_bound };

/// Result of a Lipschitz-norm computation. `exact` means the supremum of
/// |f'| is provably attained (or provably infinite) within the scanned
/// region; `lower_bound` is an honest truncation.
struct NormReport {
  ExtendedMagnitude value;
  std::optional<VertexId> attained_at;
  int truncation_depth = 0;
  Exactness exactness = Exactness::exact;
};

enum class LittleLipschitz { yes, no, undecided_at_depth };

/// f'(root) = f(root), f'(v) = f(v) - f(par v). Finite supports map to
/// finite supports; other representations to a lazily evaluated view.
inline TreeFunction derivative(const TreeView& tree, const TreeFunction& f) {
  if (f.is_finite_support()) {
    TreeFunction::Support out;
    auto record = [&](const VertexId& v) {
      if (out.count(v)) return;
      Scalar d = f.derivative_at(tree, v);
      if (!d.is_zero()) out.emplace(v, d);
    };
    for (const auto& [v, s] : f.support()) {
      (void)s;
      record(v);
      for (const auto& c : tree.children(v)) record(c);
    }
    return TreeFunction::finite(std::move(out));
  }
  if (f.is_antiderivative()) {
    TreeFunction::Support g = f.antiderivative_base();
    if (!f.scale().equals(Scalar(1))) {
      for (auto& [v, s] : g) s = f.scale() * s;
    }
    return TreeFunction::finite(std::move(g));
  }
  return TreeFunction::derivative_view(f);
}

/// Inverse of the derivative map by path summation:
/// f(v) = sum of g over the path from the root to v.
inline TreeFunction antiderivative(const TreeView& tree, const TreeFunction& g) {
  (void)tree;
  if (g.is_finite_support()) return TreeFunction::antiderivative_of(g.support());
  if (g.is_derivative_view()) return g.derivative_inner().scaled(g.scale());
  throw ContractError("antiderivative requires a finitely supported derivative");
}

namespace detail {

/// Exact norm of a finitely supported function: |f'| vanishes outside the
/// support and its children.
inline NormReport finite_support_norm(const TreeView& tree, const TreeFunction& f,
                                      int depth) {
  int needed = f.support().empty() ? 0 : f.support_depth() + 1;
  int scan = depth < 0 ? needed : std::min(depth, needed);
  std::map<VertexId, Scalar> derivative_values;
  auto record = [&](const VertexId& v) {
    if (v.level() > scan || derivative_values.count(v)) return;
    derivative_values.emplace(v, f.derivative_at(tree, v));
  };
  record(VertexId::root());
  for (const auto& [v, s] : f.support()) {
    (void)s;
    record(v);
    if (v.level() < scan)
      for (const auto& c : tree.children(v)) record(c);
  }
  NormReport report;
  Magnitude best(Rational(0));
  std::optional<VertexId> where;
  for (const auto& [v, d] : derivative_values) {
    Magnitude m = d.abs();
    if (best < m) {
      best = m;
      where = v;
    }
  }
  report.value = ExtendedMagnitude(best);
  report.attained_at = where;
  report.truncation_depth = scan;
  report.exactness =
      (depth < 0 || depth >= needed) ? Exactness::exact : Exactness::lower_bound;
  return report;
}

inline NormReport scanned_norm(const TreeView& tree, const TreeFunction& f, int depth,
                               bool representatives_suffice, Exactness exactness) {
  NormReport report;
  Magnitude best(Rational(0));
  std::optional<VertexId> where;
  auto visit = [&](const VertexId& v) {
    Magnitude m = f.derivative_at(tree, v).abs();
    if (best < m) {
      best = m;
      where = v;
    }
  };
  int scan = std::min(depth, tree.max_depth());
  if (representatives_suffice)
    tree.for_each_representative(scan, visit);
  else
    tree.for_each_vertex(scan, visit);
  report.value = ExtendedMagnitude(best);
  report.attained_at = where;
  report.truncation_depth = scan;
  report.exactness = exactness;
  return report;
}

}  // namespace detail

/// sup of |f'| over vertices of level <= depth (depth < 0 chooses a depth
/// sufficient for the representation). Exact for finite supports and for the
/// named families, whose derivative modulus is eventually monotone or
/// constant along every branch.
inline NormReport lip_norm(const TreeView& tree, const TreeFunction& f, int depth = -1) {
  Magnitude scale_mag = f.scale().abs();
  auto scaled = [&](NormReport r) {
    if (!r.value.infinite() && !scale_mag.is_zero())
      r.value = ExtendedMagnitude(r.value.finite() * scale_mag);
    if (scale_mag.is_zero()) {
      r.value = ExtendedMagnitude(Magnitude(Rational(0)));
      r.attained_at = std::nullopt;
    }
    return r;
  };

  if (f.is_finite_support()) return detail::finite_support_norm(tree, f, depth);

  if (f.is_antiderivative()) {
    // The derivative of a path-sum function is its base, exactly.
    NormReport report;
    Magnitude best(Rational(0));
    std::optional<VertexId> where;
    for (const auto& [v, s] : f.antiderivative_base()) {
      Magnitude m = s.abs();
      if (best < m) {
        best = m;
        where = v;
      }
    }
    report.value = ExtendedMagnitude(best);
    report.attained_at = where;
    report.truncation_depth = 0;
    return scaled(report);
  }

  if (f.is_family()) {
    const Family& fam = f.family();
    auto unit_norm_at = [&](const VertexId& v) {
      NormReport r;
      r.value = ExtendedMagnitude(Magnitude(Rational(1)));
      r.attained_at = v;
      r.truncation_depth = v.level();
      return scaled(r);
    };
    switch (fam.kind) {
      case FamilyKind::indicator:
        tree.require_vertex(fam.vertex);
        return unit_norm_at(fam.vertex);
      case FamilyKind::g1:
      case FamilyKind::h_extremal:
        if (fam.kind == FamilyKind::h_extremal) tree.require_vertex(fam.vertex);
        return unit_norm_at(VertexId::root());
      case FamilyKind::g2:
      case FamilyKind::g3:
        tree.require_vertex(fam.vertex);
        return unit_norm_at(fam.vertex);
      case FamilyKind::level:
      case FamilyKind::harmonic_level:
        return unit_norm_at(VertexId::root().child(0));
      case FamilyKind::eigen: {
        Scalar q = fam.lambda / Scalar(Rational(fam.gamma));
        Magnitude qm = q.abs();
        NormReport r;
        if (Magnitude(Rational(1)) < qm) {
          if (scale_mag.is_zero()) return scaled(r);  // the zero function
          r.value = ExtendedMagnitude::infinity();
          r.truncation_depth = 0;
          return r;
        }
        Magnitude at_boundary = (q - Scalar(1)).abs();
        if (Magnitude(Rational(1)) < at_boundary) {
          r.value = ExtendedMagnitude(at_boundary);
          r.attained_at = VertexId::root().child(0);
          r.truncation_depth = 1;
        } else {
          r.value = ExtendedMagnitude(Magnitude(Rational(1)));
          r.attained_at = VertexId::root();
          r.truncation_depth = 0;
        }
        return scaled(r);
      }
      case FamilyKind::resolvent: {
        Scalar inv = Scalar(1) / fam.lambda;
        Magnitude r_mag = inv.abs();
        NormReport r;
        if (Magnitude(Rational(1)) < r_mag) {
          if (scale_mag.is_zero()) return scaled(r);
          r.value = ExtendedMagnitude::infinity();
          r.truncation_depth = 0;
          return r;
        }
        Magnitude slope = ((Scalar(1) - inv) * inv).abs();
        if (r_mag < slope) {
          r.value = ExtendedMagnitude(slope);
          r.attained_at = VertexId::root().child(0);
          r.truncation_depth = 1;
        } else {
          r.value = ExtendedMagnitude(r_mag);
          r.attained_at = VertexId::root();
          r.truncation_depth = 0;
        }
        return scaled(r);
      }
      case FamilyKind::backward_level:
      case FamilyKind::backward_harmonic: {
        // Values depend on the vertex only through level and the degrees of
        // the vertex and its parent, so representatives carry the supremum.
        auto hbs = tree.hbs_level();
        if (hbs) {
          int scan = std::max(depth, *hbs + 1);
          return scaled(detail::scanned_norm(tree, f, scan, true, Exactness::exact));
        }
        int scan = depth < 0 ? 20 : depth;
        return scaled(detail::scanned_norm(tree, f, scan, true, Exactness::lower_bound));
      }
      default:
        break;
    }
  }

  int scan = depth < 0 ? 8 : depth;
  return scaled(detail::scanned_norm(tree, f, scan, false, Exactness::lower_bound));
}

/// Decides f' -> 0 at infinity. Symbolically exact for finite supports and
/// the named families; undecided for lazily derived data.
inline LittleLipschitz in_little_lipschitz(const TreeView& tree, const TreeFunction& f) {
  if (f.is_finite_support() || f.is_antiderivative()) return LittleLipschitz::yes;
  if (f.is_forward()) return in_little_lipschitz(tree, f.forward_inner());
  if (f.is_derivative_view()) return LittleLipschitz::undecided_at_depth;
  if (f.scale().is_zero()) return LittleLipschitz::yes;
  const Family& fam = f.family();
  switch (fam.kind) {
    case FamilyKind::indicator:
    case FamilyKind::g1:
    case FamilyKind::g2:
    case FamilyKind::g3:
    case FamilyKind::h_extremal:
      return LittleLipschitz::yes;
    case FamilyKind::level:
      return LittleLipschitz::no;  // derivative is 1 on all of T*
    case FamilyKind::harmonic_level:
      return LittleLipschitz::yes;
    case FamilyKind::eigen: {
      Scalar q = fam.lambda / Scalar(Rational(fam.gamma));
      if (q.abs() < Magnitude(Rational(1))) return LittleLipschitz::yes;
      return (q - Scalar(1)).is_zero(kFloatTolerance) ? LittleLipschitz::yes
                                                      : LittleLipschitz::no;
    }
    case FamilyKind::resolvent:
      return LittleLipschitz::no;
    case FamilyKind::backward_level:
      return LittleLipschitz::no;  // derivative tends to the sector branching
    case FamilyKind::backward_harmonic:
      return tree.hbs_level() ? LittleLipschitz::yes : LittleLipschitz::no;
  }
  return LittleLipschitz::undecided_at_depth;
}

/// Checks |f(v)| <= (|v|+1) |f| for every realized vertex with |v| <= depth.
inline bool growth_check(const TreeView& tree, const TreeFunction& f, int depth) {
  NormReport norm = lip_norm(tree, f);
  if (norm.value.infinite())
    throw ContractError("growth check requires f in the Lipschitz space");
  const Magnitude& bound = norm.value.finite();
  bool ok = true;
  tree.for_each_vertex(std::min(depth, tree.max_depth()), [&](const VertexId& v) {
    if (!ok) return;
    Magnitude lhs = f.eval(tree, v).abs();
    Magnitude rhs = Magnitude(Rational(v.level() + 1)) * bound;
    if (lhs.exact() && rhs.exact()) {
      if (rhs.rational() < lhs.rational()) ok = false;
    } else if (lhs.approx() > rhs.approx() + kFloatTolerance) {
      ok = false;
    }
  });
  return ok;
}

/// Membership in M = {f : f(v) = 0 on every leaf and ancestor of a leaf}.
/// Exact for finitely supported functions; evaluated on the realized set A
/// up to `depth` otherwise.
inline bool m_membership(const TreeView& tree, const TreeFunction& f, int depth = -1) {
  if (f.is_finite_support()) {
    for (const auto& [v, s] : f.support())
      if (tree.sector_contains_leaf(v) && !s.is_zero()) return false;
    return true;
  }
  if (f.is_family()) {
    const Family& fam = f.family();
    switch (fam.kind) {
      case FamilyKind::indicator:
      case FamilyKind::g1:
      case FamilyKind::g2:
      case FamilyKind::g3:
      case FamilyKind::h_extremal:
        return m_membership(tree, f.materialized(tree), depth);
      default:
        break;
    }
  }
  int scan = depth < 0 ? 12 : depth;
  for (const auto& v : tree.leaf_ancestor_set(std::min(scan, tree.max_depth())))
    if (!f.eval(tree, v).is_zero(kFloatTolerance)) return false;
  return true;
}

}  // namespace treeshift
