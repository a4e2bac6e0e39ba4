#pragma once

#include "treeshift/lip_space.hpp"

namespace treeshift {

struct ShiftOperator {
  enum class Kind { forward, backward };
  Kind kind = Kind::backward;
  int power = 1;

  std::string str() const {
    std::string base = kind == Kind::forward ? "S" : "B";
    return power == 1 ? base : base + "^" + std::to_string(power);
  }
};

/// The finitely supported members of L^1(T), the dense subset every duality
/// computation in this library needs.
using SummableFunction = TreeFunction;

/// All vertices of Chi^n(v), enumerated in canonical order. Cost is the size
/// of the n-fold child set.
inline std::vector<VertexId> n_children(const TreeView& tree, const VertexId& v, int n) {
  tree.check_depth(v.level() + n);
  std::vector<VertexId> frontier{v};
  for (int k = 0; k < n; ++k) {
    std::vector<VertexId> next;
    for (const auto& u : frontier)
      for (const auto& c : tree.children(u)) next.push_back(c);
    frontier = std::move(next);
  }
  return frontier;
}

/// (S^n f)(v) = f(par^n v) when the n-parent exists, 0 on levels < n.
inline Scalar forward_eval_at(const TreeView& tree, const TreeFunction& f, int n,
                              const VertexId& v) {
  if (v.level() < n) return Scalar(0);
  return f.eval(tree, v.ancestor_at(v.level() - n));
}

/// (B^n f)(v) = sum of f over Chi^n(v), by direct enumeration. This is the
/// brute-force route; apply_backward is the structured one.
inline Scalar backward_eval_at(const TreeView& tree, const TreeFunction& f, int n,
                               const VertexId& v) {
  Scalar total(0);
  for (const auto& w : n_children(tree, v, n)) total = total + f.eval(tree, w);
  return total;
}

/// n-fold forward shift. Finite supports materialize (their image is the
/// n-fold child set of the support); families shift lazily.
inline TreeFunction apply_forward(const TreeView& tree, const TreeFunction& f, int n = 1) {
  if (n < 1) throw ContractError("shift power must be >= 1");
  if (f.is_finite_support()) {
    TreeFunction::Support out;
    for (const auto& [u, s] : f.support())
      for (const auto& w : n_children(tree, u, n)) out.emplace(w, s);
    return TreeFunction::finite(std::move(out));
  }
  return TreeFunction::forward_of(f, n);
}

/// n-fold backward shift: (B^n f)(v) = sum of f over Chi^n(v). Exact on
/// finite supports by accumulation at n-fold parents; closed-form families
/// aggregate level-wise where the aggregation is defined.
inline TreeFunction apply_backward(const TreeView& tree, const TreeFunction& f, int n = 1) {
  if (n < 1) throw ContractError("shift power must be >= 1");
  if (f.is_finite_support()) {
    TreeFunction::Support out;
    for (const auto& [w, s] : f.support()) {
      tree.require_vertex(w);
      if (w.level() < n) continue;
      VertexId target = w.ancestor_at(w.level() - n);
      auto it = out.find(target);
      if (it == out.end())
        out.emplace(target, s);
      else
        it->second = it->second + s;
    }
    return TreeFunction::finite(std::move(out));
  }
  if (f.is_family()) {
    const Family& fam = f.family();
    switch (fam.kind) {
      case FamilyKind::level:
        if (n != 1) throw ContractError("level aggregation is defined for a single power");
        return TreeFunction::backward_level().scaled(f.scale());
      case FamilyKind::harmonic_level:
        if (n != 1)
          throw ContractError("harmonic aggregation is defined for a single power");
        return TreeFunction::backward_harmonic().scaled(f.scale());
      case FamilyKind::eigen: {
        if (!tree.is_homogeneous() || Integer(tree.degree(VertexId::root())) != fam.gamma)
          throw ContractError(
              "eigenfunction aggregation requires a homogeneous tree of the family's order");
        return f.scaled(fam.lambda.pow(n));
      }
      case FamilyKind::indicator:
      case FamilyKind::g1:
      case FamilyKind::g2:
      case FamilyKind::g3:
      case FamilyKind::h_extremal:
        return apply_backward(tree, f.materialized(tree), n);
      default:
        break;
    }
  }
  throw ContractError("backward shift needs a finite support or an aggregatable family");
}

/// Phi_f(g) = sum over v of f(v) g'(v), the pairing identifying L^1(T) with
/// the dual of the little Lipschitz space. f must be finitely supported.
inline Scalar duality_pair(const TreeView& tree, const SummableFunction& f,
                           const TreeFunction& g) {
  Scalar total(0);
  for (const auto& [v, s] : f.support()) {
    tree.require_vertex(v);
    total = total + s * g.derivative_at(tree, v);
  }
  return total;
}

}  // namespace treeshift
