#pragma once

#include "treeshift/norm_engine.hpp"

namespace treeshift {

/// Outcome of an eigenfunction experiment for B on a homogeneous tree of
/// order gamma: the pointwise defect of B f_lambda = lambda f_lambda over
/// the checked window, and the space classifications of f_lambda.
struct SpectralVerdict {
  Scalar lambda;
  ShiftOperator op{ShiftOperator::Kind::backward, 1};
  Integer gamma = 0;
  bool eigenvalue_on_L = false;
  bool eigenvalue_on_L0 = false;
  bool in_spectrum = false;
  bool excluded_from_point_spectrum_L0 = false;
  Magnitude residual;
  int depth = 0;
};

namespace detail {

/// |lambda| versus gamma with a float-mode tolerance margin.
struct BoundaryCompare {
  bool le;        // |lambda| <= gamma
  bool lt;        // |lambda| <  gamma
  bool boundary;  // |lambda| =  gamma
};

inline BoundaryCompare compare_to_radius(const Scalar& lambda, const Integer& gamma) {
  Magnitude a = lambda.abs();
  Magnitude g{Rational(gamma)};
  BoundaryCompare c{};
  if (a.exact()) {
    c.le = a.rational() <= g.rational();
    c.lt = a.rational() < g.rational();
  } else {
    c.le = a.approx() <= g.approx() + kFloatTolerance;
    c.lt = a.approx() < g.approx() - kFloatTolerance;
  }
  c.boundary = c.le && !c.lt;
  return c;
}

}  // namespace detail

/// Verifies (B f_lambda - lambda f_lambda)(v) = 0 for |v| <= depth, with
/// f_lambda(v) = (lambda/gamma)^{|v|}, and classifies membership of
/// f_lambda in the Lipschitz and little Lipschitz spaces. The backward
/// application is brute-force child summation, independent of the family's
/// aggregation formula.
inline SpectralVerdict eigen_check(const TreeView& tree, const Scalar& lambda, int depth) {
  if (!tree.is_homogeneous())
    throw ContractError(
        "point spectrum of B is computed only for homogeneous trees; this tree is not "
        "homogeneous");
  if (depth < 2) throw ContractError("eigen check requires depth >= 2");
  tree.check_depth(depth + 1);

  SpectralVerdict verdict;
  verdict.lambda = lambda;
  verdict.gamma = tree.degree(VertexId::root());
  verdict.depth = depth;

  TreeFunction f = TreeFunction::eigen(lambda, verdict.gamma);
  Magnitude residual{Rational(0)};
  tree.for_each_representative(depth, [&](const VertexId& v) {
    Scalar defect = backward_eval_at(tree, f, 1, v) - lambda * f.eval(tree, v);
    residual = max(residual, defect.abs());
  });
  verdict.residual = residual;

  auto cmp = detail::compare_to_radius(lambda, verdict.gamma);
  bool lambda_equals_gamma = lambda.equals(Scalar(Rational(verdict.gamma)), kFloatTolerance);
  verdict.eigenvalue_on_L = cmp.le;
  verdict.in_spectrum = cmp.le;
  verdict.eigenvalue_on_L0 = cmp.lt || lambda_equals_gamma;
  verdict.excluded_from_point_spectrum_L0 = cmp.boundary && !lambda_equals_gamma;
  return verdict;
}

enum class ProbeOutcome { consistent, contradiction_found };

/// Data gathered by the boundary-exclusion probe: the two quantitative
/// checks of the argument that no little-Lipschitz eigenfunction exists for
/// |lambda| = gamma, lambda != gamma.
struct BoundaryExclusionReport {
  ProbeOutcome outcome = ProbeOutcome::consistent;
  bool premise_met = false;       // derivative decays under |gamma-lambda|/(2 gamma)
  int decay_level = -1;           // first level from which the decay holds
  std::optional<VertexId> w_star; // normalization vertex, f(w*) != 0
  std::optional<int> chain_break_n;      // n with no v in Chi^n(w*) of |f(v)| >= 1
  std::optional<VertexId> u_star;        // deep vertex with |f(u*)| >= 1
  std::optional<Magnitude> forcing_sum;  // sum over Chi(u*) of |f'(u)|
};

inline BoundaryExclusionReport boundary_exclusion_probe(const TreeView& tree,
                                                        const Scalar& lambda,
                                                        const TreeFunction& f, int depth) {
  if (!tree.is_homogeneous())
    throw ContractError("boundary exclusion probe requires a homogeneous tree");
  Integer gamma = tree.degree(VertexId::root());
  auto cmp = detail::compare_to_radius(lambda, gamma);
  if (!cmp.boundary || lambda.equals(Scalar(Rational(gamma)), kFloatTolerance))
    throw ContractError("boundary exclusion probe requires |lambda| = gamma, lambda != gamma");
  tree.check_depth(depth + 1);

  BoundaryExclusionReport report;

  // Normalization vertex.
  std::optional<VertexId> w_star;
  tree.for_each_vertex(depth, [&](const VertexId& v) {
    if (w_star) return;
    if (!f.eval(tree, v).is_zero(kFloatTolerance)) w_star = v;
  });
  if (!w_star) return report;  // zero sample: nothing to contradict
  report.w_star = w_star;
  Scalar normalizer = Scalar(1) / f.eval(tree, *w_star);
  auto g_at = [&](const VertexId& v) { return normalizer * f.eval(tree, v); };
  auto g_deriv = [&](const VertexId& v) { return normalizer * f.derivative_at(tree, v); };

  Magnitude threshold =
      ((Scalar(Rational(gamma)) - lambda) / Scalar(Rational(2 * gamma))).abs();

  // Decay premise. For eigenfunction samples on the boundary the derivative
  // modulus is constant at twice the threshold, so the premise fails; for
  // finitely supported samples it holds past the support.
  if (f.is_family() && f.family().kind == FamilyKind::eigen) {
    Scalar q = f.family().lambda / Scalar(Rational(f.family().gamma));
    Magnitude slope = (q - Scalar(1)).abs();
    if (!(slope < threshold)) return report;  // premise fails: consistent
    report.premise_met = true;
    report.decay_level = 1;
  } else if (f.is_finite_support()) {
    int support_depth = f.support_depth();
    int level = support_depth + 2;  // derivative vanishes from here on
    for (int candidate = level; candidate >= 1; --candidate) {
      Magnitude worst{Rational(0)};
      tree.for_each_vertex(std::min(support_depth + 1, depth), [&](const VertexId& v) {
        if (v.level() >= candidate) worst = max(worst, g_deriv(v).abs());
      });
      if (worst < threshold)
        level = candidate;
      else
        break;
    }
    report.premise_met = true;
    report.decay_level = level;
  } else {
    // Scanned-window estimate for arbitrary samples.
    int level = -1;
    for (int candidate = depth; candidate >= 1; --candidate) {
      Magnitude worst{Rational(0)};
      tree.for_each_vertex(depth, [&](const VertexId& v) {
        if (v.level() >= candidate) worst = max(worst, g_deriv(v).abs());
      });
      if (worst < threshold)
        level = candidate;
      else
        break;
    }
    if (level < 0) return report;
    report.premise_met = true;
    report.decay_level = level;
  }

  // Check (a): every n-fold child set of w* must contain a vertex of
  // normalized modulus at least one.
  int depth_rel = depth - w_star->level();
  for (int n = 1; n <= depth_rel; ++n) {
    bool found = false;
    for (const auto& v : n_children(tree, *w_star, n)) {
      Magnitude m = g_at(v).abs();
      bool at_least_one = m.exact() ? m.rational() >= 1 : m.approx() >= 1.0 - kFloatTolerance;
      if (at_least_one) {
        found = true;
        if (n == std::max(report.decay_level, 1) && !report.u_star) report.u_star = v;
        break;
      }
    }
    if (!found) {
      report.chain_break_n = n;
      report.outcome = ProbeOutcome::contradiction_found;
      return report;
    }
  }

  // Check (b): with u* below the decay level, the eigen identity would force
  // |f(u*)| < 1/2, contradicting |f(u*)| >= 1.
  int n_star = std::max(report.decay_level, 1);
  if (n_star > depth_rel) return report;  // window too small to collide
  if (!report.u_star) {
    for (const auto& v : n_children(tree, *w_star, n_star)) {
      Magnitude m = g_at(v).abs();
      if (m.exact() ? m.rational() >= 1 : m.approx() >= 1.0 - kFloatTolerance) {
        report.u_star = v;
        break;
      }
    }
  }
  if (!report.u_star) return report;
  Magnitude forcing{Rational(0)};
  bool forcing_exact = true;
  double forcing_approx = 0.0;
  for (const auto& u : tree.children(*report.u_star)) {
    Magnitude m = g_deriv(u).abs();
    if (!m.exact()) forcing_exact = false;
    forcing_approx += m.approx();
    if (forcing_exact)
      forcing = Magnitude(Rational(forcing.rational() + m.rational()));
  }
  Magnitude total = forcing_exact ? forcing : Magnitude(forcing_approx);
  report.forcing_sum = total;
  Magnitude half_gap = (Scalar(Rational(gamma)) - lambda).abs() * Magnitude(Rational(1, 2));
  if (total < half_gap) report.outcome = ProbeOutcome::contradiction_found;
  return report;
}

/// The unique formal solution of (S - lambda) f = chi_root and its growth
/// data, witnessing that lambda lies in the spectrum of the forward shift.
struct ResolventReport {
  Scalar lambda;
  bool structural_no_solution = false;  // lambda = 0: evaluate at the root
  std::optional<TreeFunction> solution;
  NormReport growth;
  Magnitude max_residual;
  std::vector<double> level_ratios;  // |f'| growth per level, = 1/|lambda|
  int depth = 0;
};

inline ResolventReport resolvent_probe(const TreeView& tree, const Scalar& lambda,
                                       int depth) {
  ResolventReport report;
  report.lambda = lambda;
  report.depth = depth;
  if (lambda.is_zero()) {
    // (S f)(root) = 0 for every f, so S f = chi_root has no solution.
    report.structural_no_solution = true;
    report.max_residual = Magnitude(Rational(1));
    return report;
  }
  Magnitude one{Rational(1)};
  if (!(lambda.abs() < one))
    throw ContractError("resolvent construction requires 0 < |lambda| < 1");
  tree.check_depth(depth);

  TreeFunction f = TreeFunction::resolvent(lambda);
  Magnitude residual{Rational(0)};
  tree.for_each_representative(depth, [&](const VertexId& v) {
    Scalar lhs = forward_eval_at(tree, f, 1, v) - lambda * f.eval(tree, v);
    Scalar rhs = v.is_root() ? Scalar(1) : Scalar(0);
    residual = max(residual, (lhs - rhs).abs());
  });
  report.max_residual = residual;
  report.growth = lip_norm(tree, f);

  VertexId v = VertexId::root();
  Magnitude previous{Rational(0)};
  for (int level = 1; level <= depth && tree.degree(v) > 0; ++level) {
    v = v.child(0);
    Magnitude current = f.derivative_at(tree, v).abs();
    if (level >= 2 && !previous.is_zero())
      report.level_ratios.push_back(current.approx() / previous.approx());
    previous = current;
  }
  return report;
}

}  // namespace treeshift
