#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace treeshift;
using namespace treeshift::testing;

TEST_CASE("beta weights") {
  TreeView t2(homogeneous_spec(2));
  CHECK(beta(t2, VertexId::parse("0.1"), 2) == Rational(1, 4));
  CHECK(beta(t2, VertexId::parse("0.1.0"), 2) == Rational(1, 4));
  CHECK(beta(t2, VertexId::parse("0"), 2) == Rational(0));  // |v| < n

  TreeView mixed(mixed_spec());
  // deep inside the ternary sector rooted at 1.0.0
  CHECK(beta(mixed, VertexId::parse("1.0.0.0.0.0"), 3) == Rational(1, 27));
}

TEST_CASE("R_n spreads values over n-fold children") {
  TreeView tree(homogeneous_spec(2));

  SECTION("indicator of the root, three levels down") {
    TreeFunction r3 = apply_Rn(tree, TreeFunction::indicator(VertexId::root()), 3);
    REQUIRE(r3.is_finite_support());
    CHECK(r3.support().size() == 8);
    for (const auto& [v, s] : r3.support()) {
      CHECK(v.level() == 3);
      CHECK(s.equals(Scalar(Rational(1, 8))));
    }
  }

  SECTION("level-one indicator, one level down") {
    TreeFunction r1 = apply_Rn(tree, TreeFunction::indicator(VertexId::parse("1")), 1);
    CHECK(r1.support().size() == 2);
    CHECK(r1.eval(tree, VertexId::parse("1.0")).equals(Scalar(Rational(1, 2))));
    CHECK(r1.eval(tree, VertexId::parse("1.1")).equals(Scalar(Rational(1, 2))));
  }

  SECTION("supports shift down past any previously realized depth") {
    TreeFunction r = apply_Rn(tree, TreeFunction::indicator(VertexId::root()), 12);
    CHECK(r.support().size() == 4096);
    CHECK(r.support().begin()->first.level() == 12);
  }
}

TEST_CASE("B^n R_n is the identity on finite supports") {
  std::vector<std::pair<TreeSpec, int>> cases{{homogeneous_spec(2), 10},
                                              {homogeneous_spec(3), 6},
                                              {mixed_spec(), 5},
                                              {free_end_spec(), 10}};
  for (const auto& [spec, nmax] : cases) {
    TreeView tree(spec);
    SeededRng rng(83);
    for (int i = 0; i < 8; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 5, 3);
      for (int n = 1; n <= nmax; ++n) {
        if (tree.gamma_n(VertexId::root(), n) > 5000) break;
        TreeFunction back = apply_backward(tree, apply_Rn(tree, f, n), n);
        // exact identity wherever n-fold children exist
        bool identity = true;
        for (const auto& [v, s] : f.support()) {
          Scalar expected = tree.gamma_n(v, n) == 0 ? Scalar(0) : s;
          if (!back.eval(tree, v).equals(expected)) identity = false;
        }
        CHECK(identity);
        if (tree.is_leafless()) CHECK(pointwise_equal(tree, back, f, f.support_depth()));
      }
    }
  }
}

TEST_CASE("criterion run on the binary tree with the root indicator") {
  TreeView tree(homogeneous_spec(2));
  CriterionRun run = criterion_run(tree, TreeFunction::indicator(VertexId::root()), 10);
  CHECK(run.verdict == CriterionVerdict::satisfied_on_window);
  REQUIRE(run.rows.size() == 10);
  for (const auto& row : run.rows) {
    CHECK(row.bn_norm.is_zero());
    CHECK(row.rn_norm == Magnitude(Rational(Integer(1), ipow(2, unsigned(row.n)))));
    CHECK(row.identity_defect.is_zero());
  }
  // the fast norm column matches materialized R_n f
  for (int n = 1; n <= 8; ++n) {
    TreeFunction rn = apply_Rn(tree, TreeFunction::indicator(VertexId::root()), n);
    CHECK(lip_norm(tree, rn).value.finite() == run.rows[std::size_t(n - 1)].rn_norm);
  }
}

TEST_CASE("criterion run edge cases") {
  SECTION("the zero function gives all-zero rows") {
    TreeView tree(homogeneous_spec(2));
    CriterionRun run = criterion_run(tree, TreeFunction::zero(), 6);
    CHECK(run.verdict == CriterionVerdict::satisfied_on_window);
    for (const auto& row : run.rows) {
      CHECK(row.bn_norm.is_zero());
      CHECK(row.rn_norm.is_zero());
      CHECK(row.identity_defect.is_zero());
    }
  }
  SECTION("a free end defeats the criterion") {
    TreeView tree(free_end_spec());
    TreeFunction f = TreeFunction::indicator(VertexId::parse("0.0"));
    CriterionRun run = criterion_run(tree, f, 8);
    CHECK(run.verdict == CriterionVerdict::obstruction);
    CHECK(run.free_end);
    // along the end beta stays one, so |R_n f| does not decay
    for (const auto& row : run.rows) CHECK(row.rn_norm == Magnitude(Rational(1)));
  }
  SECTION("unbounded B is refused") {
    TreeView tree(level_periodic_spec({2, 3}));
    CHECK_THROWS_AS(criterion_run(tree, TreeFunction::zero(), 4), ContractError);
  }
}

TEST_CASE("beta decay envelope on trees without free ends") {
  SeededRng seeder(311);
  for (int i = 0; i < 6; ++i) {
    TreeSpec spec = random_spec(seeder, CorpusKind::no_free_end, 2, 3);
    TreeView tree(spec);
    int m = *tree.hbs_level();
    Integer mu = tree.min_positive_sector_degree();
    REQUIRE(mu >= 2);
    for (int n = 2 * m + 1; n <= 2 * m + 6; ++n) {
      Rational bound(Integer(1), ipow(mu, static_cast<unsigned>(n - m)));
      Rational sup(0);
      tree.for_each_representative(n + m + 2, [&](const VertexId& v) {
        sup = std::max(sup, beta(tree, v, n));
      });
      CHECK(sup <= bound);
    }
  }
}

TEST_CASE("R_n norm bound by the beta supremum") {
  TreeView tree(mixed_spec());
  SeededRng rng(127);
  for (int i = 0; i < 20; ++i) {
    TreeFunction f = random_finite_support(rng, tree, 5, 3);
    if (f.support().empty()) continue;
    for (int n = 1; n <= 5; ++n) {
      Rational sup_beta(0);
      tree.for_each_vertex(f.support_depth() + n + 1, [&](const VertexId& v) {
        sup_beta = std::max(sup_beta, beta(tree, v, n));
      });
      Magnitude bound = Magnitude(Rational(2)) * f.max_abs() * Magnitude(sup_beta);
      TreeFunction rn = apply_Rn(tree, f, n);
      CHECK(lip_norm(tree, rn).value.finite() <= bound);
    }
  }
}

TEST_CASE("finite supports are closed under B, S and R_n") {
  TreeView tree(homogeneous_spec(2));
  SeededRng rng(61);
  for (int i = 0; i < 10; ++i) {
    TreeFunction f = random_finite_support(rng, tree, 5, 3);
    CHECK(apply_backward(tree, f, 2).is_finite_support());
    CHECK(apply_forward(tree, f, 2).is_finite_support());
    CHECK(apply_Rn(tree, f, 2).is_finite_support());
  }
}

TEST_CASE("dichotomy: free ends against the criterion") {
  SeededRng seeder(404);
  for (int i = 0; i < 12; ++i) {
    CorpusKind kind = i % 2 == 0 ? CorpusKind::no_free_end : CorpusKind::free_end;
    TreeSpec sp = random_spec(seeder, kind, 2, 3);
    TreeView tree(sp);
    SeededRng rng(500 + std::uint64_t(i));
    TreeFunction f = random_finite_support(rng, tree, 4, 2);
    CriterionRun run = criterion_run(tree, f, 2 * (*tree.hbs_level()) + 8);
    if (tree.has_free_end()) {
      CHECK(run.verdict == CriterionVerdict::obstruction);
      // and an explicit orbit obstruction exists
      VertexId v_star = tree.find_free_end()->child(0);
      auto result = free_end_obstruction(tree, v_star, TreeFunction::zero(), 5);
      CHECK(result.certified);
    } else {
      CHECK(run.verdict == CriterionVerdict::satisfied_on_window);
    }
  }
}

TEST_CASE("free-end obstruction witnesses") {
  TreeView tree(free_end_spec());
  VertexId v_star = VertexId::parse("0.0");

  SECTION("the zero function is repelled at distance one") {
    auto result = free_end_obstruction(tree, v_star, TreeFunction::zero(), 7);
    CHECK(result.bound == Magnitude(Rational(1)));
    CHECK(result.certified);
    CHECK(result.w_N.level() == v_star.level() + 7);
  }

  SECTION("constant slope one quarter along the end") {
    TreeFunction::Support values;
    VertexId v = VertexId::parse("0");
    for (int k = 1; k <= 12; ++k) {
      v = v.child(0);
      values.emplace(v, Scalar(Rational(k, 4)));
    }
    // eventually constant continuation keeps the norm at 1/4
    TreeFunction::Support slope;
    v = VertexId::parse("0");
    for (int k = 1; k <= 12; ++k) {
      v = v.child(0);
      slope.emplace(v, Scalar(Rational(1, 4)));
    }
    TreeFunction f = TreeFunction::antiderivative_of(slope);
    CHECK(lip_norm(tree, f).value.finite() == Magnitude(Rational(1, 4)));
    auto result = free_end_obstruction(tree, v_star, f, 5);
    CHECK(result.bound == Magnitude(Rational(3, 4)));
    CHECK(result.certified);
  }

  SECTION("sweep of seeded small functions, N up to 20") {
    SeededRng rng(271);
    for (int i = 0; i < 100; ++i) {
      TreeFunction raw = random_finite_support(rng, tree, 5, 4);
      NormReport norm = lip_norm(tree, raw);
      Rational scale = norm.value.finite().rational() == 0
                           ? Rational(1)
                           : Rational(1) / (Rational(2) * norm.value.finite().rational() +
                                            Rational(1));
      TreeFunction f = raw.scaled(Scalar(scale));
      int n = 1 + static_cast<int>(rng.next(0, 19));
      auto result = free_end_obstruction(tree, v_star, f, n);
      CHECK(result.certified);
      CHECK(result.bound.rational() > Rational(1, 2));
    }
  }

  SECTION("preconditions are enforced") {
    CHECK_THROWS_AS(
        free_end_obstruction(tree, v_star, TreeFunction::indicator(v_star), 3),
        ContractError);  // norm 1 is too large
    TreeView t2(homogeneous_spec(2));
    CHECK_THROWS_AS(
        free_end_obstruction(t2, VertexId::parse("0.0"), TreeFunction::zero(), 3),
        ContractError);  // not a free end
  }
}

TEST_CASE("the forward shift is never hypercyclic") {
  TreeView tree(homogeneous_spec(2));
  CHECK(forward_not_hypercyclic_probe(tree, TreeFunction::indicator(VertexId::root()), 1) ==
        Magnitude(Rational(1)));
  SeededRng rng(13);
  for (int i = 0; i < 50; ++i) {
    TreeFunction f = random_finite_support(rng, tree, 6, 4);
    int n = 1 + static_cast<int>(rng.next(0, 14));
    CHECK(forward_not_hypercyclic_probe(tree, f, n) == Magnitude(Rational(1)));
  }
}
