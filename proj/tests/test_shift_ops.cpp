#include <catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace treeshift;
using namespace treeshift::testing;

TEST_CASE("forward shift moves values one level down") {
  TreeView tree(homogeneous_spec(2));
  TreeFunction sf = apply_forward(tree, TreeFunction::indicator(VertexId::root()), 1);
  REQUIRE(sf.is_finite_support());
  tree.for_each_vertex(3, [&](const VertexId& v) {
    Scalar expected = v.level() == 1 ? Scalar(1) : Scalar(0);
    CHECK(sf.eval(tree, v).equals(expected));
  });
}

TEST_CASE("forward shift is an isometry on leafless trees") {
  std::vector<TreeSpec> specs{homogeneous_spec(2), level1_spec({2, 3}),
                              level_periodic_spec({1, 2})};
  SeededRng seeder(101);
  for (int i = 0; i < 3; ++i)
    specs.push_back(random_spec(seeder, CorpusKind::leafless_hbs));
  for (const auto& spec : specs) {
    TreeView tree(spec);
    REQUIRE(tree.is_leafless());
    SeededRng rng(17);
    for (int i = 0; i < 30; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 6, 4);
      NormReport before = lip_norm(tree, f);
      NormReport after = lip_norm(tree, apply_forward(tree, f, 1));
      CHECK(before.value.finite() == after.value.finite());
    }
  }
}

TEST_CASE("a leaf puts the forward shift below isometry") {
  TreeView tree(leafy_spec());
  VertexId leaf = VertexId::parse("0");
  TreeFunction chi = TreeFunction::indicator(leaf);
  TreeFunction s_chi = apply_forward(tree, chi, 1);
  CHECK(s_chi.support().empty());  // S chi_leaf = 0
  CHECK(lip_norm(tree, s_chi).value.finite() < lip_norm(tree, chi).value.finite());
  // general contraction still holds
  SeededRng rng(23);
  for (int i = 0; i < 30; ++i) {
    TreeFunction f = random_finite_support(rng, tree, 5, 4);
    CHECK(lip_norm(tree, apply_forward(tree, f, 1)).value.finite() <=
          lip_norm(tree, f).value.finite());
  }
}

TEST_CASE("derivative commutes with the forward shift") {
  for (const auto& spec : {homogeneous_spec(2), mixed_spec(), free_end_spec()}) {
    TreeView tree(spec);
    SeededRng rng(31);
    for (int i = 0; i < 25; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 6, 4);
      TreeFunction lhs = derivative(tree, apply_forward(tree, f, 1));
      TreeFunction rhs = apply_forward(tree, derivative(tree, f), 1);
      CHECK(pointwise_equal(tree, lhs, rhs, 6));
    }
  }
}

TEST_CASE("backward shift on structured inputs") {
  TreeView tree(homogeneous_spec(2));

  SECTION("eigenfunction with lambda = 1 is fixed") {
    TreeFunction f = TreeFunction::eigen(Scalar(Rational(1)), 2);
    TreeFunction bf = apply_backward(tree, f, 1);
    CHECK(pointwise_equal(tree, bf, f, 6));
    // brute-force route agrees with the aggregation formula
    tree.for_each_vertex(5, [&](const VertexId& v) {
      CHECK(backward_eval_at(tree, f, 1, v).equals(bf.eval(tree, v)));
    });
  }

  SECTION("indicator of a level-one vertex pulls back to the root") {
    TreeFunction bf = apply_backward(tree, TreeFunction::indicator(VertexId::parse("1")), 1);
    CHECK(pointwise_equal(tree, bf, TreeFunction::indicator(VertexId::root()), 3));
  }

  SECTION("|B^2 h_2| attains the norm of B^2") {
    TreeFunction h2 = TreeFunction::h_extremal(2, VertexId::parse("0")).materialized(tree);
    TreeFunction b2h2 = apply_backward(tree, h2, 2);
    CHECK(lip_norm(tree, b2h2).value.finite() == Magnitude(Rational(12)));
  }
}

TEST_CASE("backward powers compose") {
  for (const auto& spec : {homogeneous_spec(2), mixed_spec()}) {
    TreeView tree(spec);
    SeededRng rng(41);
    for (int i = 0; i < 10; ++i) {
      TreeFunction f = random_finite_support(rng, tree, 6, 6);
      for (int n = 1; n <= 6; ++n) {
        TreeFunction direct = apply_backward(tree, f, n);
        TreeFunction iterated = f;
        for (int k = 0; k < n; ++k) iterated = apply_backward(tree, iterated, 1);
        CHECK(pointwise_equal(tree, direct, iterated, 6));
      }
    }
  }
}

TEST_CASE("duality pairing realizes the adjoint identities") {
  TreeView tree(homogeneous_spec(2));

  SECTION("level-one indicator against arbitrary g") {
    TreeFunction f = TreeFunction::indicator(VertexId::parse("0"));
    for (const auto& g : {TreeFunction::level(), TreeFunction::g1(),
                          TreeFunction::indicator(VertexId::parse("0.1"))}) {
      Scalar lhs = duality_pair(tree, f, apply_forward(tree, g, 1));
      // Phi_f(S g) = g(root), matched by Phi_{Bf}(g) = Phi_{chi_root}(g)
      CHECK(lhs.equals(g.eval(tree, VertexId::root())));
      Scalar rhs = duality_pair(tree, apply_backward(tree, f, 1), g);
      CHECK(lhs.equals(rhs));
    }
  }

  SECTION("root indicator pairs to the value at the root") {
    TreeFunction f = TreeFunction::indicator(VertexId::root());
    TreeFunction g = TreeFunction::g2(VertexId::parse("1"));
    CHECK(duality_pair(tree, f, g).equals(g.eval(tree, VertexId::root())));
  }

  SECTION("seeded pairs on three corpus trees, exactly") {
    for (const auto& spec : {homogeneous_spec(2), mixed_spec(), level1_spec({3, 1})}) {
      TreeView t(spec);
      SeededRng rng(59);
      for (int i = 0; i < 200; ++i) {
        TreeFunction f = random_finite_support(rng, t, 6, 4);
        TreeFunction g = random_finite_support(rng, t, 6, 4);
        Scalar lhs = duality_pair(t, f, apply_forward(t, g, 1));
        Scalar rhs = duality_pair(t, apply_backward(t, f, 1), g);
        CHECK(lhs.equals(rhs));
      }
    }
  }
}

TEST_CASE("eigen identity in both scalar modes") {
  TreeView tree(homogeneous_spec(3));

  SECTION("rational lambda, exact") {
    Scalar lambda{Rational(5, 2)};
    TreeFunction f = TreeFunction::eigen(lambda, 3);
    TreeFunction bf = apply_backward(tree, f, 1);
    tree.for_each_vertex(5, [&](const VertexId& v) {
      CHECK(bf.eval(tree, v).equals(lambda * f.eval(tree, v)));
      CHECK(backward_eval_at(tree, f, 1, v).equals(lambda * f.eval(tree, v)));
    });
  }

  SECTION("complex lambda, to tolerance") {
    Scalar lambda{Complex(1.0, 1.5)};
    TreeFunction f = TreeFunction::eigen(lambda, 3);
    TreeFunction bf = apply_backward(tree, f, 1);
    tree.for_each_vertex(5, [&](const VertexId& v) {
      CHECK(bf.eval(tree, v).equals(lambda * f.eval(tree, v), kFloatTolerance));
      CHECK(backward_eval_at(tree, f, 1, v).equals(lambda * f.eval(tree, v), kFloatTolerance));
    });
  }

  SECTION("aggregation refuses the wrong tree") {
    TreeView wrong(mixed_spec());
    CHECK_THROWS_AS(apply_backward(wrong, TreeFunction::eigen(Scalar(Rational(1)), 2), 1),
                    ContractError);
  }
}
